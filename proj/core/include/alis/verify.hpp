#pragma once

// Property checks for the sampling and bound machinery, runnable from the command line.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace alis {

enum class VerifySuite { Sampling, Bounds, All };
VerifySuite parse_verify_suite(std::string_view name);

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;  // measured values
    std::string replay;  // JSON of the failing instance, empty unless status == Fail
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    // One "[PASS] name: detail" line per check, plus replay payloads for failures.
    std::string render() const;
};

// Monte Carlo checks need at least this many trials; below it they are skipped.
inline constexpr std::size_t kMinVerifyTrials = 1000;
inline constexpr std::size_t kDefaultVerifyTrials = 100000;

VerifyReport run_verify(VerifySuite suite, std::size_t trials, std::uint64_t seed);

}  // namespace alis
