#pragma once

// JSON-lines serialization of iteration records, one record per line. Doubles are written in
// shortest round-trip form so a reload compares equal.

#include <iosfwd>
#include <span>
#include <vector>

#include "alis/loop.hpp"

namespace alis {

void write_records(std::ostream& out, std::span<const IterationRecord> records);
// Throws ParseError naming the offending line.
std::vector<IterationRecord> read_records(std::istream& in);

}  // namespace alis
