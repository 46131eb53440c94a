#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alis {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// A point with positive loss was assigned zero probability, so 1/p is unbounded.
class InfiniteWeight : public Error {
public:
    using Error::Error;
};

// Gradient descent produced a non-finite objective.
class Divergence : public Error {
public:
    Divergence(std::size_t iteration, const std::string& what)
        : Error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

// Malformed input file. line() is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Rows of a CSV file disagree on the number of columns.
class SchemaError : public ParseError {
public:
    using ParseError::ParseError;
};

// The oracle refused a query because its budget is spent.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace alis
