#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tslab {

using Q = mpq_class;
using Index = std::int64_t;

// Raised when an exhaustive search would exceed its configured budget.
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for malformed user input (vectors, descriptors, config files).
struct BadInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses "p/q", "p", or a finite decimal such as "0.25" into a canonical rational.
Q parse_rational(const std::string& text);

// "p/q" (or "p" when q == 1).
std::string to_string(const Q& q);

// Six significant digits; formatting only, never fed back into arithmetic.
std::string to_decimal(const Q& q);

} // namespace tslab
