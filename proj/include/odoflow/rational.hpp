#pragma once

// Exact arithmetic aliases and small helpers shared by every module.
// All quantities that the toolkit reports are mpz/mpq exact; doubles appear
// only inside the certified-comparison machinery (window.cpp) and never leak.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace odoflow {

using Int = mpz_class;
using Rat = mpq_class;

// Canonicalized p/q. gmpxx does not canonicalize the two-arg constructor.
Rat make_rat(const Int& num, const Int& den);
Rat make_rat(long num, long den);

// Accepts "p" or "p/q" (q > 0 after canonicalization). Throws std::invalid_argument.
Rat parse_rat(const std::string& text);

// Always renders an explicit denominator: "3/1", "-2/7".
std::string rat_str(const Rat& r);
std::string int_str(const Int& n);

Int pow_int(const Int& base, unsigned long exp);
// Integer exponents of either sign; base must be nonzero when exp < 0.
Rat pow_rat(const Rat& base, long exp);

// floor / ceil of a rational as exact integers.
Int floor_rat(const Rat& r);
Int ceil_rat(const Rat& r);

// Contract-violation errors. Expected outcomes (overflow, undetermined
// increments, ...) are modeled as result values, not exceptions; these fire
// only when a caller breaks a stated precondition.
struct DepthMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ArityMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BandExceedsCeilingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct RangeUndecidableError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotMeasurePreservingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Raised when the adaptive-precision comparison hits its bit cap without
// separating the two sides. Carries the offending quantities in the message.
struct PrecisionExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace odoflow
