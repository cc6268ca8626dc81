#pragma once

// Exact log cocycle values. A LogValue is a formal integer combination
// sum_i m_i * log(r_i) of logs of positive rationals, stored in the canonical
// form log(prod_i r_i^{m_i}). Unique factorization makes that product a
// faithful normal form: two combinations are equal as formal sums iff their
// products are equal, the chain rule is rational multiplication, and negation
// is rational inversion. Equality and sign are therefore exact; ordering
// against a rational bound is certified via directed-rounding enclosures.

#include <compare>

#include "odoflow/rational.hpp"
#include "odoflow/space.hpp"

namespace odoflow {

// Working-precision schedule for certified transcendental comparisons:
// start at start_bits, double until the enclosure separates, give up past
// cap_bits (PrecisionExhaustedError).
struct PrecisionPolicy {
  int start_bits = 64;
  int cap_bits = 4096;
};

class LogValue {
 public:
  LogValue() : prod_(1) {}  // the empty sum, value 0

  static LogValue of_ratio(const Rat& ratio);

  // Appends multiplicity * log(ratio); ratio must be positive.
  void add_term(const Rat& ratio, long multiplicity = 1);

  LogValue& operator+=(const LogValue& other);
  LogValue operator+(const LogValue& other) const;
  LogValue operator-() const;
  bool operator==(const LogValue&) const = default;

  bool is_zero() const { return prod_ == 1; }
  int sign() const;  // sign of the value, exact
  const Rat& ratio_product() const { return prod_; }

  // Exact order of this value against a rational bound. Ties are resolved
  // exactly (log of a rational other than 1 is irrational, so equality can
  // only occur at value 0 vs bound 0); strict cases are separated by MPFR
  // enclosures under the given policy.
  std::strong_ordering compare(const Rat& bound,
                               const PrecisionPolicy& policy = {}) const;

 private:
  explicit LogValue(Rat prod) : prod_(std::move(prod)) {}
  Rat prod_;  // invariant: positive
};

// log(d mu_cyl(to) / d mu_cyl(from)) = log prod_n p_n(to_n) / p_n(from_n),
// the exact log Radon-Nikodym value between the cylinder measures of two
// words of the scheme. Chain rule: v(x,y) + v(y,z) == v(x,z) exactly.
LogValue log_rn_value(const CoordinateScheme& scheme, const Prefix& from,
                      const Prefix& to);

}  // namespace odoflow
