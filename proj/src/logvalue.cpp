#include "odoflow/logvalue.hpp"

#include <mpfr.h>

namespace odoflow {

LogValue LogValue::of_ratio(const Rat& ratio) {
  if (ratio <= 0)
    throw std::invalid_argument("LogValue: ratio must be positive");
  return LogValue(ratio);
}

void LogValue::add_term(const Rat& ratio, long multiplicity) {
  if (ratio <= 0)
    throw std::invalid_argument("LogValue: ratio must be positive");
  prod_ *= pow_rat(ratio, multiplicity);
}

LogValue& LogValue::operator+=(const LogValue& other) {
  prod_ *= other.prod_;
  return *this;
}

LogValue LogValue::operator+(const LogValue& other) const {
  LogValue out = *this;
  out += other;
  return out;
}

LogValue LogValue::operator-() const { return LogValue(1 / prod_); }

int LogValue::sign() const { return cmp(prod_, Rat(1)); }

std::strong_ordering LogValue::compare(const Rat& bound,
                                       const PrecisionPolicy& policy) const {
  // Exact cases first: value 0, bound 0, or both.
  if (prod_ == 1) {
    const int c = -sgn(bound);
    if (c == 0) return std::strong_ordering::equal;
    return c > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (bound == 0) {
    return sign() > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  // Mixed signs separate without any precision.
  if (sign() > 0 && bound < 0) return std::strong_ordering::greater;
  if (sign() < 0 && bound > 0) return std::strong_ordering::less;
  // Same strict sign: log(prod_) is irrational, bound is a nonzero rational,
  // so the true order is strict and a wide enough enclosure decides it.
  for (int bits = policy.start_bits; bits <= policy.cap_bits; bits *= 2) {
    mpfr_t v, lo, hi;
    mpfr_init2(v, bits);
    mpfr_init2(lo, bits);
    mpfr_init2(hi, bits);
    mpfr_set_q(v, prod_.get_mpq_t(), MPFR_RNDD);
    mpfr_log(lo, v, MPFR_RNDD);
    mpfr_set_q(v, prod_.get_mpq_t(), MPFR_RNDU);
    mpfr_log(hi, v, MPFR_RNDU);
    const int below = mpfr_cmp_q(hi, bound.get_mpq_t());
    const int above = mpfr_cmp_q(lo, bound.get_mpq_t());
    mpfr_clear(v);
    mpfr_clear(lo);
    mpfr_clear(hi);
    if (above > 0) return std::strong_ordering::greater;
    if (below < 0) return std::strong_ordering::less;
  }
  throw PrecisionExhaustedError(
      "LogValue::compare: enclosure of log(" + rat_str(prod_) +
      ") vs " + rat_str(bound) + " still ambiguous at " +
      std::to_string(policy.cap_bits) + " bits");
}

LogValue log_rn_value(const CoordinateScheme& scheme, const Prefix& from,
                      const Prefix& to) {
  scheme.require_prefix(from);
  scheme.require_prefix(to);
  LogValue v;
  for (int n = 1; n <= scheme.depth(); ++n) {
    if (from.at(n) == to.at(n)) continue;  // ratio 1 contributes nothing
    v.add_term(scheme.prob(n, to.at(n)) / scheme.prob(n, from.at(n)));
  }
  return v;
}

}  // namespace odoflow
