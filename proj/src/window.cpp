#include "odoflow/window.hpp"

#include <mpfr.h>

#include <sstream>

namespace odoflow {

Window Window::direct(const Rat& lo, const Rat& hi, bool mirrored, bool lo_open,
                      bool hi_open) {
  if (lo < 0 || lo >= hi)
    throw std::invalid_argument("Window: need 0 <= lo < hi");
  if (lo == 0 && !lo_open)
    throw std::invalid_argument("Window: lo = 0 must be open");
  Window w;
  w.lo = lo;
  w.hi = hi;
  w.lo_open = lo_open;
  w.hi_open = hi_open;
  w.mirrored = mirrored;
  return w;
}

Window Window::k_interval(int n) {
  return direct(Rat(k_value(n)), Rat(k_value(n + 1)), false,
                /*lo_open=*/false, /*hi_open=*/true);
}

bool Window::contains(const Int& value) const { return contains(Rat(value)); }

bool Window::contains(const Rat& value) const {
  const bool above = lo_open ? value > lo : value >= lo;
  const bool below = hi_open ? value < hi : value <= hi;
  return above && below;
}

bool Window::decided_above(const Int& future_lower_bound) const {
  const Rat b(future_lower_bound);
  return hi_open ? b >= hi : b > hi;
}

std::string Window::str() const {
  std::ostringstream out;
  out << (lo_open ? '(' : '[') << rat_str(lo) << ", " << rat_str(hi)
      << (hi_open ? ')' : ']');
  if (mirrored) out << " mirrored";
  return out.str();
}

namespace {

// Exact rational value of an mpfr number (always representable: m * 2^e).
Rat rat_of_mpfr(mpfr_srcptr x) {
  Int m;
  const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  if (e >= 0) return Rat(m << static_cast<mp_bitcnt_t>(e));
  return make_rat(m, Int(1) << static_cast<mp_bitcnt_t>(-e));
}

// Encloses e^a in [lo, hi] at the given precision with directed rounding.
void exp_enclosure(const Rat& a, int bits, Rat& lo, Rat& hi) {
  mpfr_t v, r;
  mpfr_init2(v, bits);
  mpfr_init2(r, bits);
  mpfr_set_q(v, a.get_mpq_t(), MPFR_RNDD);
  mpfr_exp(r, v, MPFR_RNDD);
  lo = rat_of_mpfr(r);
  mpfr_set_q(v, a.get_mpq_t(), MPFR_RNDU);
  mpfr_exp(r, v, MPFR_RNDU);
  hi = rat_of_mpfr(r);
  mpfr_clear(v);
  mpfr_clear(r);
}

bool integer_free(const Rat& lo, const Rat& hi) {
  // No integer in the closed interval [lo, hi].
  return ceil_rat(lo) > floor_rat(hi);
}

}  // namespace

Window window_from_log_scale(const Rat& s, const Rat& delta, bool mirrored,
                             const PrecisionPolicy& policy) {
  if (delta < 0) throw std::invalid_argument("window_from_log_scale: delta must be >= 0");
  if (s < delta)
    throw std::invalid_argument("window_from_log_scale: need s >= delta");
  if (s == 0 && delta == 0)
    throw std::invalid_argument("window_from_log_scale: degenerate window");
  const Rat a = s - delta;
  const Rat b = s + delta;
  Rat lo, hi;
  bool lo_done = false;
  int used_bits = 0;
  if (a == 0) {
    // e^0 = 1 exactly; open semantics exclude the endpoint itself.
    lo = 1;
    lo_done = true;
  }
  bool hi_done = false;
  for (int bits = policy.start_bits; bits <= policy.cap_bits; bits *= 2) {
    Rat encl_lo, encl_hi;
    if (!lo_done) {
      exp_enclosure(a, bits, encl_lo, encl_hi);
      if (integer_free(encl_lo, encl_hi)) {
        // Any rational in the integer-free enclosure classifies integers
        // exactly like e^a; take the certified underestimate.
        lo = encl_lo;
        lo_done = true;
        used_bits = bits;
      }
    }
    if (!hi_done) {
      exp_enclosure(b, bits, encl_lo, encl_hi);
      if (integer_free(encl_lo, encl_hi)) {
        hi = encl_hi;  // certified overestimate, same integer classification
        hi_done = true;
        used_bits = bits;
      }
    }
    if (lo_done && hi_done) break;
  }
  if (!lo_done || !hi_done)
    throw PrecisionExhaustedError(
        "window_from_log_scale: could not separate e^" +
        rat_str(!lo_done ? a : b) + " from a neighboring integer within " +
        std::to_string(policy.cap_bits) + " bits");
  Window w = Window::direct(lo, hi, mirrored);
  w.provenance = WindowProvenance::FromLogScale;
  w.log_s = s;
  w.log_delta = delta;
  w.precision_bits = used_bits;
  return w;
}

}  // namespace odoflow
