#pragma once

// Rational windows for return-time statistics. A window is an interval with
// exact rational endpoints and per-endpoint open/closed flags; `mirrored`
// adds the reflected interval (-hi, -lo) for statistics that look at both
// time directions or both cocycle signs.
//
// Windows born from a log scale stand in for the transcendental interval
// (e^(s-delta), e^(s+delta)). Their rational endpoints are certified: no
// integer lies between lo and e^(s-delta), nor between hi and e^(s+delta),
// so integer membership agrees exactly with the true interval. The
// certification escalates MPFR working precision under directed rounding
// until the enclosures around each endpoint are integer-free.

#include "odoflow/ceiling.hpp"
#include "odoflow/logvalue.hpp"
#include "odoflow/rational.hpp"

namespace odoflow {

enum class WindowProvenance { Direct, FromLogScale };

struct Window {
  Rat lo, hi;
  bool lo_open = true;
  bool hi_open = true;
  bool mirrored = false;
  WindowProvenance provenance = WindowProvenance::Direct;
  Rat log_s, log_delta;    // FromLogScale only
  int precision_bits = 0;  // bits that certified the endpoints (FromLogScale)

  // Requires 0 <= lo < hi, and lo > 0 unless the lower endpoint is open.
  static Window direct(const Rat& lo, const Rat& hi, bool mirrored = false,
                       bool lo_open = true, bool hi_open = true);
  // [K_n, K_{n+1}), the half-open factorial interval.
  static Window k_interval(int n);

  // Membership in the positive branch (the mirrored branch holds negatives
  // only, which integer sums never reach).
  bool contains(const Int& value) const;
  bool contains(const Rat& value) const;

  // True when a certified lower bound on every future sum already clears the
  // window top, i.e. nothing at or above `future_lower_bound` can be inside.
  bool decided_above(const Int& future_lower_bound) const;

  std::string str() const;  // "[lo, hi)" style, for messages and labels
};

// Certified window for (e^(s-delta), e^(s+delta)); see the file comment.
// Requires delta >= 0 and s >= delta (the lower endpoint stays >= 1); s ==
// delta gives the exact endpoint 1. Throws PrecisionExhaustedError when the
// policy cap cannot separate an endpoint from a neighboring integer.
Window window_from_log_scale(const Rat& s, const Rat& delta, bool mirrored,
                             const PrecisionPolicy& policy = {});

}  // namespace odoflow
