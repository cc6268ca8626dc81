#include "odoflow/statistics.hpp"

#include <algorithm>
#include <bit>
#include <thread>

namespace odoflow {

namespace {

// ---------------------------------------------------------------- plumbing

// Runs fn(chunk, begin, end) over contiguous ranges of [0, total), one chunk
// per worker. Exact rational merging makes results order-independent, but
// chunks are still indexed so callers can merge deterministically. Worker
// exceptions are rethrown in chunk order.
template <typename Fn>
void parallel_for_chunks(long total, int jobs, Fn&& fn) {
  const int workers = std::max(1, jobs);
  if (workers == 1 || total < 2048) {
    fn(0, 0L, total);
    return;
  }
  const long per = (total + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  int used = 0;
  for (int c = 0; c < workers; ++c) {
    const long b = static_cast<long>(c) * per;
    const long e = std::min(total, b + per);
    if (b >= e) break;
    ++used;
    threads.emplace_back([&fn, &errors, c, b, e] {
      try {
        fn(c, b, e);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int c = 0; c < used; ++c)
    if (errors[static_cast<std::size_t>(c)])
      std::rethrow_exception(errors[static_cast<std::size_t>(c)]);
}

int max_chunks(int jobs) { return std::max(1, jobs); }

// The words a statistic ranges over: an explicit set, or the full space.
struct ScanDomain {
  const CoordinateScheme& scheme;
  const CylinderSet* set;  // nullptr = full space

  long count() const {
    if (set) return static_cast<long>(set->count());
    return static_cast<long>(scheme.word_count().get_si());
  }
  Prefix at(long i) const {
    if (set) return set->members()[static_cast<std::size_t>(i)];
    return scheme.prefix_at(Int(i));
  }
  bool contains(const Prefix& p) const { return !set || set->contains(p); }
  bool is_full() const { return set == nullptr; }
  Rat measure() const {
    if (set) return cylinder_measure(scheme, *set);
    return Rat(1);
  }
};

// Integer view of a window: exactly the integers lo..hi lie inside the
// positive branch. All orbit sums are integers, so scans work purely in mpz.
struct IntWindow {
  Int lo, hi;  // empty when lo > hi

  bool contains(const Int& t) const { return t >= lo && t <= hi; }
  // Nothing at or above the bound can be inside (sums only grow).
  bool decided_above(const Int& future_lower_bound) const {
    return future_lower_bound > hi;
  }
};

IntWindow int_window(const Window& w) {
  IntWindow iw;
  iw.lo = w.lo_open ? floor_rat(w.lo) + 1 : ceil_rat(w.lo);
  iw.hi = w.hi_open ? ceil_rat(w.hi) - 1 : floor_rat(w.hi);
  return iw;
}

// Does {first + j*step : j >= 0} meet the window?
bool progression_meets(const IntWindow& w, const Int& first, const Int& step) {
  if (first > w.hi) return false;
  if (first >= w.lo) return true;
  const Int j = (w.lo - first + step - 1) / step;
  return first + j * step <= w.hi;
}

// In-place odometer steps (no reallocation; scans run millions of these).
bool odo_step_forward(const CoordinateScheme& s, Prefix& p) {
  for (int n = 1; n <= s.depth(); ++n) {
    if (p.at(n) < s.zmax(n)) {
      ++p.at(n);
      for (int j = 1; j < n; ++j) p.at(j) = 0;
      return true;
    }
  }
  return false;
}

bool odo_step_backward(const CoordinateScheme& s, Prefix& p) {
  for (int n = 1; n <= s.depth(); ++n) {
    if (p.at(n) > 0) {
      --p.at(n);
      for (int j = 1; j < n; ++j) p.at(j) = s.zmax(j);
      return true;
    }
  }
  return false;
}

// Ceiling lookup for a scan series: either the determined value or a
// certified lower bound. Pointers reference the stable k_value table (or the
// System's own constant), so per-step copies are avoided.
struct CeilRef {
  const Int* value;  // nullptr when undetermined
  const Int* bound;  // then this lower bound holds
};

// A truncated odometer system as the scans see it: scheme + ceiling, with an
// optional conjugating relabeling (step = relabel after T after relabel^-1,
// ceiling evaluated on the unrelabeled word).
struct System {
  const CoordinateScheme& scheme;
  CeilingKind kind;
  Int const_value;
  std::vector<std::vector<const Int*>> table;  // [N-1][x_{N+1}], factorial
  const Int* depth_bound = nullptr;            // K_{2^(M+1)}, factorial
  const Relabeling* sigma = nullptr;
  std::optional<Relabeling> sigma_inv;
  Prefix top;     // the word with no forward step (relabeled all-full)
  Prefix bottom;  // the word with no backward step (relabeled all-zero)

  static System make(const CoordinateScheme& scheme, const CeilingSpec& spec,
                     const Relabeling* sigma) {
    System sys{scheme,
               spec.kind(),
               spec.kind() == CeilingKind::Constant ? spec.constant_value() : Int(0),
               {},
               nullptr,
               sigma,
               std::nullopt,
               scheme.all_full(),
               scheme.all_zero()};
    if (sys.kind == CeilingKind::Factorial) {
      if (!scheme.is_dyadic())
        throw std::invalid_argument("factorial ceiling needs the dyadic scheme");
      const int M = scheme.depth();
      sys.table.resize(static_cast<std::size_t>(M - 1));
      for (int N = 1; N <= M - 1; ++N) {
        auto& row = sys.table[static_cast<std::size_t>(N - 1)];
        row.resize(static_cast<std::size_t>(scheme.size(N + 1)));
        for (int sym = 0; sym < scheme.size(N + 1); ++sym)
          row[static_cast<std::size_t>(sym)] = &k_value((1 << (N + 1)) + sym);
      }
      sys.depth_bound = &k_value(1 << (M + 1));
    }
    if (sigma) {
      sigma->require_compatible(scheme);
      sys.sigma_inv = sigma->inverse();
      sys.top = sigma->apply(sys.top);
      sys.bottom = sigma->apply(sys.bottom);
    }
    return sys;
  }

  CeilRef ceiling_of(const Prefix& p) const {
    if (kind == CeilingKind::Constant) return {&const_value, nullptr};
    const Prefix* q = &p;
    Prefix tmp;
    if (sigma) {
      tmp = sigma_inv->apply(p);
      q = &tmp;
    }
    const int M = scheme.depth();
    for (int n = 1; n <= M - 1; ++n)
      if (q->at(n) < scheme.zmax(n))
        return {table[static_cast<std::size_t>(n - 1)]
                     [static_cast<std::size_t>(q->at(n + 1))],
                nullptr};
    return {nullptr, depth_bound};
  }

  bool step_forward(Prefix& p) const {
    if (!sigma) return odo_step_forward(scheme, p);
    Prefix q = sigma_inv->apply(p);
    if (!odo_step_forward(scheme, q)) return false;
    p = sigma->apply(q);
    return true;
  }

  bool step_backward(Prefix& p) const {
    if (!sigma) return odo_step_backward(scheme, p);
    Prefix q = sigma_inv->apply(p);
    if (!odo_step_backward(scheme, q)) return false;
    p = sigma->apply(q);
    return true;
  }
};

// ------------------------------------------------------------ return scans

enum class Outcome { Member, NonMember, Undetermined, BoundaryDead };

Outcome forward_scan(const System& sys, const ScanDomain& dom, const IntWindow& w,
                     const Prefix& start) {
  if (start == sys.top) return Outcome::BoundaryDead;
  Prefix cur = start;
  Int sum(0);
  for (;;) {
    const CeilRef cv = sys.ceiling_of(cur);
    if (!cv.value) {
      // Undetermined increment: every later sum is >= sum + bound.
      return w.decided_above(sum + *cv.bound) ? Outcome::NonMember
                                              : Outcome::Undetermined;
    }
    sum += *cv.value;
    if (!sys.step_forward(cur)) {
      // Fell off the all-full word with a determined ceiling (constant
      // ceilings only). The remaining increments are known (= c) but the
      // words they land on lie beyond the depth.
      const bool can_hit = progression_meets(w, sum, sys.const_value);
      if (dom.is_full()) return can_hit ? Outcome::Member : Outcome::NonMember;
      return can_hit ? Outcome::Undetermined : Outcome::NonMember;
    }
    if (w.contains(sum) && dom.contains(cur)) return Outcome::Member;
    if (w.decided_above(sum)) return Outcome::NonMember;
  }
}

Outcome backward_scan(const System& sys, const ScanDomain& dom, const IntWindow& w,
                      const Prefix& start) {
  if (start == sys.bottom) return Outcome::BoundaryDead;
  Prefix cur = start;
  Int sum(0);
  for (;;) {
    if (!sys.step_backward(cur)) {
      // Bottom of the truncation. Under a constant ceiling the increments
      // continue with c; under the factorial ceiling the unseen predecessor
      // has every coordinate up to M full, so its value is >= K_{2^(M+1)}.
      if (sys.kind == CeilingKind::Constant) {
        const bool can_hit =
            progression_meets(w, sum + sys.const_value, sys.const_value);
        if (dom.is_full()) return can_hit ? Outcome::Member : Outcome::NonMember;
        return can_hit ? Outcome::Undetermined : Outcome::NonMember;
      }
      return w.decided_above(sum + *sys.depth_bound) ? Outcome::NonMember
                                                     : Outcome::Undetermined;
    }
    const CeilRef cv = sys.ceiling_of(cur);
    if (!cv.value) {
      return w.decided_above(sum + *cv.bound) ? Outcome::NonMember
                                              : Outcome::Undetermined;
    }
    sum += *cv.value;
    if (w.contains(sum) && dom.contains(cur)) return Outcome::Member;
    if (w.decided_above(sum)) return Outcome::NonMember;
  }
}

struct ScanOutput {
  std::vector<Prefix> members;
  std::vector<Prefix> undetermined;
  Rat boundary{0};
};

ScanOutput run_direction(const System& sys, const ScanDomain& dom,
                         const IntWindow& w, OrbitDirection dir, int jobs) {
  const long total = dom.count();
  std::vector<ScanOutput> chunks(static_cast<std::size_t>(max_chunks(jobs)));
  parallel_for_chunks(total, jobs, [&](int chunk, long b, long e) {
    ScanOutput& out = chunks[static_cast<std::size_t>(chunk)];
    for (long i = b; i < e; ++i) {
      const Prefix p = dom.at(i);
      const Outcome o = dir == OrbitDirection::Forward
                            ? forward_scan(sys, dom, w, p)
                            : backward_scan(sys, dom, w, p);
      switch (o) {
        case Outcome::Member:
          out.members.push_back(p);
          break;
        case Outcome::Undetermined:
          out.undetermined.push_back(p);
          break;
        case Outcome::BoundaryDead:
          out.boundary += dom.scheme.prefix_measure(p);
          break;
        case Outcome::NonMember:
          break;
      }
    }
  });
  ScanOutput merged;
  for (auto& c : chunks) {
    merged.members.insert(merged.members.end(), c.members.begin(), c.members.end());
    merged.undetermined.insert(merged.undetermined.end(), c.undetermined.begin(),
                               c.undetermined.end());
    merged.boundary += c.boundary;
  }
  return merged;
}

std::vector<Prefix> sorted_difference(std::vector<Prefix> a,
                                      const std::vector<Prefix>& b) {
  std::vector<Prefix> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

ReturnReport assemble_return_report(const CoordinateScheme& scheme,
                                    const System& sys, const ScanDomain& dom,
                                    const Window& window, Directions directions,
                                    int jobs) {
  const IntWindow iw = int_window(window);
  ReturnReport report(scheme.depth());
  report.window = window;
  report.base_measure = dom.measure();
  const bool want_f =
      directions == Directions::Forward || directions == Directions::Both;
  const bool want_b =
      directions == Directions::Backward || directions == Directions::Both;
  ScanOutput f, b;
  if (want_f) f = run_direction(sys, dom, iw, OrbitDirection::Forward, jobs);
  if (want_b) b = run_direction(sys, dom, iw, OrbitDirection::Backward, jobs);

  auto fill = [&scheme](DirectionalResult& r, ScanOutput& o) {
    r.members = CylinderSet(scheme.depth(), std::move(o.members));
    r.measure = cylinder_measure(scheme, r.members);
    CylinderSet undet(scheme.depth(), std::move(o.undetermined));
    r.undetermined_mass = cylinder_measure(scheme, undet);
    r.boundary_mass = o.boundary;
  };
  // Union first, while the per-direction vectors are still plain.
  std::sort(f.members.begin(), f.members.end());
  std::sort(b.members.begin(), b.members.end());
  std::sort(f.undetermined.begin(), f.undetermined.end());
  std::sort(b.undetermined.begin(), b.undetermined.end());
  {
    std::vector<Prefix> mem;
    std::set_union(f.members.begin(), f.members.end(), b.members.begin(),
                   b.members.end(), std::back_inserter(mem));
    std::vector<Prefix> und;
    std::set_union(f.undetermined.begin(), f.undetermined.end(),
                   b.undetermined.begin(), b.undetermined.end(),
                   std::back_inserter(und));
    // A word decided in either direction is decided; only words that are
    // members nowhere and undetermined somewhere stay quarantined.
    und = sorted_difference(std::move(und), mem);
    report.combined.members = CylinderSet(scheme.depth(), std::move(mem));
    report.combined.measure = cylinder_measure(scheme, report.combined.members);
    report.combined.undetermined_mass =
        cylinder_measure(scheme, CylinderSet(scheme.depth(), std::move(und)));
    report.combined.boundary_mass = f.boundary + b.boundary;
  }
  if (want_f) fill(report.forward, f);
  if (want_b) fill(report.backward, b);
  return report;
}

}  // namespace

ReturnReport return_window_set(const CoordinateScheme& scheme,
                               const CeilingSpec& spec,
                               const CylinderSet* base_set, const Window& window,
                               Directions directions, int jobs) {
  if (base_set && base_set->depth() != scheme.depth())
    throw DepthMismatchError("return_window_set: set depth mismatch");
  const System sys = System::make(scheme, spec, nullptr);
  const ScanDomain dom{scheme, base_set};
  return assemble_return_report(scheme, sys, dom, window, directions, jobs);
}

// ------------------------------------------------------------ IntervalUnion

void IntervalUnion::add(const Rat& lo, const Rat& hi) {
  if (lo >= hi) return;  // nothing with positive length
  std::pair<Rat, Rat> piece{lo, hi};
  std::vector<std::pair<Rat, Rat>> out;
  bool placed = false;
  for (auto& p : pieces_) {
    if (p.second < piece.first) {
      out.push_back(p);
    } else if (piece.second < p.first) {
      if (!placed) {
        out.push_back(piece);
        placed = true;
      }
      out.push_back(p);
    } else {
      piece.first = std::min(piece.first, p.first);
      piece.second = std::max(piece.second, p.second);
    }
  }
  if (!placed) out.push_back(piece);
  pieces_ = std::move(out);
}

Rat IntervalUnion::total_length() const {
  Rat len(0);
  for (const auto& p : pieces_) len += p.second - p.first;
  return len;
}

bool IntervalUnion::covers(const IntervalUnion& other) const {
  for (const auto& q : other.pieces_) {
    bool ok = false;
    for (const auto& p : pieces_)
      if (p.first <= q.first && q.second <= p.second) {
        ok = true;
        break;
      }
    if (ok) continue;
    return false;
  }
  return true;
}

// ------------------------------------------------------------ rectangle

namespace {

// Is some multiple j*step (j >= j_min) inside the open interval (alpha, beta)?
bool multiple_in_open(const Rat& alpha, const Rat& beta, const Int& step,
                      long j_min) {
  if (beta <= 0) return false;
  Int j(j_min);
  if (Rat(j) * Rat(step) <= alpha)  // bump to the least j with j*step > alpha
    j = floor_rat(alpha / Rat(step)) + 1;
  return Rat(j) * Rat(step) < beta;
}

}  // namespace

RectangleReport rectangle_flow_window_measure(const CoordinateScheme& scheme,
                                              const CeilingSpec& spec,
                                              const CylinderSet* base_set,
                                              const Rat& band_lo,
                                              const Rat& band_hi,
                                              const Window& window, int jobs) {
  if (base_set && base_set->depth() != scheme.depth())
    throw DepthMismatchError("rectangle: set depth mismatch");
  if (band_lo < 0 || band_lo >= band_hi)
    throw std::invalid_argument("rectangle: need 0 <= a < b");
  const System sys = System::make(scheme, spec, nullptr);
  const ScanDomain dom{scheme, base_set};
  const Rat a = band_lo, b = band_hi;
  const Rat& lo = window.lo;
  const Rat& hi = window.hi;
  const long total = dom.count();

  // The rectangle must sit inside every scanned fiber; an undetermined
  // ceiling still certifies b <= f via its lower bound.
  for (long i = 0; i < total; ++i) {
    const Prefix p = dom.at(i);
    const CeilRef cv = sys.ceiling_of(p);
    const Int& limit = cv.value ? *cv.value : *cv.bound;
    if (b > Rat(limit))
      throw BandExceedsCeilingError("rectangle: band top " + rat_str(b) +
                                    " above the fiber ceiling of " +
                                    prefix_str(p));
  }

  struct Chunk {
    std::vector<FiberSlice> fibers;
    Rat measure{0};
    Rat undetermined{0};
  };
  std::vector<Chunk> chunks(static_cast<std::size_t>(max_chunks(jobs)));
  parallel_for_chunks(total, jobs, [&](int chunk, long cb, long ce) {
    Chunk& out = chunks[static_cast<std::size_t>(chunk)];
    for (long i = cb; i < ce; ++i) {
      FiberSlice slice;
      slice.base = dom.at(i);
      IntervalUnion& U = slice.covered;
      auto clip_add = [&](const Rat& l, const Rat& h) {
        U.add(std::max(a, l), std::min(b, h));
      };
      // Within-fiber translations (k = 0): t = u' - u.
      clip_add(a - hi, b - lo);                  // positive times
      if (window.mirrored) clip_add(a + lo, b + hi);  // negative times

      // Forward crossings: after k steps with sum S, the reachable heights
      // are u' = u + t - S, so u ranges over (S + a - hi, S + b - lo).
      {
        Prefix cur = slice.base;
        Int S(0);
        const Rat stop = b - a + hi;  // beyond this every u-interval is empty
        for (;;) {
          const CeilRef cv = sys.ceiling_of(cur);
          if (!cv.value) {
            if (Rat(S + *cv.bound) < stop) slice.undetermined = true;
            break;
          }
          S += *cv.value;
          if (!sys.step_forward(cur)) {
            // Constant-ceiling tail: increments stay c, landing words are
            // beyond the depth.
            const Int& c = sys.const_value;
            if (dom.is_full()) {
              if (Rat(c) <= (b - a) + (hi - lo)) {
                // consecutive u-intervals overlap; their union is one ray
                clip_add(Rat(S) + a - hi, b);
              } else {
                Int Sj = S;
                while (Rat(Sj) + a - hi < b) {
                  clip_add(Rat(Sj) + a - hi, Rat(Sj) + b - lo);
                  Sj += c;
                }
              }
            } else if (multiple_in_open(a - b + lo - Rat(S),
                                        b - a + hi - Rat(S), c, 0)) {
              slice.undetermined = true;
            }
            break;
          }
          if (Rat(S) >= stop) break;
          if (dom.contains(cur)) clip_add(Rat(S) + a - hi, Rat(S) + b - lo);
        }
      }
      // Backward crossings (only the mirrored branch supplies negative
      // times): after k steps with sum B, u ranges over
      // (a + lo - B, b + hi - B).
      if (window.mirrored) {
        Prefix cur = slice.base;
        Int B(0);
        const Rat stop = b - a + hi;
        for (;;) {
          if (!sys.step_backward(cur)) {
            if (sys.kind == CeilingKind::Constant) {
              const Int& c = sys.const_value;
              if (dom.is_full()) {
                if (Rat(c) <= (b - a) + (hi - lo)) {
                  clip_add(a, b + hi - Rat(B) - Rat(c));
                } else {
                  Int Bj = B + c;
                  while (b + hi - Rat(Bj) > a) {
                    clip_add(a + lo - Rat(Bj), b + hi - Rat(Bj));
                    Bj += c;
                  }
                }
              } else if (multiple_in_open(lo - (b - a) - Rat(B),
                                          b - a + hi - Rat(B), c, 1)) {
                slice.undetermined = true;
              }
            } else if (Rat(B + *sys.depth_bound) < stop) {
              slice.undetermined = true;
            }
            break;
          }
          const CeilRef cv = sys.ceiling_of(cur);
          if (!cv.value) {
            if (Rat(B + *cv.bound) < stop) slice.undetermined = true;
            break;
          }
          B += *cv.value;
          if (Rat(B) >= stop) break;
          if (dom.contains(cur)) clip_add(a + lo - Rat(B), b + hi - Rat(B));
        }
      }
      const Rat mu = scheme.prefix_measure(slice.base);
      const Rat len = U.total_length();
      out.measure += mu * len;
      if (slice.undetermined) out.undetermined += mu * ((b - a) - len);
      out.fibers.push_back(std::move(slice));
    }
  });

  RectangleReport report;
  report.band_lo = a;
  report.band_hi = b;
  report.window = window;
  for (auto& c : chunks) {
    report.measure += c.measure;
    report.undetermined_mass += c.undetermined;
    report.fibers.insert(report.fibers.end(),
                         std::make_move_iterator(c.fibers.begin()),
                         std::make_move_iterator(c.fibers.end()));
  }
  std::sort(report.fibers.begin(), report.fibers.end(),
            [](const FiberSlice& x, const FiberSlice& y) { return x.base < y.base; });
  return report;
}

// ------------------------------------------------------- coordinate claims

namespace {

// Grows a local pointer cache over the K table so the bracket advance does
// not take the table lock on every step.
const Int& cached_k(std::vector<const Int*>& ks, int n) {
  while (static_cast<int>(ks.size()) < n - 3)
    ks.push_back(&k_value(static_cast<int>(ks.size()) + 4));
  return *ks[static_cast<std::size_t>(n - 4)];
}

}  // namespace

std::vector<ViolationRecord> prop51_check(int depth, ClaimVariant variant,
                                          int jobs) {
  if (depth < 3) throw std::invalid_argument("prop51_check: depth must be >= 3");
  const CoordinateScheme scheme = CoordinateScheme::dyadic(depth);
  const System sys = System::make(scheme, CeilingSpec::factorial(), nullptr);
  const long total = static_cast<long>(scheme.word_count().get_si());
  std::vector<std::vector<ViolationRecord>> chunks(
      static_cast<std::size_t>(max_chunks(jobs)));
  parallel_for_chunks(total, jobs, [&](int chunk, long cb, long ce) {
    auto& out = chunks[static_cast<std::size_t>(chunk)];
    std::vector<const Int*> ks;
    auto check = [&](const Prefix& x, long k, long n) {
      const int m = std::bit_width(static_cast<unsigned long>(n)) - 1;
      const int l = static_cast<int>(n - (1L << m));
      const int idx = variant == ClaimVariant::Corrected ? m : m + 1;
      if (idx > depth) return;  // claim addresses a coordinate beyond depth
      if (x.at(idx) != l)
        out.push_back({x, k, n, variant, idx, l, x.at(idx)});
    };
    for (long i = cb; i < ce; ++i) {
      const Prefix x = scheme.prefix_at(Int(i));
      // forward sums S_k
      {
        Prefix cur = x;
        Int sum(0);
        long n = 4, k = 0;
        for (;;) {
          const CeilRef cv = sys.ceiling_of(cur);
          if (!cv.value) break;
          sum += *cv.value;
          ++k;
          while (cached_k(ks, static_cast<int>(n + 1)) <= sum) ++n;
          check(x, k, n);
          if (!sys.step_forward(cur)) break;
        }
      }
      // backward sums B_k, recorded with k = -j
      {
        Prefix cur = x;
        Int sum(0);
        long n = 4, j = 0;
        for (;;) {
          if (!sys.step_backward(cur)) break;
          const CeilRef cv = sys.ceiling_of(cur);
          if (!cv.value) break;
          sum += *cv.value;
          ++j;
          while (cached_k(ks, static_cast<int>(n + 1)) <= sum) ++n;
          check(x, -j, n);
        }
      }
    }
  });
  std::vector<ViolationRecord> merged;
  for (auto& c : chunks)
    merged.insert(merged.end(), c.begin(), c.end());
  return merged;
}

std::vector<BoundRow> interval_bound_report(int depth, int n_from, int n_to,
                                            int jobs) {
  if (depth < 3) throw std::invalid_argument("interval_bound_report: depth >= 3");
  if (n_from < 4 || n_from > n_to)
    throw std::invalid_argument("interval_bound_report: need 4 <= n_from <= n_to");
  if (Int(n_to) + 1 > Int(1) << (depth + 1))
    throw RangeUndecidableError(
        "interval_bound_report: [K_n, K_{n+1}) undecidable at this depth for n = " +
        std::to_string(n_to));
  const CoordinateScheme scheme = CoordinateScheme::dyadic(depth);
  const CeilingSpec spec = CeilingSpec::factorial();
  std::vector<BoundRow> rows;
  for (int n = n_from; n <= n_to; ++n) {
    const Window w = Window::k_interval(n);
    const ReturnReport rep =
        return_window_set(scheme, spec, nullptr, w, Directions::Both, jobs);
    const int m = std::bit_width(static_cast<unsigned>(n)) - 1;
    BoundRow row{n,
                 m,
                 rep.forward.measure,
                 rep.backward.measure,
                 pow_rat(Rat(2), -m),
                 pow_rat(Rat(2), -(m + 1)),
                 false,
                 false};
    row.forward_ok_corrected = row.forward_measure <= row.corrected_bound;
    row.forward_ok_printed = row.forward_measure <= row.printed_bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ------------------------------------------------------------ decay table

std::vector<DecayRow> decay_table(const CoordinateScheme& scheme,
                                  const CeilingSpec& spec,
                                  const CylinderSet* base_set,
                                  const DecayFamily& family, int jobs) {
  struct Item {
    std::string label;
    Window window;
    std::optional<int> k_index;  // set for K-interval rows
  };
  std::vector<Item> items;
  if (const auto* kf = std::get_if<KIntervalFamily>(&family)) {
    if (kf->n_from < 4 || kf->n_from > kf->n_to)
      throw std::invalid_argument("decay_table: need 4 <= n_from <= n_to");
    for (int n = kf->n_from; n <= kf->n_to; ++n)
      items.push_back({"K" + std::to_string(n), Window::k_interval(n), n});
  } else {
    const auto& lf = std::get<LogScaleFamily>(family);
    for (const Rat& s : lf.s_values)
      items.push_back({"s=" + rat_str(s),
                       window_from_log_scale(s, lf.delta, true, lf.policy),
                       std::nullopt});
  }
  if (spec.kind() == CeilingKind::Factorial) {
    const Rat decidable(k_value(1 << (scheme.depth() + 1)));
    for (const Item& it : items)
      if (it.window.hi > decidable)
        throw RangeUndecidableError("decay_table: window " + it.window.str() +
                                    " not decidable at depth " +
                                    std::to_string(scheme.depth()));
  }
  const Rat dom_measure = ScanDomain{scheme, base_set}.measure();
  std::vector<DecayRow> rows;
  for (const Item& it : items) {
    const ReturnReport rep = return_window_set(scheme, spec, base_set, it.window,
                                               Directions::Both, jobs);
    if (rep.combined.undetermined_mass != 0)
      throw RangeUndecidableError("decay_table: window " + it.window.str() +
                                  " leaves undetermined mass at this depth");
    Rat envelope;
    if (spec.kind() == CeilingKind::Constant) {
      // No factorial gaps to exploit; the scanned set's own mass is the only
      // a-priori bound.
      envelope = dom_measure;
    } else if (it.k_index) {
      const int m = std::bit_width(static_cast<unsigned>(*it.k_index)) - 1;
      envelope = pow_rat(Rat(2), 1 - m);
    } else {
      // Sum the per-interval bounds over the factorial intervals the window
      // intersects (at most two once the window clears K_4).
      envelope = 0;
      for (int n = 4;; ++n) {
        const Rat kn(k_value(n)), kn1(k_value(n + 1));
        if (kn >= it.window.hi) break;
        if (kn1 > it.window.lo) {
          const int m = std::bit_width(static_cast<unsigned>(n)) - 1;
          envelope += pow_rat(Rat(2), 1 - m);
        }
      }
    }
    rows.push_back({it.label, it.window.lo, it.window.hi, rep.forward.measure,
                    rep.backward.measure, rep.combined.measure, envelope});
  }
  return rows;
}

// ------------------------------------------------------- cocycle windows

namespace {

bool log_in_window(const LogValue& v, const Window& w,
                   const PrecisionPolicy& policy) {
  const auto above = v.compare(w.lo, policy);
  const bool ok_lo = w.lo_open ? above == std::strong_ordering::greater
                               : above != std::strong_ordering::less;
  if (!ok_lo) return false;
  const auto below = v.compare(w.hi, policy);
  return w.hi_open ? below == std::strong_ordering::less
                   : below != std::strong_ordering::greater;
}

}  // namespace

PropAReport prop_a_window_set(const CoordinateScheme& scheme,
                              const CylinderSet* scanned_set,
                              const Window& window, const PrecisionPolicy& policy,
                              const std::optional<Rat>& eta, int jobs) {
  if (scanned_set && scanned_set->depth() != scheme.depth())
    throw DepthMismatchError("prop_a_window_set: set depth mismatch");
  if (window.lo < 0)
    throw std::invalid_argument("prop_a_window_set: window must sit in [0, inf)");
  const ScanDomain dom{scheme, scanned_set};
  PropAReport report(scheme.depth());
  report.window = window;
  report.base_measure = dom.measure();
  const bool zero_inside = window.contains(Rat(0));
  if (scheme.is_uniform() && !zero_inside) {
    // Every cocycle value is 0; a window excluding 0 catches nothing.
  } else {
    const long total = dom.count();
    std::vector<std::vector<Prefix>> chunks(
        static_cast<std::size_t>(max_chunks(jobs)));
    parallel_for_chunks(total, jobs, [&](int chunk, long cb, long ce) {
      auto& out = chunks[static_cast<std::size_t>(chunk)];
      for (long i = cb; i < ce; ++i) {
        const Prefix x = dom.at(i);
        for (long j = 0; j < total; ++j) {
          if (j == i) continue;
          const Prefix y = dom.at(j);
          const LogValue v = log_rn_value(scheme, y, x);
          bool in;
          try {
            in = log_in_window(v, window, policy) ||
                 (window.mirrored && log_in_window(-v, window, policy));
          } catch (const PrecisionExhaustedError& e) {
            throw PrecisionExhaustedError(std::string(e.what()) + " [pair " +
                                          prefix_str(x) + " vs " +
                                          prefix_str(y) + "]");
          }
          if (in) {
            out.push_back(x);
            break;
          }
        }
      }
    });
    std::vector<Prefix> members;
    for (auto& c : chunks) members.insert(members.end(), c.begin(), c.end());
    report.set = CylinderSet(scheme.depth(), std::move(members));
    report.measure = cylinder_measure(scheme, report.set);
  }
  report.eta = eta;
  if (eta) report.exceeds_eta = report.measure > *eta * report.base_measure;
  return report;
}

// ------------------------------------------------- consistency statistics

ConjugacyReport conjugacy_consistency(const CoordinateScheme& scheme,
                                      const CeilingSpec& spec,
                                      const Relabeling& relabeling,
                                      const CylinderSet* base_set,
                                      const Window& window, int jobs,
                                      const CeilingSpec* conjugated_override) {
  relabeling.require_compatible(scheme);
  if (!relabeling.is_measure_preserving(scheme))
    throw NotMeasurePreservingError(
        "conjugacy_consistency: relabeling does not preserve the measure");
  const ReturnReport original = return_window_set(scheme, spec, base_set, window,
                                                  Directions::Both, jobs);
  const System conj = System::make(
      scheme, conjugated_override ? *conjugated_override : spec, &relabeling);
  std::optional<CylinderSet> image;
  if (base_set) image = relabeling.image(*base_set);
  const ScanDomain conj_dom{scheme, image ? &*image : nullptr};
  const ReturnReport conjugated = assemble_return_report(
      scheme, conj, conj_dom, window, Directions::Both, jobs);
  ConjugacyReport report{original.forward.measure,
                         original.backward.measure,
                         original.combined.measure,
                         conjugated.forward.measure,
                         conjugated.backward.measure,
                         conjugated.combined.measure,
                         false};
  report.equal = report.original_forward == report.conjugated_forward &&
                 report.original_backward == report.conjugated_backward &&
                 report.original_union == report.conjugated_union;
  return report;
}

WeightingReport weighting_consistency(const CoordinateScheme& scheme,
                                      const CeilingSpec& spec,
                                      const Weighting& weighting,
                                      const CylinderSet* base_set,
                                      const Window& window, int jobs) {
  const ReturnReport rep = return_window_set(scheme, spec, base_set, window,
                                             Directions::Both, jobs);
  WeightingReport out;
  out.base_measure = rep.combined.measure;
  out.weighted_measure = cylinder_measure(scheme, rep.combined.members, weighting);
  if (base_set) {
    // Largest density among cylinders meeting the scanned set.
    bool any = false;
    for (const Prefix& p : base_set->members()) {
      const Rat& d = weighting.density_for(p);
      if (!any || d > out.max_density) {
        out.max_density = d;
        any = true;
      }
    }
    if (!any) out.max_density = weighting.max_density();
  } else {
    out.max_density = weighting.max_density();
  }
  out.dominated = out.weighted_measure <= out.max_density * out.base_measure;
  return out;
}

}  // namespace odoflow
