#pragma once

// Exact return-window statistics over truncated odometer systems:
//  - base return sets (which words come back to a set at a time inside a
//    window, forward and backward),
//  - rectangle (flow-box) window measures on the suspension,
//  - the exhaustive coordinate-claim checker with its printed and corrected
//    variants,
//  - per-interval bound rows and decay tables with analytic envelopes,
//  - the cocycle-window statistic on (possibly non-uniform) product schemes,
//  - conjugation and reweighting consistency checks.
//
// Every scan is decidable-or-quarantined: a word's membership is either
// decided exactly or its mass is reported as undetermined, never guessed.
// All scans are deterministic and parallelize over words with bit-identical
// merged results.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "odoflow/ceiling.hpp"
#include "odoflow/logvalue.hpp"
#include "odoflow/space.hpp"
#include "odoflow/window.hpp"

namespace odoflow {

enum class Directions { Forward, Backward, Both };

struct DirectionalResult {
  CylinderSet members;
  Rat measure{0};
  Rat undetermined_mass{0};
  // Mass of the word with no orbit data in this direction (the all-full word
  // forward, the all-zero word backward), when it lies in the scanned set.
  Rat boundary_mass{0};

  explicit DirectionalResult(int depth) : members(depth) {}
};

struct ReturnReport {
  Window window;
  DirectionalResult forward;
  DirectionalResult backward;
  DirectionalResult combined;  // union over the scanned directions
  Rat base_measure{0};         // measure of the scanned set

  explicit ReturnReport(int depth)
      : forward(depth), backward(depth), combined(depth) {}
};

// x is a member iff x and some orbit endpoint T^k x (forward) or T^-k x
// (backward) both lie in the base set while the connecting Birkhoff sum lies
// in the window. base_set == nullptr means the full space. Undetermined
// continuations certified above the window top decide non-membership; the
// rest of the undetermined cases are quarantined by mass.
ReturnReport return_window_set(const CoordinateScheme& scheme,
                               const CeilingSpec& spec,
                               const CylinderSet* base_set, const Window& window,
                               Directions directions, int jobs = 1);

// Disjoint sorted closed rational intervals; endpoints of zero-length pieces
// are dropped (they carry no measure).
class IntervalUnion {
 public:
  void add(const Rat& lo, const Rat& hi);  // clips nothing, merges overlaps
  const std::vector<std::pair<Rat, Rat>>& pieces() const { return pieces_; }
  Rat total_length() const;
  bool covers(const IntervalUnion& other) const;
  bool operator==(const IntervalUnion&) const = default;

 private:
  std::vector<std::pair<Rat, Rat>> pieces_;
};

struct FiberSlice {
  Prefix base;
  IntervalUnion covered;  // heights u in [a,b] with a window-time return
  bool undetermined = false;  // scan aborted; uncovered heights are unknown
};

struct RectangleReport {
  Rat band_lo, band_hi;
  Window window;
  Rat measure{0};            // exact product-measure of the covered region
  Rat undetermined_mass{0};  // mass of unknown fiber portions
  std::vector<FiberSlice> fibers;  // one per scanned word, sorted
};

// Measure of {(x,u) in A0 x [a,b] : some flow time inside the window (its
// mirrored branch supplying the negative times) carries (x,u) back into
// A0 x [a,b]}. Fiber-by-fiber exact interval arithmetic, including the
// within-fiber k = 0 translations. Requires b certifiably within every
// scanned fiber (BandExceedsCeilingError otherwise).
RectangleReport rectangle_flow_window_measure(const CoordinateScheme& scheme,
                                              const CeilingSpec& spec,
                                              const CylinderSet* base_set,
                                              const Rat& band_lo,
                                              const Rat& band_hi,
                                              const Window& window,
                                              int jobs = 1);

enum class ClaimVariant { Printed, Corrected };

struct ViolationRecord {
  Prefix prefix;
  long k;  // forward step count, or -j for the j-th backward sum
  long n;  // the sum lies in [K_n, K_{n+1})
  ClaimVariant variant;
  int expected_index;  // coordinate the claim addresses (1-based)
  int expected_value;  // l = n - 2^floor(log2 n)
  int observed_value;

  bool operator==(const ViolationRecord&) const = default;
};

// Exhaustive scan of every word of the depth-M dyadic system under the
// factorial ceiling: every determined forward and backward sum is bracketed
// as K_n <= sum < K_{n+1} and the variant's coordinate claim is tested
// against the starting word. Corrected claims address coordinate
// floor(log2 n); printed claims address coordinate floor(log2 n) + 1 and are
// skipped when that coordinate lies beyond the depth (undecidable, not
// assumed). Returns the failures in deterministic word-then-step order.
std::vector<ViolationRecord> prop51_check(int depth, ClaimVariant variant,
                                          int jobs = 1);

struct BoundRow {
  long n;
  int m;  // floor(log2 n)
  Rat forward_measure;
  Rat backward_measure;
  Rat corrected_bound;  // 2^-m
  Rat printed_bound;    // 2^-(m+1)
  bool forward_ok_corrected;
  bool forward_ok_printed;
};

// For each n in [n_from, n_to]: exact forward and backward measures of
// {x : some determined sum lies in [K_n, K_{n+1})} over the full space,
// with both bound comparisons. Requires every interval decidable at depth
// (n_to + 1 <= 2^(depth+1)), else RangeUndecidableError.
std::vector<BoundRow> interval_bound_report(int depth, int n_from, int n_to,
                                            int jobs = 1);

struct KIntervalFamily {
  int n_from, n_to;
};
struct LogScaleFamily {
  std::vector<Rat> s_values;
  Rat delta;
  PrecisionPolicy policy;
};
using DecayFamily = std::variant<KIntervalFamily, LogScaleFamily>;

struct DecayRow {
  std::string label;
  Rat lo, hi;
  Rat forward_measure;
  Rat backward_measure;
  Rat union_measure;
  Rat envelope;
};

// One both-directions return scan per family member. Envelopes: K-interval
// rows get 2^(1 - floor(log2 n)) (the per-direction coordinate-cylinder
// bound, doubled); log-scale rows get the sum of those bounds over the
// factorial intervals the window intersects (at most two once the window
// clears K_4, since consecutive K-ratios exceed the window's endpoint
// ratio); constant-ceiling rows get the scanned set's measure, the only
// a-priori bound available without factorial gaps.
std::vector<DecayRow> decay_table(const CoordinateScheme& scheme,
                                  const CeilingSpec& spec,
                                  const CylinderSet* base_set,
                                  const DecayFamily& family, int jobs = 1);

struct PropAReport {
  Window window;
  CylinderSet set;  // members of the scanned set with a witness
  Rat measure{0};
  Rat base_measure{0};
  std::optional<Rat> eta;
  std::optional<bool> exceeds_eta;  // measure > eta * base_measure

  explicit PropAReport(int depth) : set(depth) {}
};

// x is a member iff some witness y in the scanned set has log cocycle value
// log_rn_value(y, x) inside the window (mirrored branch tests the negated
// value). Comparisons are certified; a precision-cap hit surfaces as
// PrecisionExhaustedError naming the offending pair.
PropAReport prop_a_window_set(const CoordinateScheme& scheme,
                              const CylinderSet* scanned_set,
                              const Window& window,
                              const PrecisionPolicy& policy = {},
                              const std::optional<Rat>& eta = std::nullopt,
                              int jobs = 1);

struct ConjugacyReport {
  Rat original_forward, original_backward, original_union;
  Rat conjugated_forward, conjugated_backward, conjugated_union;
  bool equal = false;  // all three pairs agree exactly
};

// Runs the return scan for the original system on base_set and for the
// conjugated system (step = relabel after T after relabel^-1, ceiling
// evaluated on the unrelabeled word) on the relabeled set; expected exact
// equality for measure-preserving relabelings. conjugated_override replaces
// the conjugated side's ceiling (a deliberate-mismatch control). Throws
// NotMeasurePreservingError when the relabeling moves the measure.
ConjugacyReport conjugacy_consistency(const CoordinateScheme& scheme,
                                      const CeilingSpec& spec,
                                      const Relabeling& relabeling,
                                      const CylinderSet* base_set,
                                      const Window& window, int jobs = 1,
                                      const CeilingSpec* conjugated_override = nullptr);

struct WeightingReport {
  Rat base_measure;      // plain measure of the union member set
  Rat weighted_measure;  // reweighted measure of the same set
  Rat max_density;       // largest density on cylinders meeting the scanned set
  bool dominated = false;  // weighted <= max_density * base
};

// Reweighting counterpart of the conjugacy check: the union member set's
// weighted measure must be dominated by (max density on the scanned set)
// times its plain measure.
WeightingReport weighting_consistency(const CoordinateScheme& scheme,
                                      const CeilingSpec& spec,
                                      const Weighting& weighting,
                                      const CylinderSet* base_set,
                                      const Window& window, int jobs = 1);

}  // namespace odoflow
