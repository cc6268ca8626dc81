#pragma once

// Ceiling functions over the base space, Birkhoff sums along odometer orbits,
// and exact evaluation of the suspension flow.
//
// The factorial ceiling is f(x) = K_q with q = 2^(N+1) + x_{N+1}, where
// N = N(x) is the first open coordinate and K_n = 1!2!...n! (n >= 4). At
// truncation depth M the value is determined only when N <= M-1; otherwise
// the needed coordinate lies beyond the depth and the evaluation returns a
// certified lower bound instead (K_{2^(M+1)}, valid since the unknown
// coordinate is >= 0). The constant ceiling c is always determined.

#include <optional>
#include <variant>
#include <vector>

#include "odoflow/rational.hpp"
#include "odoflow/space.hpp"

namespace odoflow {

// K_n = 1!2!...n! for n >= 4; memoized, thread-safe, references stay valid.
// Throws std::domain_error for n < 4.
const Int& k_value(int n);

enum class CeilingKind { Factorial, Constant };

class CeilingSpec {
 public:
  static CeilingSpec factorial() { return CeilingSpec(CeilingKind::Factorial, 0); }
  static CeilingSpec constant(const Int& c);

  CeilingKind kind() const { return kind_; }
  const Int& constant_value() const { return c_; }

  bool operator==(const CeilingSpec&) const = default;

 private:
  CeilingSpec(CeilingKind kind, Int c) : kind_(kind), c_(std::move(c)) {}
  CeilingKind kind_;
  Int c_;
};

// determined: value = f(prefix). Otherwise value is a certified lower bound
// for the true ceiling (truncation hid the coordinate that decides it).
struct CeilingValue {
  bool determined;
  Int value;
};

// Factorial ceilings require the dyadic scheme (coordinate sizes 2^n).
CeilingValue ceiling_value(const CeilingSpec& spec, const CoordinateScheme& scheme,
                           const Prefix& prefix);

enum class OrbitDirection { Forward, Backward };

enum class StopReason {
  HorizonExhausted,  // a caller-supplied bound certified all later sums irrelevant
  Overflow,          // forward orbit fell off the all-full word (constant ceiling)
  Underflow,         // backward orbit has no predecessor at the all-zero word
  NeedsDepth,        // next increment depends on a coordinate beyond depth
  LimitReached,      // max_steps sums were produced
};

struct SumTrace {
  OrbitDirection direction;
  std::vector<Int> sums;  // strictly increasing; forward S_k or backward B_k
  StopReason stop_reason;
};

// Forward: S_k = f(x) + f(Tx) + ... + f(T^(k-1)x). Backward:
// B_k = f(T^-1 x) + ... + f(T^-k x). Stops at the first of: max_steps sums
// emitted (LimitReached), an undetermined increment (NeedsDepth), the orbit
// boundary (Overflow/Underflow), or, when stop_above is given, a sum >=
// *stop_above, after which every later sum is irrelevant (HorizonExhausted).
SumTrace birkhoff_sums(const CeilingSpec& spec, const CoordinateScheme& scheme,
                       const Prefix& start, OrbitDirection direction,
                       long max_steps, const Int* stop_above = nullptr);

struct FlowPoint {
  Prefix base;
  Rat height;  // 0 <= height < ceiling(base)

  bool operator==(const FlowPoint&) const = default;
};

// Partial evaluation: the flow from `reached` still owes `remaining` time,
// but the next step needs an undetermined ceiling or a word beyond depth.
struct FlowStop {
  FlowPoint reached;
  Rat remaining;

  bool operator==(const FlowStop&) const = default;
};

using FlowOutcome = std::variant<FlowPoint, FlowStop>;

// Throws std::invalid_argument unless 0 <= height and the height is
// certifiably below the ceiling of the base word.
void require_flow_point(const CeilingSpec& spec, const CoordinateScheme& scheme,
                        const FlowPoint& point);

// Exact F_t. Within the decidable horizon the group law
// flow_apply(flow_apply(p, t), t') == flow_apply(p, t + t') holds exactly.
FlowOutcome flow_apply(const CeilingSpec& spec, const CoordinateScheme& scheme,
                       const FlowPoint& point, const Rat& t);

// Number of forward odometer steps available before the all-full word:
// (word count - 1) - mixed-radix index.
Int forward_horizon(const CoordinateScheme& scheme, const Prefix& prefix);

}  // namespace odoflow
