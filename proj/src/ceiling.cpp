#include "odoflow/ceiling.hpp"

#include <deque>
#include <mutex>

namespace odoflow {

namespace {

// Append-only K_n table: slot i holds K_{i+4}. std::deque keeps element
// references stable while the table grows, so callers may hold on to them.
std::deque<Int>& k_table() {
  static std::deque<Int> table;
  return table;
}
std::mutex k_mutex;

}  // namespace

const Int& k_value(int n) {
  if (n < 4) throw std::domain_error("k_value: defined for n >= 4 only");
  std::lock_guard<std::mutex> lock(k_mutex);
  auto& table = k_table();
  if (table.empty()) table.push_back(Int(1 * 2 * 6 * 24));  // K_4 = 1!2!3!4!
  while (static_cast<int>(table.size()) <= n - 4) {
    const int next = static_cast<int>(table.size()) + 4;  // index of K_next
    Int fact(1);
    for (int i = 2; i <= next; ++i) fact *= i;
    table.push_back(table.back() * fact);
  }
  return table[static_cast<std::size_t>(n - 4)];
}

CeilingSpec CeilingSpec::constant(const Int& c) {
  if (c < 1)
    throw std::invalid_argument("CeilingSpec: constant ceiling must be >= 1");
  return CeilingSpec(CeilingKind::Constant, c);
}

CeilingValue ceiling_value(const CeilingSpec& spec, const CoordinateScheme& scheme,
                           const Prefix& prefix) {
  scheme.require_prefix(prefix);
  if (spec.kind() == CeilingKind::Constant)
    return {true, spec.constant_value()};
  if (!scheme.is_dyadic())
    throw std::invalid_argument("ceiling_value: factorial ceiling needs the dyadic scheme");
  const int M = scheme.depth();
  const auto open = first_open_index(scheme, prefix);
  if (open && *open <= M - 1)
    return {true, k_value((1 << (*open + 1)) + prefix.at(*open + 1))};
  // First open coordinate at depth (needs x_{M+1}) or the all-full word:
  // the true index 2^(N+1) + x_{N+1} is at least 2^(M+1) either way.
  return {false, k_value(1 << (M + 1))};
}

SumTrace birkhoff_sums(const CeilingSpec& spec, const CoordinateScheme& scheme,
                       const Prefix& start, OrbitDirection direction,
                       long max_steps, const Int* stop_above) {
  scheme.require_prefix(start);
  if (max_steps < 1)
    throw std::invalid_argument("birkhoff_sums: max_steps must be >= 1");
  SumTrace trace{direction, {}, StopReason::LimitReached};
  Prefix cur = start;
  Int sum(0);
  for (;;) {
    if (static_cast<long>(trace.sums.size()) >= max_steps) {
      trace.stop_reason = StopReason::LimitReached;
      break;
    }
    if (direction == OrbitDirection::Backward) {
      auto prev = predecessor(scheme, cur);
      if (!prev) {
        trace.stop_reason = StopReason::Underflow;
        break;
      }
      cur = *prev;
    }
    const CeilingValue cv = ceiling_value(spec, scheme, cur);
    if (!cv.determined) {
      trace.stop_reason = StopReason::NeedsDepth;
      break;
    }
    sum += cv.value;
    trace.sums.push_back(sum);
    if (stop_above && sum >= *stop_above) {
      trace.stop_reason = StopReason::HorizonExhausted;
      break;
    }
    if (direction == OrbitDirection::Forward) {
      auto next = successor(scheme, cur);
      if (!next) {
        trace.stop_reason = StopReason::Overflow;
        break;
      }
      cur = *next;
    }
  }
  return trace;
}

void require_flow_point(const CeilingSpec& spec, const CoordinateScheme& scheme,
                        const FlowPoint& point) {
  scheme.require_prefix(point.base);
  if (point.height < 0)
    throw std::invalid_argument("FlowPoint: height must be >= 0");
  const CeilingValue cv = ceiling_value(spec, scheme, point.base);
  // For an undetermined ceiling the lower bound still certifies validity.
  if (point.height >= Rat(cv.value))
    throw std::invalid_argument(
        cv.determined ? "FlowPoint: height not below the ceiling"
                      : "FlowPoint: height not certifiably below the ceiling");
}

FlowOutcome flow_apply(const CeilingSpec& spec, const CoordinateScheme& scheme,
                       const FlowPoint& point, const Rat& t) {
  require_flow_point(spec, scheme, point);
  Prefix base = point.base;
  Rat h = point.height;
  Rat left = t;
  for (;;) {
    const Rat target = h + left;
    if (left <= 0 && target >= 0) return FlowPoint{base, target};
    if (left > 0) {
      const CeilingValue cv = ceiling_value(spec, scheme, base);
      if (target < Rat(cv.value)) {
        // Below a determined ceiling, or below the certified lower bound of
        // an undetermined one; either way the fiber contains the target.
        return FlowPoint{base, target};
      }
      if (!cv.determined) return FlowStop{{base, h}, left};
      auto next = successor(scheme, base);
      if (!next) return FlowStop{{base, h}, left};
      left -= Rat(cv.value) - h;
      h = 0;
      base = *next;
    } else {
      // target < 0: cross down into the predecessor fiber, entering at its top.
      auto prev = predecessor(scheme, base);
      if (!prev) return FlowStop{{base, h}, left};
      const CeilingValue cv = ceiling_value(spec, scheme, *prev);
      if (!cv.determined) return FlowStop{{base, h}, left};
      left += h;
      base = *prev;
      h = Rat(cv.value);
    }
  }
}

Int forward_horizon(const CoordinateScheme& scheme, const Prefix& prefix) {
  return scheme.word_count() - 1 - scheme.index_of(prefix);
}

}  // namespace odoflow
