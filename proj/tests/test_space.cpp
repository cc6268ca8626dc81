#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "odoflow/space.hpp"

using namespace odoflow;

namespace {

Prefix P(std::vector<int> v) { return Prefix(std::move(v)); }

}  // namespace

TEST_CASE("dyadic scheme shape") {
  const auto s = CoordinateScheme::dyadic(3);
  CHECK(s.depth() == 3);
  CHECK(s.size(1) == 2);
  CHECK(s.size(2) == 4);
  CHECK(s.size(3) == 8);
  CHECK(s.zmax(3) == 7);
  CHECK(s.prob(1, 0) == make_rat(1, 2));
  CHECK(s.prob(2, 3) == make_rat(1, 4));
  CHECK(s.prob(3, 5) == make_rat(1, 8));
  CHECK(s.word_count() == 64);
  CHECK(s.is_dyadic());
  CHECK(s.is_uniform());
}

TEST_CASE("bernoulli scheme shape") {
  const auto s = CoordinateScheme::bernoulli(4, make_rat(1, 3));
  CHECK(s.depth() == 4);
  for (int n = 1; n <= 4; ++n) {
    CHECK(s.size(n) == 2);
    CHECK(s.prob(n, 0) == make_rat(1, 3));
    CHECK(s.prob(n, 1) == make_rat(2, 3));
  }
  CHECK(s.word_count() == 16);
  CHECK_FALSE(s.is_dyadic());
  CHECK_FALSE(s.is_uniform());
  CHECK(s.prefix_measure(P({1, 0, 1, 1})) == make_rat(8, 81));
  CHECK_THROWS_AS(CoordinateScheme::bernoulli(3, Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(CoordinateScheme::bernoulli(3, Rat(0)), std::invalid_argument);
}

TEST_CASE("scheme validation") {
  CHECK_THROWS_AS(CoordinateScheme({1}, {{Rat(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(
      CoordinateScheme({2}, {{make_rat(1, 2), make_rat(1, 3)}}),
      std::invalid_argument);  // probabilities must sum to 1
  const auto s = CoordinateScheme::dyadic(3);
  CHECK(s.valid_prefix(P({1, 3, 7})));
  CHECK_FALSE(s.valid_prefix(P({1, 4, 0})));
  CHECK_FALSE(s.valid_prefix(P({0, 0})));
  CHECK_THROWS_AS(s.require_prefix(P({0, 0})), DepthMismatchError);
  CHECK_THROWS_AS(s.require_prefix(P({0, 0, 9})), ArityMismatchError);
}

TEST_CASE("odometer steps match the carry rule") {
  const auto s = CoordinateScheme::dyadic(3);
  CHECK(successor(s, P({0, 0, 0})) == P({1, 0, 0}));
  CHECK(successor(s, P({1, 3, 5})) == P({0, 0, 6}));
  CHECK(successor(s, P({1, 3, 7})) == std::nullopt);
  CHECK(predecessor(s, P({1, 0, 0})) == P({0, 0, 0}));
  CHECK(predecessor(s, P({0, 0, 6})) == P({1, 3, 5}));
  CHECK(predecessor(s, P({0, 0, 0})) == std::nullopt);
  CHECK(first_open_index(s, P({0, 3, 7})) == 1);
  CHECK(first_open_index(s, P({1, 3, 5})) == 3);
  CHECK(first_open_index(s, P({1, 3, 7})) == std::nullopt);
}

TEST_CASE("mixed-radix enumeration agrees with successor") {
  const auto s = CoordinateScheme::dyadic(3);
  Prefix cur = s.all_zero();
  for (long i = 0;; ++i) {
    CHECK(s.index_of(cur) == i);
    CHECK(s.prefix_at(Int(i)) == cur);
    const auto next = successor(s, cur);
    if (!next) {
      CHECK(i == 63);
      CHECK(cur == s.all_full());
      break;
    }
    cur = *next;
  }
}

TEST_CASE("successor and predecessor invert each other off the boundary") {
  const auto s = CoordinateScheme::bernoulli(5, make_rat(2, 5));
  Prefix cur = s.all_zero();
  while (auto next = successor(s, cur)) {
    CHECK(predecessor(s, *next) == cur);
    cur = *next;
  }
}

TEST_CASE("cylinder sets normalize, query and combine") {
  const auto s = CoordinateScheme::dyadic(3);
  CylinderSet a(3, {P({1, 0, 0}), P({0, 0, 0}), P({1, 0, 0})});
  CHECK(a.count() == 2);
  CHECK(a.members().front() == P({0, 0, 0}));
  CHECK(a.contains(P({1, 0, 0})));
  CHECK_FALSE(a.contains(P({0, 1, 0})));
  a.insert(P({0, 1, 0}));
  a.insert(P({0, 1, 0}));
  CHECK(a.count() == 3);

  const auto x1 = CylinderSet::coordinate_value(s, 1, 0);
  CHECK(x1.count() == 32);
  CHECK(cylinder_measure(s, x1) == make_rat(1, 2));
  const auto x2 = CylinderSet::coordinate_value(s, 2, 0);
  CHECK(cylinder_measure(s, x2) == make_rat(1, 4));
  const auto inter = x1.set_intersection(x2);
  CHECK(cylinder_measure(s, inter) == make_rat(1, 8));
  const auto uni = x1.set_union(x2);
  CHECK(cylinder_measure(s, uni) == make_rat(5, 8));
  const auto comp = uni.complement(s);
  CHECK(cylinder_measure(s, comp) == make_rat(3, 8));
  CHECK(uni.set_intersection(comp).count() == 0);
  CHECK(uni.set_union(comp) == CylinderSet::full_space(s));
  CHECK(cylinder_measure(s, CylinderSet::full_space(s)) == 1);
  CHECK_THROWS_AS(CylinderSet(3, {P({0, 0})}), DepthMismatchError);
}

TEST_CASE("odometer preserves the uniform measure") {
  const auto s = CoordinateScheme::dyadic(3);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    CylinderSet set(3);
    for (int i = 0; i < 12; ++i)
      set.insert(s.prefix_at(Int(static_cast<long>(rng() % 64))));
    CylinderSet image(3);
    Rat original(0);
    for (const Prefix& p : set.members()) {
      const auto next = successor(s, p);
      if (!next) continue;  // the all-full word has no image at this depth
      image.insert(*next);
      original += s.prefix_measure(p);
    }
    CHECK(cylinder_measure(s, image) == original);
  }
}

TEST_CASE("weighting densities apply on truncations") {
  const auto s = CoordinateScheme::dyadic(3);
  const Weighting w(1, {{{0}, make_rat(3, 2)}, {{1}, make_rat(1, 2)}});
  CHECK(w.density_for(P({0, 2, 5})) == make_rat(3, 2));
  CHECK(w.density_for(P({1, 0, 0})) == make_rat(1, 2));
  CHECK(w.max_density() == make_rat(3, 2));
  CHECK_THROWS_AS(w.density_for(Prefix(std::vector<int>{})), DepthMismatchError);
  CHECK_THROWS_AS(Weighting(1, {{{0}, Rat(0)}}), std::invalid_argument);

  const auto full = CylinderSet::full_space(s);
  CHECK(cylinder_measure(s, full, w) == 1);  // densities average to 1 here
  const auto x1 = CylinderSet::coordinate_value(s, 1, 0);
  CHECK(cylinder_measure(s, x1, w) == make_rat(3, 4));
  CHECK_THROWS_AS(Weighting(2, {}), std::invalid_argument);
  // covers only the 0-0 truncation; measuring {x1=0} needs 0-1..0-3 too
  const Weighting partial(2, {{{0, 0}, Rat(2)}});
  CHECK_THROWS_AS(cylinder_measure(s, x1, partial), std::invalid_argument);
}

TEST_CASE("relabelings act coordinatewise") {
  const auto s = CoordinateScheme::dyadic(3);
  const Relabeling swap1({{1, 0}, {0, 1, 2, 3}, {0, 1, 2, 3, 4, 5, 6, 7}});
  CHECK(swap1.apply(P({0, 2, 5})) == P({1, 2, 5}));
  CHECK(swap1.is_measure_preserving(s));
  CHECK(swap1.inverse().apply(swap1.apply(P({1, 3, 0}))) == P({1, 3, 0}));
  const auto x1 = CylinderSet::coordinate_value(s, 1, 0);
  const auto img = swap1.image(x1);
  CHECK(img == CylinderSet::coordinate_value(s, 1, 1));
  CHECK(cylinder_measure(s, img) == cylinder_measure(s, x1));
  CHECK(Relabeling::identity(s).apply(P({1, 2, 3})) == P({1, 2, 3}));

  const auto bern = CoordinateScheme::bernoulli(3, make_rat(1, 3));
  const Relabeling bswap({{1, 0}, {0, 1}, {0, 1}});
  CHECK_FALSE(bswap.is_measure_preserving(bern));
  CHECK_THROWS_AS(swap1.require_compatible(bern), ArityMismatchError);
  CHECK_THROWS_AS(Relabeling({{0, 0}}).require_compatible(
                      CoordinateScheme::bernoulli(1, make_rat(1, 3))),
                  std::invalid_argument);
}

TEST_CASE("json round trips") {
  const auto s = CoordinateScheme::bernoulli(3, make_rat(1, 3));
  const auto text = scheme_to_json(s);
  CHECK(scheme_from_json(text) == s);

  CylinderSet set(3, {P({0, 1, 0}), P({1, 0, 1})});
  CHECK(set_from_json(set_to_json(set)) == set);
  CHECK_THROWS(set_from_json("{\"depth\": 3}"));

  const Weighting w(2, {{{0, 0}, make_rat(5, 4)}, {{1, 2}, make_rat(1, 3)}});
  const Weighting back = weighting_from_json(weighting_to_json(w));
  CHECK(back.base_depth() == 2);
  CHECK(back.density() == w.density());

  CHECK(prefix_str(P({0, 0, 1})) == "0-0-1");
  CHECK(prefix_from_str("0-0-1") == P({0, 0, 1}));
  CHECK(prefix_from_str(prefix_str(P({10, 2}))) == P({10, 2}));
}
