#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "odoflow/logvalue.hpp"

using namespace odoflow;

TEST_CASE("formal combinations reduce to the canonical product") {
  const auto two = LogValue::of_ratio(Rat(2));
  const auto half = LogValue::of_ratio(make_rat(1, 2));
  CHECK(two.sign() == 1);
  CHECK(half.sign() == -1);
  CHECK((two + half).is_zero());
  CHECK(two == -half);
  CHECK((-two).ratio_product() == make_rat(1, 2));

  LogValue v;
  CHECK(v.is_zero());
  CHECK(v.sign() == 0);
  v.add_term(make_rat(3, 2), 2);
  v.add_term(make_rat(2, 3), 2);
  CHECK(v.is_zero());  // (3/2)^2 (2/3)^2 = 1 as a formal sum after cancelling
  v.add_term(Rat(6), -1);
  CHECK(v.ratio_product() == make_rat(1, 6));
  CHECK_THROWS_AS(v.add_term(Rat(0)), std::invalid_argument);
  CHECK_THROWS_AS(v.add_term(Rat(-2)), std::invalid_argument);
}

TEST_CASE("certified comparison against rational bounds") {
  const auto two = LogValue::of_ratio(Rat(2));  // log 2 = 0.693147...
  CHECK(two.compare(make_rat(7, 10)) == std::strong_ordering::less);
  CHECK(two.compare(make_rat(69, 100)) == std::strong_ordering::greater);
  CHECK(two.compare(Rat(0)) == std::strong_ordering::greater);
  CHECK(two.compare(Rat(1)) == std::strong_ordering::less);
  CHECK(LogValue().compare(Rat(0)) == std::strong_ordering::equal);
  CHECK(LogValue().compare(make_rat(-1, 1000)) == std::strong_ordering::greater);
  const auto tenth = LogValue::of_ratio(make_rat(1, 10));
  CHECK(tenth.compare(Rat(-3)) == std::strong_ordering::greater);
  CHECK(tenth.compare(Rat(-2)) == std::strong_ordering::less);
}

TEST_CASE("comparison escalates precision and reports exhaustion") {
  const auto two = LogValue::of_ratio(Rat(2));
  // 60 digits of log 2; far beyond what a few bits can separate.
  const Rat tight = parse_rat(
      "693147180559945309417232121458176568075500134360255254120680/"
      "1000000000000000000000000000000000000000000000000000000000000");
  CHECK(two.compare(tight) == std::strong_ordering::greater);  // default cap
  CHECK_THROWS_AS(two.compare(tight, PrecisionPolicy{8, 16}),
                  PrecisionExhaustedError);
  try {
    two.compare(tight, PrecisionPolicy{8, 16});
  } catch (const PrecisionExhaustedError& e) {
    CHECK(std::string(e.what()).find("16") != std::string::npos);
  }
}

TEST_CASE("cocycle values on schemes") {
  const auto uniform = CoordinateScheme::dyadic(3);
  const Prefix a({0, 1, 2}), b({1, 3, 0});
  CHECK(log_rn_value(uniform, a, b).is_zero());

  const auto bern = CoordinateScheme::bernoulli(4, make_rat(1, 3));
  const Prefix x({0, 0, 0, 0}), y({1, 0, 0, 0});
  // one extra symbol 1: ratio p(1)/p(0) = 2
  CHECK(log_rn_value(bern, x, y).ratio_product() == Rat(2));
  CHECK(log_rn_value(bern, y, x).ratio_product() == make_rat(1, 2));
}

TEST_CASE("chain rule and antisymmetry hold on random triples") {
  const auto bern = CoordinateScheme::bernoulli(6, make_rat(1, 3));
  std::mt19937_64 rng(11);
  auto word = [&] {
    std::vector<int> sym(6);
    for (auto& v : sym) v = static_cast<int>(rng() % 2);
    return Prefix(sym);
  };
  for (int i = 0; i < 200; ++i) {
    const Prefix x = word(), y = word(), z = word();
    CHECK(log_rn_value(bern, x, y) + log_rn_value(bern, y, z) ==
          log_rn_value(bern, x, z));
    CHECK(log_rn_value(bern, x, y) == -log_rn_value(bern, y, x));
  }
}

TEST_CASE("depth mismatch is rejected") {
  const auto bern = CoordinateScheme::bernoulli(3, make_rat(1, 3));
  CHECK_THROWS_AS(log_rn_value(bern, Prefix({0, 0}), Prefix({0, 0, 0})),
                  DepthMismatchError);
}
