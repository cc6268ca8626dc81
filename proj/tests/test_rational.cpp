#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "odoflow/rational.hpp"

using namespace odoflow;

TEST_CASE("make_rat canonicalizes") {
  CHECK(make_rat(2, 4) == make_rat(1, 2));
  CHECK(make_rat(-3, -6) == make_rat(1, 2));
  CHECK(make_rat(3, -6) == make_rat(-1, 2));
  CHECK(rat_str(make_rat(2, 4)) == "1/2");
  CHECK_THROWS_AS(make_rat(1, 0), std::invalid_argument);
}

TEST_CASE("parse_rat accepts integers and fractions") {
  CHECK(parse_rat("5") == Rat(5));
  CHECK(parse_rat("-7") == Rat(-7));
  CHECK(parse_rat("3/4") == make_rat(3, 4));
  CHECK(parse_rat("-7/2") == make_rat(-7, 2));
  CHECK(parse_rat("6/4") == make_rat(3, 2));
  CHECK_THROWS_AS(parse_rat(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("1/"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
}

TEST_CASE("rat_str always shows a denominator and round-trips") {
  CHECK(rat_str(Rat(5)) == "5/1");
  CHECK(rat_str(make_rat(-2, 7)) == "-2/7");
  for (const char* text : {"0/1", "5/1", "-2/7", "355/113"})
    CHECK(rat_str(parse_rat(text)) == text);
  CHECK(int_str(Int(12345)) == "12345");
  CHECK(int_str(Int(-3)) == "-3");
}

TEST_CASE("pow helpers") {
  CHECK(pow_int(Int(2), 10) == 1024);
  CHECK(pow_int(Int(7), 0) == 1);
  CHECK(pow_rat(Rat(2), -3) == make_rat(1, 8));
  CHECK(pow_rat(make_rat(3, 2), 2) == make_rat(9, 4));
  CHECK(pow_rat(Rat(0), 3) == 0);
  CHECK_THROWS_AS(pow_rat(Rat(0), -1), std::invalid_argument);
}

TEST_CASE("floor and ceil on signed rationals") {
  CHECK(floor_rat(make_rat(7, 2)) == 3);
  CHECK(ceil_rat(make_rat(7, 2)) == 4);
  CHECK(floor_rat(make_rat(-3, 2)) == -2);
  CHECK(ceil_rat(make_rat(-3, 2)) == -1);
  CHECK(floor_rat(Rat(6)) == 6);
  CHECK(ceil_rat(Rat(6)) == 6);
}

TEST_CASE("error hierarchy keeps contract errors distinct from precision") {
  CHECK_THROWS_AS(throw DepthMismatchError("x"), std::invalid_argument);
  CHECK_THROWS_AS(throw RangeUndecidableError("x"), std::invalid_argument);
  CHECK_THROWS_AS(throw PrecisionExhaustedError("x"), std::runtime_error);
}
