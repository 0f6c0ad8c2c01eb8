#include "doctest.h"
#include "tempora/time.hpp"

using tempora::Time;
using tempora::TimeWindow;

TEST_CASE("parse and render integers and decimals") {
  CHECK(Time::parse("12").to_string() == "12");
  CHECK(Time::parse("-3").to_string() == "-3");
  CHECK(Time::parse("12.5").to_string() == "12.5");
  CHECK(Time::parse("12.50").to_string() == "12.5");
  CHECK(Time::parse("0.25") == Time::ratio(1, 4));
  CHECK(Time::parse("3/4") == Time::ratio(3, 4));
  CHECK(Time::ratio(1, 3).to_string() == "1/3");
  CHECK(Time::parse("90.0").to_string() == "90");
  CHECK(Time(0).to_string() == "0");
  CHECK_THROWS_AS(Time::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Time::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Time::parse("1/0"), std::invalid_argument);
}

TEST_CASE("exact arithmetic") {
  Time a = Time::ratio(1, 3);
  Time b = Time::ratio(1, 6);
  CHECK(a + b == Time::ratio(1, 2));
  CHECK(a - b == b);
  CHECK(-b == Time::ratio(-1, 6));
  CHECK(a * 6 == Time(2));
  CHECK(Time(5).div(2) == Time::ratio(5, 2));
  // repeated addition of 0.1 stays exact
  Time t;
  for (int i = 0; i < 10; ++i)
    t += Time::parse("0.1");
  CHECK(t == Time(1));
}

TEST_CASE("ordering and infinity") {
  CHECK(Time(1) < Time(2));
  CHECK(Time::ratio(1, 3) < Time::ratio(1, 2));
  Time inf = Time::infinity();
  CHECK(inf.is_infinite());
  CHECK(Time(1000000) < inf);
  CHECK_FALSE(inf < inf);
  CHECK(inf == inf);
  CHECK(inf + Time(5) == inf);
  CHECK_THROWS_AS(Time(1) - inf, std::domain_error);
  CHECK(tempora::min(Time(3), Time(2)) == Time(2));
  CHECK(tempora::max(Time(3), inf) == inf);
}

TEST_CASE("overflow is detected, not wrapped") {
  Time big(
      std::numeric_limits<long long>::max() / 2);
  CHECK_THROWS_AS(big + big + big, std::overflow_error);
}

TEST_CASE("window rendering") {
  TimeWindow w{Time(40), Time(60)};
  CHECK(w.to_string() == "[40,60]");
  w.hi_strict = true;
  CHECK(w.to_string() == "[40,60)");
}
