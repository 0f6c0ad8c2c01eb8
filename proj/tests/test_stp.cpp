#include "doctest.h"
#include "tempora/stp.hpp"

using namespace tempora;

TEST_CASE("chain of precedence constraints has the obvious earliest times") {
  Stp stp;
  PointId a = stp.add_point("a");
  PointId b = stp.add_point("b");
  // a >= 10 : origin - a <= -10
  stp.assert_edge({a, stp.origin(), {Time(-10), false}});
  // b - a >= 5 : a - b <= -5
  stp.assert_edge({b, a, {Time(-5), false}});
  REQUIRE(stp.is_consistent());
  auto sol = stp.earliest_solution();
  CHECK(sol.at(stp.origin()) == Time(0));
  CHECK(sol.at(a) == Time(10));
  CHECK(sol.at(b) == Time(15));
}

TEST_CASE("negative cycle is inconsistent; retraction restores consistency") {
  Stp stp;
  PointId a = stp.add_point("a");
  PointId b = stp.add_point("b");
  stp.assert_edge({a, b, {Time(3), false}});  // b - a <= 3
  StpEdge bad{b, a, {Time(-4), false}};       // a - b <= -4
  stp.assert_edge(bad);
  CHECK_FALSE(stp.is_consistent());
  CHECK_THROWS_AS(stp.earliest_solution(), std::logic_error);
  stp.retract_edge(bad);
  CHECK(stp.is_consistent());
  CHECK_THROWS_AS(stp.retract_edge(bad), std::invalid_argument);
}

TEST_CASE("zero cycle through a strict edge is inconsistent") {
  Stp stp;
  PointId a = stp.add_point("a");
  PointId b = stp.add_point("b");
  stp.assert_edge({a, b, {Time(0), true}});  // b < a
  stp.assert_edge({b, a, {Time(0), false}}); // a <= b
  CHECK_FALSE(stp.is_consistent());
  stp.retract_edge({a, b, {Time(0), true}});
  stp.assert_edge({a, b, {Time(0), false}});
  CHECK(stp.is_consistent()); // a == b is fine with non-strict edges
}

TEST_CASE("strict binding lower bound has no attained minimum") {
  Stp stp;
  PointId a = stp.add_point("a");
  stp.assert_edge({a, stp.origin(), {Time(-10), true}}); // a > 10
  CHECK(stp.is_consistent());
  CHECK_THROWS_AS(stp.earliest_solution(), std::logic_error);
}

TEST_CASE("parallel edges: tightest wins, each retractable separately") {
  Stp stp;
  PointId a = stp.add_point("a");
  stp.assert_edge({a, stp.origin(), {Time(-3), false}});
  stp.assert_edge({a, stp.origin(), {Time(-7), false}});
  CHECK(stp.earliest_solution().at(a) == Time(7));
  stp.retract_edge({a, stp.origin(), {Time(-7), false}});
  CHECK(stp.earliest_solution().at(a) == Time(3));
}

TEST_CASE("latest times: deadlines propagate, unbounded points are infinite") {
  Stp stp;
  PointId a = stp.add_point("a");
  PointId b = stp.add_point("b");
  PointId c = stp.add_point("c");
  stp.assert_edge({stp.origin(), a, {Time(20), false}}); // a <= 20
  stp.assert_edge({a, b, {Time(-5), false}});            // b <= a - 5
  auto latest = stp.latest_times();
  CHECK(latest[a] == Time(20));
  CHECK(latest[b] == Time(15));
  CHECK(latest[c].is_infinite());
}

TEST_CASE("conflicting release and deadline are inconsistent") {
  Stp stp;
  PointId a = stp.add_point("a");
  stp.assert_edge({a, stp.origin(), {Time(-30), false}}); // a >= 30
  stp.assert_edge({stp.origin(), a, {Time(20), false}});  // a <= 20
  CHECK_FALSE(stp.is_consistent());
}

TEST_CASE("retract_and_assert swaps constraint sets atomically") {
  Stp stp;
  PointId a = stp.add_point("a");
  StpEdge old{a, stp.origin(), {Time(-10), false}};
  stp.assert_edge(old);
  stp.retract_and_assert({old}, {{a, stp.origin(), {Time(-25), false}}});
  CHECK(stp.earliest_solution().at(a) == Time(25));
}

TEST_CASE("fractional bounds stay exact") {
  Stp stp;
  PointId a = stp.add_point("a");
  stp.assert_edge({a, stp.origin(), {-Time::ratio(1, 3), false}});
  stp.assert_edge({a, stp.origin(), {-Time::ratio(1, 2), false}});
  CHECK(stp.earliest_solution().at(a) == Time::ratio(1, 2));
}
