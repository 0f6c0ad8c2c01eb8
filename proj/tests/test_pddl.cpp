#include "doctest.h"
#include "tempora/pddl.hpp"

using namespace tempora;

namespace {

const char *kDomain = R"((define (domain deliveries)
  (:requirements :strips :typing :durative-actions :timed-initial-literals)
  (:types truck location - object)
  (:predicates (at-loc ?t - truck ?l - location)
               (road ?a - location ?b - location)
               (open ?l - location)
               (delivered ?l - location))
  (:durative-action drive
    :parameters (?t - truck ?a - location ?b - location)
    :duration (= ?duration 10)
    :condition (and (at start (at-loc ?t ?a))
                    (over all (road ?a ?b)))
    :effect (and (at start (not (at-loc ?t ?a)))
                 (at end (at-loc ?t ?b))))
  (:durative-action deliver
    :parameters (?t - truck ?l - location)
    :duration (= ?duration 2.5)
    :condition (and (over all (at-loc ?t ?l))
                    (over all (open ?l)))
    :effect (at end (delivered ?l)))
)
)";

const char *kProblem = R"((define (problem run1)
  (:domain deliveries)
  (:objects t1 - truck depot shop - location)
  (:init (at-loc t1 depot)
         (road depot shop) (road shop depot)
         (at 8 (open shop))
         (at 12 (not (open shop))))
  (:goal (and (delivered shop)))
)
)";

const GroundAction *find_action(const ProblemInstance &inst,
                                const std::string &sig) {
  for (const auto &a : inst.actions)
    if (a.signature() == sig)
      return &a;
  return nullptr;
}

} // namespace

TEST_CASE("a small domain/problem pair parses and grounds") {
  ParsedTask task = parse_pddl(kDomain, kProblem);
  CHECK(task.domain_name == "deliveries");
  CHECK(task.problem_name == "run1");
  CHECK(task.schemas.size() == 2);
  CHECK(task.timed_assertions.size() == 2);

  ProblemInstance inst = ground(task);
  // drive: 1 truck x 2 x 2 locations; deliver: 1 truck x 2 locations,
  // minus deliver at the depot (no open window -> pruned) ... depot is never
  // open, so (deliver t1 depot) is unschedulable.
  CHECK(find_action(inst, "(drive t1 depot shop)") != nullptr);
  CHECK(find_action(inst, "(drive t1 shop shop)") != nullptr);
  CHECK(find_action(inst, "(deliver t1 depot)") == nullptr);
  REQUIRE(inst.diagnostics.size() == 1);
  CHECK(inst.diagnostics[0] ==
        "pruned unschedulable action (deliver t1 depot)");

  const GroundAction *deliver = find_action(inst, "(deliver t1 shop)");
  REQUIRE(deliver != nullptr);
  CHECK(deliver->duration == Time::parse("2.5"));
  REQUIRE(deliver->timed_pre.has_value());
  REQUIRE(deliver->timed_pre->windows.size() == 1);
  CHECK(deliver->timed_pre->windows[0] == TimeWindow{Time(8), Time(12)});
  // the non-timed invariant (at-loc t1 shop) stays an ordinary precondition
  REQUIRE(deliver->pre.size() == 1);
  CHECK(inst.fact(deliver->pre[0]) ==
        Literal{"at-loc", {"t1", "shop"}, false});

  const GroundAction *drive = find_action(inst, "(drive t1 depot shop)");
  REQUIRE(drive != nullptr);
  CHECK_FALSE(drive->timed_pre.has_value());
  CHECK(drive->pre.size() == 2);
  CHECK(drive->eff_add.size() == 1);
  CHECK(drive->eff_del.size() == 1);

  CHECK(inst.goals.size() == 1);
  CHECK(inst.fact(inst.goals[0]) == Literal{"delivered", {"shop"}, false});
}

TEST_CASE("subtype objects bind to supertype parameters") {
  std::string dom = R"((define (domain d)
    (:types van - truck truck - object)
    (:predicates (ready ?t - truck))
    (:durative-action prep
      :parameters (?t - truck)
      :duration (= ?duration 1)
      :condition ()
      :effect (at end (ready ?t)))))";
  std::string prob = R"((define (problem p) (:domain d)
    (:objects v1 - van)
    (:init)
    (:goal (ready v1))))";
  auto inst = ground(parse_pddl(dom, prob));
  REQUIRE(inst.actions.size() == 1);
  CHECK(inst.actions[0].signature() == "(prep v1)");
}

TEST_CASE("a plain init literal of a timed predicate opens a window at 0") {
  std::string dom = R"((define (domain d)
    (:predicates (gate) (done))
    (:durative-action go
      :parameters ()
      :duration (= ?duration 1)
      :condition (over all (gate))
      :effect (at end (done)))))";
  std::string prob = R"((define (problem p) (:domain d)
    (:objects)
    (:init (gate) (at 5 (not (gate))) (at 9 (gate)))
    (:goal (done))))";
  auto inst = ground(parse_pddl(dom, prob));
  REQUIRE(inst.actions.size() == 1);
  const auto &w = inst.actions[0].timed_pre->windows;
  REQUIRE(w.size() == 2);
  CHECK(w[0] == TimeWindow{Time(0), Time(5)});
  CHECK(w[1].lo == Time(9));
  CHECK(w[1].hi.is_infinite());
}

TEST_CASE("unsupported constructs are named in the error") {
  auto expect_error = [](const std::string &dom, const std::string &prob,
                         const std::string &needle) {
    try {
      ground(parse_pddl(dom, prob));
      FAIL("expected a parse error mentioning '" << needle << "'");
    } catch (const std::exception &e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  std::string prob = "(define (problem p) (:domain d) (:init) (:goal ()))";
  expect_error("(define (domain d) (:functions (cost)))", prob,
               ":functions");
  expect_error("(define (domain d) (:derived (p) (q)))", prob, ":derived");
  expect_error("(define (domain d) (:action a :parameters ()))", prob,
               ":action");
  expect_error(R"((define (domain d) (:predicates (p))
      (:durative-action a :parameters ()
        :duration (= ?duration 1)
        :condition (at start (not (p)))
        :effect (at end (p)))))",
               prob, "negative");
  expect_error(R"((define (domain d) (:predicates (p) (q))
      (:durative-action a :parameters ()
        :duration (= ?duration 1)
        :condition ()
        :effect (when (p) (at end (q))))))",
               prob, "when");
  expect_error(R"((define (domain d) (:predicates (p))
      (:durative-action a :parameters ()
        :duration (= ?duration ?x)
        :condition ()
        :effect (at end (p)))))",
               prob, "duration");
}

TEST_CASE("timed predicates may not appear in effects or goals") {
  std::string dom = R"((define (domain d)
    (:predicates (gate) (done))
    (:durative-action cheat
      :parameters ()
      :duration (= ?duration 1)
      :condition ()
      :effect (at end (gate)))))";
  std::string prob = R"((define (problem p) (:domain d)
    (:init (at 3 (gate))) (:goal (done))))";
  CHECK_THROWS_WITH_AS(ground(parse_pddl(dom, prob)),
                       doctest::Contains("effects"), std::runtime_error);

  std::string dom2 = R"((define (domain d)
    (:predicates (gate) (done))
    (:durative-action go
      :parameters ()
      :duration (= ?duration 1)
      :condition ()
      :effect (at end (done)))))";
  std::string prob2 = R"((define (problem p) (:domain d)
    (:init (at 3 (gate))) (:goal (gate))))";
  CHECK_THROWS_WITH_AS(ground(parse_pddl(dom2, prob2)),
                       doctest::Contains("goal"), std::runtime_error);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_pddl("(define (domain d)\n  (:wrong))", "(define (problem p))");
    FAIL("expected parse error");
  } catch (const ParseError &e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_pddl("(define (domain d)", "(define (problem p))"),
                  ParseError);
}

TEST_CASE("problem files round-trip through the renderer") {
  ParsedTask task = parse_pddl(kDomain, kProblem);
  std::string text = render_problem(task);
  ParsedTask again = parse_pddl(kDomain, text);
  CHECK(again.init == task.init);
  CHECK(again.timed_assertions == task.timed_assertions);
  CHECK(again.goals == task.goals);
  CHECK(again.objects == task.objects);
}
