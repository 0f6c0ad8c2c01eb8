#include <random>

#include "doctest.h"
#include "tempora/lagraph.hpp"

using namespace tempora;

namespace {

Literal lit(const std::string &p) { return Literal{p, {}, false}; }

// The running three-action scenario: a1 (50) achieves f1, a2 (70) achieves
// f2, a3 (15) needs both and must run inside {[25,50),[75,125),[150,200]}.
struct Scenario {
  ProblemInstance inst;
  int f1, f2, g;

  Scenario() {
    f1 = inst.intern(lit("f1"));
    f2 = inst.intern(lit("f2"));
    g = inst.intern(lit("g"));
    inst.goals = {g};
    GroundAction a1{"a1", {}, Time(50), {}, {f1}, {}, {}, {}};
    GroundAction a2{"a2", {}, Time(70), {}, {f2}, {}, {}, {}};
    GroundAction a3{"a3", {}, Time(15), {f1, f2}, {g}, {}, {}, {}};
    a3.timed_pre = TimedConditionSpec{
        lit("w"),
        CondTiming::OverAll,
        {{Time(25), Time(50), false, true},
         {Time(75), Time(125), false, true},
         {Time(150), Time(200), false, false}}};
    inst.actions = {a1, a2, a3};
  }
  const GroundAction &action(const std::string &name) const {
    for (const auto &a : inst.actions)
      if (a.name == name)
        return a;
    throw std::logic_error("no such action");
  }
};

} // namespace

TEST_CASE("goals already true: empty flawless plan") {
  ProblemInstance inst;
  int g = inst.intern(lit("g"));
  inst.init = {g};
  inst.goals = {g};
  TdaGraph graph(inst);
  CHECK(graph.find_flaws().empty());
  Plan plan = graph.extract_plan();
  CHECK(plan.steps.empty());
  CHECK(plan.makespan == Time(0));
}

TEST_CASE("initial flaw count is the number of unreached goals") {
  ProblemInstance inst;
  int g1 = inst.intern(lit("g1"));
  int g2 = inst.intern(lit("g2"));
  int g3 = inst.intern(lit("g3"));
  inst.init = {g2};
  inst.goals = {g1, g2, g3};
  TdaGraph graph(inst);
  auto flaws = graph.find_flaws();
  REQUIRE(flaws.size() == 2);
  CHECK(flaws[0].kind == Flaw::Propositional);
  CHECK(flaws[0].fact == g1);
  CHECK(flaws[1].fact == g3);
  CHECK(flaws[0].level == graph.last_level());
}

TEST_CASE("building the scenario plan level by level") {
  Scenario s;
  TdaGraph g(s.inst);
  REQUIRE(g.find_flaws().size() == 1); // goal g unsupported

  g.insert_action(s.action("a3"), 1);
  // goal now supported, but a3's own preconditions are not
  auto flaws = g.find_flaws();
  REQUIRE(flaws.size() == 2);
  CHECK(flaws[0].level == 1);
  CHECK(flaws[0].fact == s.f1);
  CHECK(flaws[1].fact == s.f2);

  g.insert_action(s.action("a1"), 1); // a3 shifts to level 2
  CHECK(g.action_at(1).name == "a1");
  CHECK(g.action_at(2).name == "a3");
  flaws = g.find_flaws();
  REQUIRE(flaws.size() == 1);
  CHECK(flaws[0].fact == s.f2);
  CHECK(flaws[0].level == 2);

  g.insert_action(s.action("a2"), 2); // order: a1 a2 a3
  CHECK(g.find_flaws().empty());
  CHECK(g.start_of(3) == Time(75));
  CHECK(g.end_of(3) == Time(90));
  Plan plan = g.extract_plan();
  REQUIRE(plan.steps.size() == 3);
  CHECK(plan.makespan == Time(90));
  CHECK(plan.steps[0].start == Time(0));
  CHECK(plan.steps[1].start == Time(0));
  CHECK(plan.steps[2].start == Time(75));
  CHECK(plan.steps[2].name == "a3");
}

TEST_CASE("a window set that cannot be met leaves a temporal flaw") {
  Scenario s;
  s.inst.actions[2].timed_pre->windows = {{Time(0), Time(60)}};
  TdaGraph g(s.inst);
  g.insert_action(s.action("a1"), 1);
  g.insert_action(s.action("a2"), 2);
  g.insert_action(s.action("a3"), 3);
  auto flaws = g.find_flaws();
  REQUIRE(flaws.size() == 1);
  CHECK(flaws[0].kind == Flaw::Temporal);
  CHECK(flaws[0].level == 3);
  CHECK_FALSE(g.scheduled(3));
  // the partial schedule still places a3 by its orderings
  CHECK(g.start_of(3) == Time(70));
  CHECK_THROWS_AS(g.extract_plan(), std::logic_error);
}

TEST_CASE("deleting actions blocks the carry-over of facts") {
  ProblemInstance inst;
  int f = inst.intern(lit("f"));
  int h = inst.intern(lit("h"));
  inst.init = {f};
  inst.goals = {f, h};
  GroundAction killer{"killer", {}, Time(3), {}, {h}, {f}, {}, {}};
  inst.actions = {killer};
  TdaGraph g(inst);
  CHECK(g.find_flaws().size() == 1); // h missing
  g.insert_action(inst.actions[0], 1);
  auto flaws = g.find_flaws();
  // h is fixed but the killer wiped f on the way to the goals
  REQUIRE(flaws.size() == 1);
  CHECK(flaws[0].fact == f);
  CHECK(flaws[0].level == g.last_level());
  g.remove_action(1);
  CHECK(g.fact_supported(f, g.last_level()));
}

TEST_CASE("interfering actions are forced to run in sequence") {
  ProblemInstance inst;
  int f = inst.intern(lit("f"));
  int g1 = inst.intern(lit("g1"));
  int g2 = inst.intern(lit("g2"));
  inst.init = {f};
  inst.goals = {g1, g2};
  GroundAction user{"user", {}, Time(4), {f}, {g1}, {}, {}, {}};
  GroundAction wrecker{"wrecker", {}, Time(6), {}, {g2}, {f}, {}, {}};
  inst.actions = {user, wrecker};
  REQUIRE(actions_mutex(user, wrecker));
  REQUIRE_FALSE(actions_mutex(user, user));
  TdaGraph g(inst);
  g.insert_action(inst.actions[0], 1);
  g.insert_action(inst.actions[1], 2);
  CHECK(g.find_flaws().empty());
  // wrecker deletes user's precondition: it must wait for user to finish
  CHECK(g.start_of(1) == Time(0));
  CHECK(g.start_of(2) == Time(4));
  CHECK(g.extract_plan().makespan == Time(10));
}

TEST_CASE("disjoint actions are not mutex and run in parallel") {
  ProblemInstance inst;
  int g1 = inst.intern(lit("g1"));
  int g2 = inst.intern(lit("g2"));
  inst.goals = {g1, g2};
  GroundAction x{"x", {}, Time(4), {}, {g1}, {}, {}, {}};
  GroundAction y{"y", {}, Time(6), {}, {g2}, {}, {}, {}};
  inst.actions = {x, y};
  CHECK_FALSE(actions_mutex(x, y));
  TdaGraph g(inst);
  g.insert_action(inst.actions[0], 1);
  g.insert_action(inst.actions[1], 2);
  CHECK(g.start_of(1) == Time(0));
  CHECK(g.start_of(2) == Time(0));
  CHECK(g.extract_plan().makespan == Time(6));
}

TEST_CASE("insert-then-remove restores the graph exactly") {
  Scenario s;
  TdaGraph g(s.inst);
  g.insert_action(s.action("a1"), 1);
  g.insert_action(s.action("a3"), 2);
  std::string before = g.dump();
  g.insert_action(s.action("a2"), 2);
  g.remove_action(2);
  CHECK(g.dump() == before);
}

TEST_CASE("orderings always point from earlier to later levels") {
  Scenario s;
  TdaGraph g(s.inst);
  g.insert_action(s.action("a3"), 1);
  g.insert_action(s.action("a2"), 1);
  g.insert_action(s.action("a1"), 1);
  g.insert_action(s.action("a1"), 2);
  g.remove_action(3);
  std::string d = g.dump();
  // every "order i -> j" line in the dump must have i < j
  std::size_t pos = 0;
  int checked = 0;
  while ((pos = d.find("order ", pos)) != std::string::npos) {
    int i, j;
    REQUIRE(sscanf(d.c_str() + pos, "order %d -> %d", &i, &j) == 2);
    CHECK(i < j);
    pos += 6;
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("random edit scripts match a from-scratch rebuild") {
  std::mt19937 rng(7);
  for (int round = 0; round < 25; ++round) {
    ProblemInstance inst;
    for (int f = 0; f < 8; ++f)
      inst.intern(lit("f" + std::to_string(f)));
    for (int f = 0; f < 8; ++f)
      if (rng() % 2)
        inst.init.push_back(f);
    std::sort(inst.init.begin(), inst.init.end());
    inst.goals = {0, 1};
    for (int a = 0; a < 6; ++a) {
      GroundAction act{"act" + std::to_string(a),
                       {},
                       Time(1 + (long long)(rng() % 30)),
                       {},
                       {},
                       {},
                       {},
                       {}};
      for (int f = 0; f < 8; ++f) {
        unsigned r = rng() % 8;
        if (r == 0)
          act.pre.push_back(f);
        else if (r == 1)
          act.eff_add.push_back(f);
        else if (r == 2)
          act.eff_del.push_back(f);
      }
      if (rng() % 3 == 0) {
        Time lo((long long)(rng() % 40));
        act.timed_pre = TimedConditionSpec{
            lit("w"),
            CondTiming::OverAll,
            {{lo, lo + Time(20 + (long long)(rng() % 60))},
             {lo + Time(200), Time::infinity()}}};
      }
      inst.actions.push_back(std::move(act));
    }

    TdaGraph g(inst);
    std::vector<int> level_actions; // indexes into inst.actions, by level
    for (int step = 0; step < 12; ++step) {
      bool do_insert = level_actions.empty() || rng() % 3 != 0;
      if (do_insert) {
        int ai = (int)(rng() % inst.actions.size());
        int lvl = 1 + (int)(rng() % (level_actions.size() + 1));
        g.insert_action(inst.actions[ai], lvl);
        level_actions.insert(level_actions.begin() + (lvl - 1), ai);
      } else {
        int lvl = 1 + (int)(rng() % level_actions.size());
        g.remove_action(lvl);
        level_actions.erase(level_actions.begin() + (lvl - 1));
      }
      // from-scratch reference: same action sequence, fresh graph
      TdaGraph ref(inst);
      for (std::size_t i = 0; i < level_actions.size(); ++i)
        ref.insert_action(inst.actions[level_actions[i]], (int)i + 1);
      CAPTURE(round);
      CAPTURE(step);
      REQUIRE(g.same_shape(ref));
      REQUIRE(g.dump() == ref.dump());
      auto fl = g.find_flaws();
      auto fr = ref.find_flaws();
      REQUIRE(fl.size() == fr.size());
      for (std::size_t i = 0; i < fl.size(); ++i) {
        CHECK(fl[i].kind == fr[i].kind);   // node ids differ across graphs,
        CHECK(fl[i].level == fr[i].level); // so compare the visible parts
        CHECK(fl[i].fact == fr[i].fact);
      }
    }
  }
}
