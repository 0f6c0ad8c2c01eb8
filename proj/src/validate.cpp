#include "tempora/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tempora {

namespace {

// Local static-interference test (deliberately not shared with the planner:
// this module is the oracle for its output).
bool interferes(const GroundAction &a, const GroundAction &b) {
  auto hits = [](const std::vector<int> &dels, const GroundAction &o) {
    for (int f : dels)
      if (std::find(o.pre.begin(), o.pre.end(), f) != o.pre.end() ||
          std::find(o.eff_add.begin(), o.eff_add.end(), f) !=
              o.eff_add.end())
        return true;
    return false;
  };
  return hits(a.eff_del, b) || hits(b.eff_del, a);
}

std::string step_name(const PlanStep &s) {
  std::string n = "(" + s.name;
  for (const auto &a : s.args)
    n += " " + a;
  return n + ")";
}

const GroundAction *find_action(const ProblemInstance &p, const PlanStep &s) {
  for (const auto &a : p.actions)
    if (a.name == s.name && a.args == s.args)
      return &a;
  return nullptr;
}

bool in_some_window(const TimedConditionSpec &tc, const Time &start,
                    const Time &end) {
  for (const auto &w : tc.windows) {
    if (start < w.lo || (start == w.lo && w.lo_strict))
      continue;
    if (end > w.hi || (end == w.hi && w.hi_strict))
      continue;
    return true;
  }
  return false;
}

} // namespace

const char *Violation::kind_name(Kind k) {
  switch (k) {
  case Precondition:
    return "precondition";
  case MutexOverlap:
    return "mutex-overlap";
  case Window:
    return "window";
  case Goal:
    return "goal";
  }
  return "?";
}

std::string ValidationReport::to_string() const {
  if (valid)
    return "valid\n";
  std::string out;
  for (const auto &v : violations) {
    out += Violation::kind_name(v.kind);
    if (v.step >= 0)
      out += " step " + std::to_string(v.step);
    out += ": " + v.detail + "\n";
  }
  return out;
}

ValidationReport validate_plan(const ProblemInstance &p, const Plan &plan) {
  ValidationReport rep;
  auto flag = [&](Violation::Kind k, int step, std::string detail) {
    rep.valid = false;
    rep.violations.push_back({k, step, std::move(detail)});
  };

  const int n = (int)plan.steps.size();
  std::vector<const GroundAction *> acts(n, nullptr);
  std::vector<Time> s_time(n), e_time(n);
  for (int i = 0; i < n; ++i) {
    const PlanStep &st = plan.steps[i];
    acts[i] = find_action(p, st);
    if (!acts[i]) {
      flag(Violation::Precondition, i, "unknown action " + step_name(st));
      continue;
    }
    if (st.duration != acts[i]->duration)
      flag(Violation::Precondition, i,
           "duration of " + step_name(st) + " is not " +
               acts[i]->duration.to_string());
    if (st.start < Time(0))
      flag(Violation::Window, i, step_name(st) + " starts before time 0");
    s_time[i] = st.start;
    e_time[i] = st.start + acts[i]->duration;
  }

  // state evolution: effects of an action land at its end instant, deletes
  // before adds; between instants the state is constant
  std::set<Time> instant_set;
  for (int i = 0; i < n; ++i)
    if (acts[i]) {
      instant_set.insert(s_time[i]);
      instant_set.insert(e_time[i]);
    }
  std::vector<Time> instants(instant_set.begin(), instant_set.end());
  std::set<int> state(p.init.begin(), p.init.end());
  // state_at[k] = facts holding on [instants[k], instants[k+1])
  std::vector<std::set<int>> state_at;
  for (const Time &t : instants) {
    for (int i = 0; i < n; ++i)
      if (acts[i] && e_time[i] == t)
        for (int f : acts[i]->eff_del)
          state.erase(f);
    for (int i = 0; i < n; ++i)
      if (acts[i] && e_time[i] == t)
        for (int f : acts[i]->eff_add)
          state.insert(f);
    state_at.push_back(state);
  }

  for (int i = 0; i < n; ++i) {
    if (!acts[i])
      continue;
    // plain preconditions over the whole half-open execution interval
    std::set<int> missing;
    for (int k = 0; k < (int)instants.size(); ++k) {
      if (instants[k] < s_time[i] || !(instants[k] < e_time[i]))
        continue;
      for (int f : acts[i]->pre)
        if (!state_at[k].count(f))
          missing.insert(f);
    }
    for (int f : missing)
      flag(Violation::Precondition, i,
           p.fact(f).to_string() + " does not hold throughout " +
               step_name(plan.steps[i]));
    // merged timed precondition: execution inside one window
    if (acts[i]->timed_pre &&
        !in_some_window(*acts[i]->timed_pre, s_time[i], e_time[i]))
      flag(Violation::Window, i,
           step_name(plan.steps[i]) + " at [" + s_time[i].to_string() + "," +
               e_time[i].to_string() + "] fits no window of " +
               acts[i]->timed_pre->literal.to_string());
    // interfering actions must not overlap (half-open intervals)
    for (int j = i + 1; j < n; ++j) {
      if (!acts[j] || !interferes(*acts[i], *acts[j]))
        continue;
      if (s_time[i] < e_time[j] && s_time[j] < e_time[i])
        flag(Violation::MutexOverlap, i,
             step_name(plan.steps[i]) + " overlaps " +
                 step_name(plan.steps[j]));
    }
  }

  const std::set<int> &final_state = instants.empty()
                                         ? state
                                         : state_at.back();
  for (int g : p.goals)
    if (!final_state.count(g))
      flag(Violation::Goal, -1, p.fact(g).to_string() + " not achieved");

  return rep;
}

std::string render_plan(const Plan &plan) {
  std::string out;
  for (const auto &s : plan.steps) {
    out += s.start.to_string() + ": (" + s.name;
    for (const auto &a : s.args)
      out += " " + a;
    out += ") [" + s.duration.to_string() + "]\n";
  }
  return out;
}

Plan parse_plan(const std::string &text) {
  Plan plan;
  plan.makespan = Time(0);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == ';')
      continue;
    auto fail = [&](const std::string &why) {
      throw std::runtime_error("plan line " + std::to_string(lineno) + ": " +
                               why);
    };
    size_t colon = line.find(':', b);
    if (colon == std::string::npos)
      fail("missing ':'");
    PlanStep step;
    step.start = Time::parse(line.substr(b, colon - b));
    size_t op = line.find('(', colon);
    size_t cp = line.find(')', op == std::string::npos ? colon : op);
    if (op == std::string::npos || cp == std::string::npos)
      fail("missing action parentheses");
    std::istringstream body(line.substr(op + 1, cp - op - 1));
    if (!(body >> step.name))
      fail("empty action");
    std::string arg;
    while (body >> arg)
      step.args.push_back(arg);
    size_t ob = line.find('[', cp);
    size_t cb = line.find(']', ob == std::string::npos ? cp : ob);
    if (ob == std::string::npos || cb == std::string::npos)
      fail("missing [duration]");
    step.duration = Time::parse(line.substr(ob + 1, cb - ob - 1));
    plan.makespan = max(plan.makespan, step.start + step.duration);
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

} // namespace tempora
