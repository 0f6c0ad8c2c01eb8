#include "tempora/heuristics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tempora/stp.hpp"

namespace tempora {

namespace {

bool window_has_point(const TimeWindow &w, const Time &t) {
  if (t < w.lo || (t == w.lo && w.lo_strict))
    return false;
  if (t > w.hi || (t == w.hi && w.hi_strict))
    return false;
  return true;
}

bool window_has_execution(const TimeWindow &w, const Time &s, const Time &e) {
  if (s < w.lo || (s == w.lo && w.lo_strict))
    return false;
  if (e > w.hi || (e == w.hi && w.hi_strict))
    return false;
  return true;
}

bool timed_condition_holds(const TimedConditionSpec &c, const Time &start,
                           const Time &end) {
  if (c.windows.empty())
    return true;
  for (const auto &w : c.windows) {
    switch (c.timing) {
    case CondTiming::AtStart:
      if (window_has_point(w, start))
        return true;
      break;
    case CondTiming::AtEnd:
      if (window_has_point(w, end))
        return true;
      break;
    case CondTiming::OverAll:
      if (window_has_execution(w, start, end))
        return true;
      break;
    }
  }
  return false;
}

bool adds_fact(const GroundAction &a, int f) {
  return std::find(a.eff_add.begin(), a.eff_add.end(), f) != a.eff_add.end();
}

bool deletes_fact(const GroundAction &a, int f) {
  return std::find(a.eff_del.begin(), a.eff_del.end(), f) != a.eff_del.end();
}

} // namespace

int unsatisfied_timed_preconditions(const GroundAction &a, const Time &start,
                                    const Time &end) {
  int n = 0;
  for (const auto &c : a.original_timed)
    if (!timed_condition_holds(c, start, end))
      ++n;
  return n;
}

Time compute_eft(const GroundAction &a, const Time &t) {
  Time plain = t + a.duration;
  if (!a.timed_pre)
    return plain;
  for (const auto &w : a.timed_pre->windows) {
    Time start = max(t, w.lo);
    Time finish = start + a.duration;
    if (finish < w.hi || (finish == w.hi && !w.hi_strict))
      return finish;
  }
  return plain;
}

Time compute_lft(const GroundAction &a) {
  if (!a.timed_pre || a.timed_pre->windows.empty())
    return Time::infinity();
  return a.timed_pre->windows.back().hi;
}

bool eft_within_lft(const GroundAction &a, const Time &eft) {
  if (!a.timed_pre || a.timed_pre->windows.empty())
    return true;
  const TimeWindow &last = a.timed_pre->windows.back();
  return eft < last.hi || (eft == last.hi && !last.hi_strict);
}

ReachabilityTable
reachability_information(const ProblemInstance &p,
                         const std::map<int, Time> &state) {
  const int nf = (int)p.facts.size();
  const int na = (int)p.actions.size();
  ReachabilityTable t;
  t.fact_num_acts.assign(nf, ReachabilityTable::kUnreachable);
  t.fact_et.assign(nf, Time::infinity());
  t.fact_action.assign(nf, -1);
  t.act_num_acts.assign(na, ReachabilityTable::kUnreachable);
  t.act_eft.assign(na, Time::infinity());
  t.act_lft.assign(na, Time::infinity());

  std::vector<char> in_f(nf, 0);
  for (const auto &[f, tm] : state) {
    in_f[f] = 1;
    t.fact_num_acts[f] = 0;
    t.fact_et[f] = tm;
  }

  std::vector<std::vector<int>> consumers(nf);
  std::vector<int> pre_missing(na, 0);
  for (int a = 0; a < na; ++a) {
    t.act_lft[a] = compute_lft(p.actions[a]);
    for (int f : p.actions[a].pre) {
      consumers[f].push_back(a);
      if (!in_f[f])
        ++pre_missing[a];
    }
  }

  std::vector<int> queue;
  std::vector<char> queued(na, 0);
  auto enqueue = [&](int a) {
    if (!queued[a] && pre_missing[a] == 0) {
      queued[a] = 1;
      queue.push_back(a);
    }
  };
  for (int a = 0; a < na; ++a)
    enqueue(a);

  // guard against a non-terminating relaxation (never hit in practice; the
  // earliest times descend over a finite set of window/duration breakpoints)
  long long budget = 64LL * (na + 4) * (na + nf + 4);
  while (!queue.empty()) {
    if (--budget < 0)
      throw std::logic_error("reachability fixpoint failed to converge");
    int a = queue.back();
    queue.pop_back();
    queued[a] = 0;
    const GroundAction &act = p.actions[a];

    Time ready(0);
    for (int f : act.pre)
      ready = max(ready, t.fact_et[f]);
    Time eft = compute_eft(act, ready);
    if (!(eft < t.act_eft[a]))
      continue;
    t.act_eft[a] = eft;
    if (!eft_within_lft(act, eft))
      continue; // can never meet its deadline from here

    auto ra = required_actions(p, state, act.pre, t);
    if (!ra)
      continue; // preconditions not yet chained to the base state
    if (t.act_num_acts[a] == ReachabilityTable::kUnreachable ||
        *ra < t.act_num_acts[a])
      t.act_num_acts[a] = *ra;

    for (int f : act.eff_add) {
      bool improved = false;
      if (t.fact_et[f] > eft) {
        t.fact_et[f] = eft;
        improved = true;
      }
      if (t.fact_num_acts[f] == ReachabilityTable::kUnreachable ||
          t.fact_num_acts[f] > *ra + 1) {
        t.fact_num_acts[f] = *ra + 1;
        t.fact_action[f] = a;
        improved = true;
      }
      if (!in_f[f]) {
        in_f[f] = 1;
        for (int c : consumers[f]) {
          --pre_missing[c];
          enqueue(c);
        }
      } else if (improved) {
        for (int c : consumers[f])
          enqueue(c);
      }
    }
  }
  return t;
}

std::optional<long long> required_actions(const ProblemInstance &p,
                                          const std::map<int, Time> &state,
                                          const std::vector<int> &goals,
                                          const ReachabilityTable &table) {
  std::set<int> acts;
  std::set<int> covered; // facts added by chosen actions
  std::set<int> open;
  for (int g : goals)
    if (!state.count(g))
      open.insert(g);
  while (!open.empty()) {
    int g = *open.begin();
    open.erase(open.begin());
    if (covered.count(g))
      continue;
    int a = table.fact_action.at(g);
    if (a < 0)
      return std::nullopt; // no achiever chained to the base state
    if (!acts.insert(a).second)
      continue;
    for (int f : p.actions[a].eff_add) {
      covered.insert(f);
      open.erase(f);
    }
    for (int f : p.actions[a].pre)
      if (!state.count(f) && !covered.count(f))
        open.insert(f);
  }
  return (long long)acts.size();
}

Time slack(const TdaGraph &g, int level_i, int level_j) {
  int nid_j = g.node_id_at(level_j);
  bool windowed = false;
  for (const auto &sc : g.dtp().sched())
    if (sc.node_id == nid_j)
      windowed = true;
  if (!windowed)
    return Time::infinity();
  auto it = g.outcome().assignment.choice.find(nid_j);
  if (it == g.outcome().assignment.choice.end() || !it->second)
    throw std::logic_error("slack: target node has no chosen window");
  TimeWindow w = *it->second;

  // ordering + duration network plus only the target's chosen window
  Stp stp;
  int last = g.last_level();
  std::vector<PointId> ps(last + 1), pe(last + 1);
  std::map<int, int> level_of;
  for (int l = 0; l <= last; ++l) {
    ps[l] = stp.add_point("s" + std::to_string(l));
    pe[l] = stp.add_point("e" + std::to_string(l));
    level_of[g.node_id_at(l)] = l;
    Time d = g.action_at(l).duration;
    stp.assert_edge({ps[l], pe[l], {d, false}});
    stp.assert_edge({pe[l], ps[l], {-d, false}});
  }
  stp.assert_edge({stp.origin(), ps[0], {Time(0), false}}); // plan starts at 0
  for (int l = 1; l <= last; ++l) {
    stp.assert_edge({ps[l], pe[0], {Time(0), false}});
    if (l < last)
      stp.assert_edge({ps[last], pe[l], {Time(0), false}});
  }
  for (const auto &o : g.dtp().orderings())
    stp.assert_edge({ps[level_of.at(o.to)], pe[level_of.at(o.from)],
                     {Time(0), false}});
  stp.assert_edge({ps[level_j], stp.origin(), {-w.lo, w.lo_strict}});
  stp.assert_edge({stp.origin(), pe[level_j], {w.hi, w.hi_strict}});

  Time latest = stp.latest_times().at(ps[level_i]);
  if (latest.is_infinite())
    return Time::infinity();
  return latest - g.start_of(level_i);
}

Heuristics::Heuristics(TdaGraph &g, double alpha, double beta)
    : g_(&g), alpha_(alpha), beta_(beta) {}

void Heuristics::invalidate_from(int edit_level) {
  cache_.erase(cache_.upper_bound(edit_level), cache_.end());
}

std::map<int, Time> Heuristics::state_at(int level) const {
  std::map<int, Time> s;
  for (int f = 0; f < (int)g_->problem().facts.size(); ++f)
    if (g_->fact_supported(f, level))
      s.emplace(f, g_->fact_time(f, level));
  return s;
}

const ReachabilityTable &Heuristics::table_at(int level) {
  auto it = cache_.find(level);
  if (it == cache_.end())
    it = cache_.emplace(level,
                        reachability_information(g_->problem(),
                                                 state_at(level)))
             .first;
  return it->second;
}

Time Heuristics::fact_time_est(int f, const std::map<int, Time> &state,
                               const RelaxedPlan &plan,
                               const ReachabilityTable &tbl) const {
  auto it = state.find(f);
  if (it != state.end())
    return it->second;
  Time best = Time::infinity();
  for (const GroundAction *b : plan.acts)
    if (adds_fact(*b, f))
      best = min(best, plan.finish_est.at(b));
  if (!best.is_infinite())
    return best;
  return tbl.fact_et.at(f);
}

long long Heuristics::threat_count(const GroundAction &b, int level) const {
  long long n = 0;
  for (int m = level; m <= g_->last_level(); ++m)
    for (int f : g_->action_at(m).pre)
      if (deletes_fact(b, f) && g_->fact_supported(f, m) &&
          g_->supporter_level(f, m) < level)
        ++n;
  return n;
}

Time Heuristics::start_estimate(const GroundAction &b,
                                const std::map<int, Time> &state,
                                const RelaxedPlan &plan, int level) {
  const ReachabilityTable &tbl = table_at(level);
  Time est(0);
  auto bit = std::find_if(g_->problem().actions.begin(),
                          g_->problem().actions.end(),
                          [&](const GroundAction &x) { return &x == &b; });
  if (bit != g_->problem().actions.end()) {
    int idx = (int)(bit - g_->problem().actions.begin());
    if (tbl.action_reachable(idx))
      est = max(est, tbl.act_eft[idx] - b.duration);
  }
  for (int f : b.pre) {
    Time tf = fact_time_est(f, state, plan, tbl);
    if (!tf.is_infinite())
      est = max(est, tf);
  }
  // interfering nodes before the level force b after their ends
  for (int m = 1; m < level && m < g_->last_level(); ++m)
    if (actions_mutex(b, g_->action_at(m)))
      est = max(est, g_->end_of(m));
  return est;
}

std::optional<CandidateScore>
Heuristics::score_candidate(const GroundAction &b,
                            const std::map<int, Time> &state,
                            const RelaxedPlan &plan, int level) {
  const ReachabilityTable &tbl = table_at(level);
  for (int f : b.pre)
    if (!state.count(f) && !tbl.fact_reachable(f))
      return std::nullopt;
  CandidateScore s;
  auto bit = std::find_if(g_->problem().actions.begin(),
                          g_->problem().actions.end(),
                          [&](const GroundAction &x) { return &x == &b; });
  long long num = ReachabilityTable::kUnreachable;
  if (bit != g_->problem().actions.end())
    num = tbl.act_num_acts[(int)(bit - g_->problem().actions.begin())];
  if (num == ReachabilityTable::kUnreachable) {
    // the table skipped it (deadline gate); estimate the support count
    auto ra = required_actions(g_->problem(), state, b.pre, tbl);
    if (!ra)
      return std::nullopt;
    num = *ra;
  }
  s.num_acts = num;
  s.threats = threat_count(b, level);
  s.est = start_estimate(b, state, plan, level);
  s.eft = s.est + b.duration;
  s.missed_windows = unsatisfied_timed_preconditions(b, s.est, s.eft);
  Time finish_so_far = max(plan.finish, s.eft);
  Time anchor = g_->start_of(level);
  Time delay = finish_so_far > anchor ? finish_so_far - anchor : Time(0);
  for (int k = level + 1; k < g_->last_level(); ++k) {
    if (!g_->action_at(k).timed_pre || !g_->scheduled(k))
      continue;
    if (delay > slack(*g_, level, k))
      ++s.schedule_breaks;
  }
  return s;
}

const GroundAction *Heuristics::best_action(int goal,
                                            const std::map<int, Time> &state,
                                            const RelaxedPlan &plan,
                                            int level) {
  const GroundAction *best = nullptr;
  long long best_score = 0;
  long long best_num = 0;
  for (const GroundAction &b : g_->problem().actions) {
    if (!adds_fact(b, goal))
      continue;
    auto s = score_candidate(b, state, plan, level);
    if (!s)
      continue;
    long long score = s->total();
    if (!best || score < best_score ||
        (score == best_score && s->num_acts < best_num)) {
      best = &b;
      best_score = score;
      best_num = s->num_acts;
    }
  }
  return best;
}

std::optional<Time> Heuristics::rtp_impl(const std::vector<int> &goals,
                                         const std::map<int, Time> &state,
                                         RelaxedPlan &plan, int level,
                                         int depth) {
  if (depth > 2 * (int)(g_->problem().facts.size() +
                        g_->problem().actions.size()) +
                  16)
    return std::nullopt;
  const ReachabilityTable &tbl = table_at(level);
  auto achieved = [&](int f) {
    if (state.count(f))
      return true;
    for (const GroundAction *b : plan.acts)
      if (adds_fact(*b, f))
        return true;
    return false;
  };
  Time t(0);
  for (int g : goals)
    if (achieved(g))
      t = max(t, fact_time_est(g, state, plan, tbl));

  for (;;) {
    // hardest-first: pending subgoal with the latest reachability estimate
    int pick = -1;
    for (int g : goals) {
      if (achieved(g))
        continue;
      if (pick == -1 || tbl.fact_et[g] > tbl.fact_et[pick] ||
          (tbl.fact_et[g] == tbl.fact_et[pick] &&
           g_->problem().fact(g) < g_->problem().fact(pick)))
        pick = g;
    }
    if (pick == -1)
      break;
    const GroundAction *b = best_action(pick, state, plan, level);
    if (!b)
      return std::nullopt;
    auto sub = rtp_impl(b->pre, state, plan, level, depth + 1);
    if (!sub)
      return std::nullopt;
    Time finish = compute_eft(*b, *sub);
    plan.start_est[b] = finish - b->duration;
    auto fit = plan.finish_est.find(b);
    if (fit == plan.finish_est.end())
      plan.finish_est.emplace(b, finish);
    else
      fit->second = min(fit->second, finish);
    plan.acts.push_back(b);
    t = max(t, finish);
    plan.finish = max(plan.finish, t);
  }
  plan.finish = max(plan.finish, t);
  return t;
}

std::optional<Time> Heuristics::relaxed_time_plan(
    const std::vector<int> &goals, const std::map<int, Time> &state,
    RelaxedPlan &plan, int level) {
  return rtp_impl(goals, state, plan, level, 0);
}

TemporalFlawCounts Heuristics::count_temporal_flaws(
    int anchor_level, const GroundAction *edited, const RelaxedPlan &plan,
    const std::vector<int> &prev_unscheduled, const Time &est_finish) {
  TemporalFlawCounts c;
  int edited_node =
      edited ? g_->node_id_at(anchor_level) : -1;
  for (int nid : g_->outcome().unscheduled) {
    if (nid == edited_node)
      continue;
    if (std::find(prev_unscheduled.begin(), prev_unscheduled.end(), nid) ==
        prev_unscheduled.end())
      ++c.broken_existing;
  }
  Time anchor = g_->start_of(anchor_level);
  Time delay = est_finish > anchor ? est_finish - anchor : Time(0);
  for (int k = anchor_level + 1; k < g_->last_level(); ++k) {
    if (!g_->action_at(k).timed_pre || !g_->scheduled(k))
      continue;
    if (delay > slack(*g_, anchor_level, k))
      ++c.broken_existing;
  }
  if (edited && !g_->scheduled(anchor_level))
    c.unsatisfied_timed = unsatisfied_timed_preconditions(
        *edited, g_->start_of(anchor_level), g_->end_of(anchor_level));
  for (const GroundAction *b : plan.acts)
    if (!b->original_timed.empty() &&
        unsatisfied_timed_preconditions(*b, plan.start_est.at(b),
                                  plan.finish_est.at(b)) > 0)
      ++c.plan_unschedulable;
  return c;
}

EvalResult Heuristics::assemble(const RelaxedPlan &plan, int extra_acts,
                                const TemporalFlawCounts &flaws,
                                const Time &finish) {
  EvalResult r;
  r.plan_size = (int)plan.acts.size() + extra_acts;
  r.flaws = flaws;
  r.search_cost = r.plan_size + flaws.total();
  r.temporal_cost = finish;
  double span = g_->outcome().makespan.to_double();
  if (span < 1.0)
    span = 1.0;
  r.combined = alpha_ * r.search_cost + beta_ * (finish.to_double() / span);
  return r;
}

EvalResult Heuristics::fail_result() const {
  EvalResult r;
  r.search_cost = 1000000;
  r.temporal_cost = Time::infinity();
  r.combined = 1e9;
  return r;
}

EvalResult Heuristics::evaluate_insertion(const GroundAction &a,
                                          int insert_level,
                                          int flawed_level) {
  std::vector<int> prev_unsched = g_->outcome().unscheduled;
  std::vector<Flaw> flaws_before = g_->find_flaws();

  g_->insert_action(a, insert_level);
  invalidate_from(insert_level);
  EvalResult result;
  bool failed = false;
  {
    std::map<int, Time> state = state_at(insert_level);
    RelaxedPlan plan;
    plan.finish = Time(0);
    auto t1 = relaxed_time_plan(a.pre, state, plan, insert_level);
    if (!t1) {
      failed = true;
    } else {
      // supports the insertion broke: new unsupported preconditions after
      // the edit level become extra goals, and their facts leave the state
      std::set<std::pair<int, int>> before;
      for (const Flaw &fl : flaws_before)
        if (fl.kind == Flaw::Propositional)
          before.insert({fl.level >= insert_level ? fl.level + 1 : fl.level,
                         fl.fact});
      std::vector<Flaw> flaws_after = g_->find_flaws();
      std::set<int> threat_set;
      int adj_flawed = flawed_level >= insert_level ? flawed_level + 1
                                                    : flawed_level;
      std::vector<int> goals2;
      std::set<int> in_goals2;
      for (const Flaw &fl : flaws_after) {
        if (fl.kind != Flaw::Propositional)
          continue;
        bool is_threat =
            fl.level > insert_level && !before.count({fl.level, fl.fact});
        if (is_threat)
          threat_set.insert(fl.fact);
        if ((is_threat || fl.level == adj_flawed) &&
            in_goals2.insert(fl.fact).second)
          goals2.push_back(fl.fact);
      }
      std::map<int, Time> state2 = state;
      for (int f : threat_set)
        state2.erase(f);
      Time a_end = g_->end_of(insert_level);
      for (int f : a.eff_add) {
        auto it = state2.find(f);
        if (it == state2.end())
          state2.emplace(f, a_end);
        else
          it->second = min(it->second, a_end);
      }
      auto t2 = relaxed_time_plan(goals2, state2, plan, insert_level);
      if (!t2) {
        failed = true;
      } else {
        Time finish = max(plan.finish, a_end);
        TemporalFlawCounts flaws = count_temporal_flaws(
            insert_level, &a, plan, prev_unsched, finish);
        result = assemble(plan, /*extra_acts=*/1, flaws, finish);
      }
    }
  }
  g_->remove_action(insert_level);
  invalidate_from(insert_level);
  return failed ? fail_result() : result;
}

EvalResult Heuristics::evaluate_removal(int remove_level, int flawed_level) {
  const GroundAction *removed = &g_->action_at(remove_level);
  std::vector<int> prev_unsched = g_->outcome().unscheduled;
  std::vector<Flaw> flaws_before = g_->find_flaws();

  g_->remove_action(remove_level);
  invalidate_from(remove_level);
  EvalResult result;
  bool failed = false;
  {
    std::set<std::pair<int, int>> before;
    for (const Flaw &fl : flaws_before)
      if (fl.kind == Flaw::Propositional)
        before.insert({fl.level > remove_level ? fl.level - 1 : fl.level,
                       fl.fact});
    int adj_flawed = flawed_level > remove_level ? flawed_level - 1
                                                 : flawed_level;
    std::vector<Flaw> flaws_after = g_->find_flaws();
    std::vector<int> goals;
    std::set<int> in_goals;
    for (const Flaw &fl : flaws_after) {
      if (fl.kind != Flaw::Propositional)
        continue;
      bool newly = !before.count({fl.level, fl.fact});
      bool remaining =
          remove_level < flawed_level && fl.level == adj_flawed;
      if ((newly || remaining) && in_goals.insert(fl.fact).second)
        goals.push_back(fl.fact);
    }
    std::map<int, Time> state = state_at(remove_level);
    RelaxedPlan plan;
    plan.finish = Time(0);
    auto t = relaxed_time_plan(goals, state, plan, remove_level);
    if (!t) {
      failed = true;
    } else {
      TemporalFlawCounts flaws =
          count_temporal_flaws(remove_level, nullptr, plan, prev_unsched, *t);
      result = assemble(plan, /*extra_acts=*/0, flaws, *t);
    }
  }
  g_->insert_action(*removed, remove_level);
  invalidate_from(remove_level);
  return failed ? fail_result() : result;
}

} // namespace tempora
