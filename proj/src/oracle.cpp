#include "tempora/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <tuple>

#include "tempora/stp.hpp"
#include "tempora/validate.hpp"

namespace tempora {

namespace {

// Background temporal network of a Dtp (everything except the disjunctive
// window choices), built independently on top of the plain STP solver.
struct Network {
  Stp stp;
  std::map<int, PointId> start, end; // node_id -> point
};

Network background_network(const Dtp &d) {
  Network n;
  const auto &nodes = d.nodes();
  for (const auto &nd : nodes) {
    n.start[nd.node_id] = n.stp.add_point("s" + std::to_string(nd.node_id));
    n.end[nd.node_id] = n.stp.add_point("e" + std::to_string(nd.node_id));
  }
  PointId origin = n.stp.origin();
  PointId s0 = n.start.at(d.plan_start_id());
  PointId e0 = n.end.at(d.plan_start_id());
  PointId sz = n.start.at(d.plan_end_id());
  for (const auto &nd : nodes) {
    PointId s = n.start.at(nd.node_id), e = n.end.at(nd.node_id);
    n.stp.assert_edge({s, e, {nd.duration, false}});
    n.stp.assert_edge({e, s, {-nd.duration, false}});
    if (nd.node_id != d.plan_start_id())
      n.stp.assert_edge({s, e0, {Time(0), false}}); // after the plan start
    if (nd.node_id != d.plan_end_id())
      n.stp.assert_edge({sz, e, {Time(0), false}}); // before the plan end
  }
  n.stp.assert_edge({origin, s0, {Time(0), false}}); // plan start pinned at 0
  for (const auto &o : d.orderings())
    n.stp.assert_edge({n.start.at(o.to), n.end.at(o.from), {Time(0), false}});
  return n;
}

// The plan-length bound is added separately: when even the empty schedule
// violates it, the plan end node counts as unscheduled rather than making
// the whole network inconsistent (mirrors the incremental solver).
bool apply_bound(const Dtp &d, Network &n) {
  if (!d.makespan_bound())
    return true;
  StpEdge e{n.stp.origin(), n.start.at(d.plan_end_id()), *d.makespan_bound()};
  n.stp.assert_edge(e);
  if (n.stp.is_consistent())
    return true;
  n.stp.retract_edge(e);
  return false;
}

std::vector<StpEdge> window_edges(const Network &n, int node_id,
                                  const TimeWindow &w) {
  std::vector<StpEdge> es;
  es.push_back({n.start.at(node_id), n.stp.origin(), {-w.lo, w.lo_strict}});
  if (!w.hi.is_infinite())
    es.push_back({n.stp.origin(), n.end.at(node_id), {w.hi, w.hi_strict}});
  return es;
}

SolveOutcome outcome_from(const Dtp &d, const Network &n,
                          const MetaAssignment &choice, bool complete,
                          std::vector<int> unscheduled) {
  SolveOutcome out;
  out.assignment = choice;
  out.complete = complete;
  out.unscheduled = std::move(unscheduled);
  StpSolution sol = n.stp.earliest_solution();
  for (const auto &nd : d.nodes()) {
    out.start_time[nd.node_id] = sol.at(n.start.at(nd.node_id));
    out.end_time[nd.node_id] = sol.at(n.end.at(nd.node_id));
  }
  out.makespan = out.start_time.at(d.plan_end_id());
  return out;
}

} // namespace

SolveOutcome brute_dtp(const Dtp &d) {
  const auto &cons = d.sched();
  long long combos = 1;
  for (const auto &c : cons) {
    combos *= (long long)c.disjuncts.size();
    if (combos > 100000)
      throw std::length_error("brute_dtp: combination budget exceeded");
  }

  Network net = background_network(d);
  bool bound_met = apply_bound(d, net);
  std::optional<SolveOutcome> best;
  std::vector<std::size_t> pick(cons.size(), 0);
  for (long long it = 0; bound_met && it < combos; ++it) {
    std::vector<StpEdge> added;
    for (std::size_t i = 0; i < cons.size(); ++i)
      for (const auto &e :
           window_edges(net, cons[i].node_id, cons[i].disjuncts[pick[i]]))
        added.push_back(e);
    for (const auto &e : added)
      net.stp.assert_edge(e);
    if (net.stp.is_consistent()) {
      MetaAssignment a;
      for (std::size_t i = 0; i < cons.size(); ++i)
        a.choice[cons[i].node_id] = cons[i].disjuncts[pick[i]];
      SolveOutcome out = outcome_from(d, net, a, true, {});
      if (!best || out.makespan < best->makespan)
        best = out;
    }
    for (const auto &e : added)
      net.stp.retract_edge(e);
    // advance the odometer
    for (std::size_t i = cons.size(); i-- > 0;) {
      if (++pick[i] < cons[i].disjuncts.size())
        break;
      pick[i] = 0;
    }
  }
  if (best)
    return *best;

  // No complete combination is consistent: build a greedy partial schedule,
  // meaningful only as an unsatisfiability witness.
  MetaAssignment a;
  std::vector<int> unscheduled;
  if (!bound_met)
    unscheduled.push_back(d.plan_end_id());
  for (const auto &c : cons) {
    bool placed = false;
    for (const auto &w : c.disjuncts) {
      auto es = window_edges(net, c.node_id, w);
      for (const auto &e : es)
        net.stp.assert_edge(e);
      if (net.stp.is_consistent()) {
        a.choice[c.node_id] = w;
        placed = true;
        break;
      }
      for (const auto &e : es)
        net.stp.retract_edge(e);
    }
    if (!placed) {
      a.choice[c.node_id] = std::nullopt;
      unscheduled.push_back(c.node_id);
    }
  }
  return outcome_from(d, net, a, false, std::move(unscheduled));
}

std::optional<Time> classical_dtp_makespan(const Dtp &d) {
  // One inequality of one window: either the lower bound on the start point
  // or the upper bound on the end point.
  struct Literal {
    int node_id;
    TimeWindow window;
    bool lower; // true: start >= lo, false: end <(=) hi
    bool operator<(const Literal &o) const {
      auto key = [](const Literal &l) {
        return std::tuple(l.node_id, l.window.lo, l.window.hi,
                          l.window.lo_strict, l.window.hi_strict, l.lower);
      };
      return key(*this) < key(o);
    }
  };
  std::vector<std::vector<Literal>> clauses;
  for (const auto &c : d.sched()) {
    std::size_t m = c.disjuncts.size();
    if (m > 16)
      throw std::length_error("classical_dtp_makespan: too many windows");
    for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
      std::vector<Literal> clause;
      for (std::size_t i = 0; i < m; ++i)
        clause.push_back({c.node_id, c.disjuncts[i], (mask >> i & 1) != 0});
      clauses.push_back(std::move(clause));
    }
  }
  if (clauses.size() > 64)
    throw std::length_error("classical_dtp_makespan: too many clauses");

  Network net = background_network(d);
  if (!apply_bound(d, net))
    return std::nullopt; // the conjunction is unsatisfiable outright
  if (!net.stp.is_consistent())
    return std::nullopt;

  auto edges_of = [&](const Literal &l) {
    std::vector<StpEdge> es;
    if (l.lower) {
      es.push_back({net.start.at(l.node_id), net.stp.origin(),
                    {-l.window.lo, l.window.lo_strict}});
    } else if (!l.window.hi.is_infinite()) {
      es.push_back({net.stp.origin(), net.end.at(l.node_id),
                    {l.window.hi, l.window.hi_strict}});
    }
    return es;
  };

  std::optional<Time> best;
  std::set<Literal> asserted;
  long long visits = 0;
  std::function<void(std::size_t)> dfs = [&](std::size_t k) {
    if (++visits > 2000000)
      throw std::length_error("classical_dtp_makespan: search budget "
                              "exceeded");
    if (k == clauses.size()) {
      Time mk =
          net.stp.earliest_solution().at(net.start.at(d.plan_end_id()));
      if (!best || mk < *best)
        best = mk;
      return;
    }
    for (const auto &l : clauses[k])
      if (asserted.count(l)) { // clause already satisfied
        dfs(k + 1);
        return;
      }
    for (const auto &l : clauses[k]) {
      auto es = edges_of(l);
      for (const auto &e : es)
        net.stp.assert_edge(e);
      if (net.stp.is_consistent()) {
        asserted.insert(l);
        dfs(k + 1);
        asserted.erase(l);
      }
      for (const auto &e : es)
        net.stp.retract_edge(e);
    }
  };
  dfs(0);
  return best;
}

std::optional<Plan> brute_plan(const ProblemInstance &p, int max_actions) {
  long long n = (long long)p.actions.size();
  long long sequences = 1, pow = 1;
  for (int k = 1; k <= max_actions; ++k) {
    pow *= n;
    sequences += pow;
    if (sequences > 200000)
      throw std::length_error("brute_plan: sequence budget exceeded");
  }

  TdaGraph g(p);
  std::optional<Plan> best;
  std::function<void(int)> dfs = [&](int depth) {
    if (g.find_flaws().empty()) {
      Plan plan = g.extract_plan();
      if (validate_plan(p, plan).valid &&
          (!best || plan.makespan < best->makespan))
        best = plan;
    }
    if (depth == max_actions)
      return;
    for (const auto &a : p.actions) {
      g.insert_action(a, depth + 1);
      dfs(depth + 1);
      g.remove_action(depth + 1);
    }
  };
  dfs(0);
  return best;
}

} // namespace tempora
