#include "tempora/dtp.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

namespace tempora {

namespace {

// v - u <= w (minus eps infinitesimals when strict edges are involved)
struct Edge {
  int u, v;
  Time w;
  int eps;
};

struct Label {
  Time value;
  long long eps; // strict-edge count; larger = smaller under the order
  bool operator<(const Label &o) const {
    if (value != o.value)
      return value < o.value;
    return eps > o.eps;
  }
  bool operator==(const Label &o) const {
    return value == o.value && eps == o.eps;
  }
};

std::string window_text(const TimeWindow &w) { return w.to_string(); }

} // namespace

// Incremental shortest-path engine over the reverse-encoded distance graph:
// dist[p] is the shortest distance p -> time-origin, so the earliest time of
// p is -dist[p]. All labels start at (0,0), which encodes that no point may
// precede the time origin. Adding edges only ever lowers labels, so a
// snapshot of the label vector plus the edge-list length is enough to undo a
// tentative assertion.
struct Dtp::Solver {
  int npts;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> in_at; // edge indices by their v endpoint
  std::vector<Label> dist;
  std::vector<int> chain_len;

  explicit Solver(int n)
      : npts(n), in_at(n), dist(n, Label{Time(0), 0}), chain_len(n, 0) {}

  void add(int u, int v, Time w, int eps) {
    edges.push_back({u, v, std::move(w), eps});
    in_at[edges.back().v].push_back((int)edges.size() - 1);
  }

  struct Snapshot {
    std::vector<Label> dist;
    std::size_t n_edges;
  };
  Snapshot snapshot() const { return {dist, edges.size()}; }
  void restore(const Snapshot &s) {
    dist = s.dist;
    while (edges.size() > s.n_edges) {
      in_at[edges.back().v].pop_back();
      edges.pop_back();
    }
  }

  // Relaxes from the edges added since `first`; false on a negative cycle
  // (a relaxation chain longer than the point count), leaving labels dirty.
  bool propagate(std::size_t first) {
    std::fill(chain_len.begin(), chain_len.end(), 0);
    std::deque<int> queue;
    std::vector<char> queued(npts, 0);
    auto relax = [&](const Edge &e, int via_len) -> bool {
      Label cand{dist[e.v].value + e.w, dist[e.v].eps + e.eps};
      if (cand < dist[e.u]) {
        // Point 0 is the time origin; every point implicitly follows it, so
        // a label below (0,0) on it closes a negative cycle through those
        // implicit edges.
        if (e.u == 0 && cand < Label{Time(0), 0})
          return false;
        dist[e.u] = cand;
        chain_len[e.u] = via_len + 1;
        if (chain_len[e.u] > npts)
          return false;
        if (!queued[e.u]) {
          queued[e.u] = 1;
          queue.push_back(e.u);
        }
      }
      return true;
    };
    for (std::size_t i = first; i < edges.size(); ++i)
      if (!relax(edges[i], chain_len[edges[i].v]))
        return false;
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop_front();
      queued[p] = 0;
      for (int ei : in_at[p])
        if (!relax(edges[ei], chain_len[p]))
          return false;
    }
    return true;
  }

  bool assert_and_check(std::vector<Edge> add_edges) {
    std::size_t first = edges.size();
    for (auto &e : add_edges)
      add(e.u, e.v, std::move(e.w), e.eps);
    return propagate(first);
  }
};

Dtp::Dtp(std::vector<DtpNodeSpec> nodes,
         std::vector<DtpOrderingSpec> orderings)
    : nodes_(std::move(nodes)), orderings_(std::move(orderings)) {
  std::stable_sort(nodes_.begin(), nodes_.end(),
                   [](const DtpNodeSpec &a, const DtpNodeSpec &b) {
                     return a.level < b.level;
                   });
  if (nodes_.size() < 2)
    throw std::invalid_argument("Dtp: need at least the two endpoint nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_of_.emplace(nodes_[i].node_id, (int)i).second)
      throw std::invalid_argument("Dtp: duplicate node_id");
    if (nodes_[i].level != (int)i)
      throw std::invalid_argument("Dtp: levels must be 0..last, one node each");
  }
  for (const auto &o : orderings_)
    if (!index_of_.count(o.from) || !index_of_.count(o.to))
      throw std::invalid_argument("Dtp: ordering references unknown node");
  for (const auto &n : nodes_) {
    if (n.windows.empty())
      continue;
    SchedulingConstraint c;
    c.node_id = n.node_id;
    c.level = n.level;
    c.disjuncts = n.windows;
    std::stable_sort(c.disjuncts.begin(), c.disjuncts.end(),
                     [](const TimeWindow &a, const TimeWindow &b) {
                       return a.lo < b.lo;
                     });
    sched_.push_back(std::move(c));
  }
}

bool Dtp::same_structure(const Dtp &o) const {
  auto key = [](const Dtp &d) {
    std::vector<std::tuple<int, int, std::string, std::vector<TimeWindow>>> k;
    for (const auto &n : d.nodes_)
      k.emplace_back(n.node_id, n.level, n.duration.to_string(), n.windows);
    return k;
  };
  auto ords = [](const Dtp &d) {
    auto v = d.orderings_;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  return key(*this) == key(o) && ords(*this) == ords(o);
}

std::vector<std::vector<MetaVar>> Dtp::partition_meta_variables() const {
  int last = last_level();
  std::vector<std::vector<MetaVar>> parts(std::max(last, 0));
  auto part_of = [&](int level) -> std::vector<MetaVar> & {
    return parts.at(std::max(level, 1) - 1);
  };
  // ordering and duration constraints have a single value; scheduling
  // constraints contribute one variable per level with their window count
  for (std::size_t i = 1; i + 1 < nodes_.size(); ++i) {
    MetaVar v;
    v.kind = MetaVar::Duration;
    v.node_id = nodes_[i].node_id;
    v.level = nodes_[i].level;
    v.name = "dur(" + nodes_[i].label + ")";
    part_of(v.level).push_back(v);
  }
  for (const auto &o : orderings_) {
    MetaVar v;
    v.kind = MetaVar::Ordering;
    v.from = o.from;
    v.to = o.to;
    v.level = std::max(nodes_[index_of_.at(o.from)].level,
                       nodes_[index_of_.at(o.to)].level);
    v.name = "ord(" + nodes_[index_of_.at(o.from)].label + "," +
             nodes_[index_of_.at(o.to)].label + ")";
    part_of(v.level).push_back(v);
  }
  for (const auto &c : sched_) {
    MetaVar v;
    v.kind = MetaVar::Scheduling;
    v.node_id = c.node_id;
    v.level = c.level;
    v.domain_size = (int)c.disjuncts.size();
    v.name = "sched(" + nodes_[index_of_.at(c.node_id)].label + ")";
    part_of(v.level).push_back(v);
  }
  // within a level: single-valued variables first, disjunctive ones last
  for (auto &p : parts)
    std::stable_sort(p.begin(), p.end(),
                     [](const MetaVar &a, const MetaVar &b) {
                       return (a.domain_size > 1) < (b.domain_size > 1);
                     });
  return parts;
}

SolveOutcome Dtp::run(const SolveOutcome *prev, int edit_level,
                      bool backtracking, std::vector<std::string> *trace,
                      bool &unsat) const {
  unsat = false;
  int n = (int)nodes_.size();
  const int origin = 0;
  auto start_pt = [&](int idx) { return 1 + 2 * idx; };
  auto end_pt = [&](int idx) { return 2 + 2 * idx; };

  Solver sv(1 + 2 * n);
  for (int i = 0; i < n; ++i) {
    sv.add(start_pt(i), end_pt(i), nodes_[i].duration, 0);
    sv.add(end_pt(i), start_pt(i), -nodes_[i].duration, 0);
    if (i != 0)
      sv.add(start_pt(i), end_pt(0), Time(0), 0); // after the plan start
    if (i != n - 1)
      sv.add(start_pt(n - 1), end_pt(i), Time(0), 0); // before the plan end
  }
  sv.add(origin, start_pt(0), Time(0), 0); // plan start pinned at time 0
  for (const auto &o : orderings_)
    sv.add(start_pt(index_of_.at(o.to)), end_pt(index_of_.at(o.from)),
           Time(0), 0);
  if (!sv.propagate(0))
    throw std::logic_error(
        "Dtp: ordering and duration constraints alone are inconsistent");
  // the extra plan-length bound is not a background invariant: when the
  // graph is already too long for it, the plan end node goes unscheduled
  // (a repairable temporal flaw) instead of failing the whole network
  bool bound_unmet = false;
  if (makespan_bound_) {
    auto snap = sv.snapshot();
    if (!sv.assert_and_check({{origin, start_pt(n - 1),
                               makespan_bound_->value,
                               makespan_bound_->strict ? 1 : 0}})) {
      sv.restore(snap);
      bound_unmet = true;
    }
  }

  if (trace)
    for (const auto &part : partition_meta_variables())
      for (const auto &v : part)
        if (v.domain_size == 1 && v.kind != MetaVar::Scheduling)
          trace->push_back("assert " + v.name);

  // conjunct pair of one window of one node
  auto window_edges = [&](int idx, const TimeWindow &w) {
    std::vector<Edge> es;
    es.push_back({start_pt(idx), origin, -w.lo, w.lo_strict ? 1 : 0});
    if (!w.hi.is_infinite())
      es.push_back({origin, end_pt(idx), w.hi, w.hi_strict ? 1 : 0});
    return es;
  };

  // selection order: single-window constraints first, then disjunctive ones,
  // each group by level ascending
  std::vector<const SchedulingConstraint *> order;
  for (const auto &c : sched_)
    if (c.disjuncts.size() == 1)
      order.push_back(&c);
  for (const auto &c : sched_)
    if (c.disjuncts.size() > 1)
      order.push_back(&c);

  SolveOutcome out;
  auto name_of = [&](const SchedulingConstraint *c) {
    return "sched(" + nodes_[index_of_.at(c->node_id)].label + ")";
  };
  if (bound_unmet) {
    if (backtracking) {
      unsat = true;
      return out;
    }
    out.unscheduled.push_back(nodes_.back().node_id);
  }

  if (!backtracking) {
    for (const SchedulingConstraint *c : order) {
      if (trace)
        trace->push_back("select " + name_of(c));
      std::optional<TimeWindow> reused;
      if (prev && c->level < edit_level) {
        auto it = prev->assignment.choice.find(c->node_id);
        if (it != prev->assignment.choice.end()) {
          if (!it->second) {
            // was unsatisfiable below the edited level: stays dropped
            out.assignment.choice[c->node_id] = std::nullopt;
            out.unscheduled.push_back(c->node_id);
            continue;
          }
          reused = it->second;
        }
      }
      bool assigned = false;
      if (reused) {
        auto snap = sv.snapshot();
        if (sv.assert_and_check(
                window_edges(index_of_.at(c->node_id), *reused))) {
          out.assignment.choice[c->node_id] = *reused;
          if (trace)
            trace->push_back("reuse " + name_of(c) + " " +
                             window_text(*reused));
          assigned = true;
        } else {
          sv.restore(snap);
        }
      }
      for (std::size_t k = 0; !assigned && k < c->disjuncts.size(); ++k) {
        const TimeWindow &w = c->disjuncts[k];
        auto snap = sv.snapshot();
        if (sv.assert_and_check(window_edges(index_of_.at(c->node_id), w))) {
          out.assignment.choice[c->node_id] = w;
          if (trace)
            trace->push_back("assign " + name_of(c) + " " + window_text(w));
          assigned = true;
        } else {
          sv.restore(snap);
          out.pruned[c->node_id].push_back(w);
          if (trace)
            trace->push_back("prune " + name_of(c) + " " + window_text(w));
        }
      }
      if (!assigned) {
        out.assignment.choice[c->node_id] = std::nullopt;
        out.unscheduled.push_back(c->node_id);
        if (trace)
          trace->push_back("drop " + name_of(c));
      }
    }
  } else {
    std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
      if (k == order.size())
        return true;
      const SchedulingConstraint *c = order[k];
      if (trace)
        trace->push_back("select " + name_of(c));
      for (const TimeWindow &w : c->disjuncts) {
        auto snap = sv.snapshot();
        if (!sv.assert_and_check(window_edges(index_of_.at(c->node_id), w))) {
          sv.restore(snap);
          if (trace)
            trace->push_back("prune " + name_of(c) + " " + window_text(w));
          continue;
        }
        if (trace)
          trace->push_back("assign " + name_of(c) + " " + window_text(w));
        out.assignment.choice[c->node_id] = w;
        if (search(k + 1))
          return true;
        sv.restore(snap);
        out.assignment.choice.erase(c->node_id);
        ++out.backtracks;
        if (trace)
          trace->push_back("backtrack " + name_of(c) + " " + window_text(w));
      }
      return false;
    };
    if (!search(0)) {
      unsat = true;
      return out;
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int pt : {start_pt(i), end_pt(i)})
      if (sv.dist[pt].eps > 0)
        throw std::logic_error("Dtp: strict lower bound on " +
                               nodes_[i].label +
                               " leaves no attained minimum");
    out.start_time[nodes_[i].node_id] = -sv.dist[start_pt(i)].value;
    out.end_time[nodes_[i].node_id] = -sv.dist[end_pt(i)].value;
  }
  out.makespan = out.start_time.at(plan_end_id());
  out.complete = out.unscheduled.empty();
  return out;
}

SolveOutcome Dtp::solve_plus() const {
  bool unsat = false;
  return run(nullptr, 0, false, nullptr, unsat);
}

SolveOutcome Dtp::incremental_solve(const SolveOutcome &prev,
                                    int edit_level) const {
  bool unsat = false;
  return run(&prev, edit_level, false, nullptr, unsat);
}

std::optional<SolveOutcome>
Dtp::solve_backtracking(std::vector<std::string> *trace) const {
  bool unsat = false;
  SolveOutcome out = run(nullptr, 0, true, trace, unsat);
  if (unsat)
    return std::nullopt;
  return out;
}

std::string Dtp::classical_form() const {
  std::string s;
  auto pt = [&](int node_id, bool end) {
    const auto &n = nodes_[index_of_.at(node_id)];
    return (end ? "end(" : "start(") + n.label + ")";
  };
  for (const auto &n : nodes_)
    s += pt(n.node_id, true) + " - " + pt(n.node_id, false) + " = " +
         n.duration.to_string() + "\n";
  for (const auto &o : orderings_)
    s += pt(o.from, true) + " - " + pt(o.to, false) + " <= 0\n";
  for (const auto &c : sched_) {
    // each window is a conjunction (lower, upper); the disjunction over m
    // windows expands into 2^m clauses picking one inequality per window
    std::vector<std::pair<std::string, std::string>> lits;
    for (const auto &w : c.disjuncts) {
      std::string lower = "0 - " + pt(c.node_id, false) +
                          (w.lo_strict ? " < " : " <= ") +
                          (-w.lo).to_string();
      std::string upper =
          w.hi.is_infinite()
              ? std::string()
              : pt(c.node_id, true) + " - 0" +
                    (w.hi_strict ? " < " : " <= ") + w.hi.to_string();
      lits.emplace_back(lower, upper);
    }
    if (lits.size() > 16)
      throw std::length_error("classical_form: too many windows to expand");
    for (unsigned mask = 0; mask < (1u << lits.size()); ++mask) {
      std::string clause;
      bool satisfied = false;
      for (std::size_t i = 0; i < lits.size(); ++i) {
        const std::string &lit = (mask >> i) & 1 ? lits[i].second
                                                 : lits[i].first;
        if (lit.empty()) { // trivially true upper bound (no deadline)
          satisfied = true;
          break;
        }
        if (!clause.empty())
          clause += "  v  ";
        clause += lit;
      }
      if (!satisfied)
        s += clause + "\n";
    }
  }
  return s;
}

} // namespace tempora
