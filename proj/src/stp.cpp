#include "tempora/stp.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempora {

PointId Stp::add_point(std::string label) {
  labels_.push_back(std::move(label));
  cache_.reset();
  return (int)labels_.size() - 1;
}

void Stp::assert_edge(const StpEdge &e) {
  if (e.from < 0 || e.from >= num_points() || e.to < 0 ||
      e.to >= num_points())
    throw std::out_of_range("Stp::assert_edge: unregistered point");
  edges_[{e.from, e.to}].push_back(e.bound);
  cache_.reset();
}

void Stp::retract_edge(const StpEdge &e) {
  auto it = edges_.find({e.from, e.to});
  if (it != edges_.end()) {
    auto &v = it->second;
    auto b = std::find(v.begin(), v.end(), e.bound);
    if (b != v.end()) {
      v.erase(b);
      if (v.empty())
        edges_.erase(it);
      cache_.reset();
      return;
    }
  }
  throw std::invalid_argument("Stp::retract_edge: unknown edge " +
                              label(e.from) + " -> " + label(e.to));
}

void Stp::retract_and_assert(const std::vector<StpEdge> &removed,
                             const std::vector<StpEdge> &added) {
  for (const auto &e : removed)
    retract_edge(e);
  for (const auto &e : added)
    assert_edge(e);
}

bool Stp::has_edge(const StpEdge &e) const {
  auto it = edges_.find({e.from, e.to});
  if (it == edges_.end())
    return false;
  return std::find(it->second.begin(), it->second.end(), e.bound) !=
         it->second.end();
}

std::vector<StpEdge> Stp::effective_edges() const {
  std::vector<StpEdge> out;
  for (const auto &[key, bounds] : edges_) {
    Bound best = bounds.front();
    for (const auto &b : bounds)
      if (b < best)
        best = b;
    out.push_back({key.first, key.second, best});
  }
  return out;
}

const Stp::Solved &Stp::solve() const {
  if (cache_)
    return *cache_;
  Solved s;
  int n = num_points();
  auto edges = effective_edges();
  // Distance labels carry an infinitesimal count instead of a saturating
  // strict flag: a strict edge contributes weight -epsilon on top of its
  // value, so a zero-weight cycle through a strict edge keeps descending and
  // is caught as a negative cycle. (A saturating bool would reach a fixpoint
  // and hide the inconsistency.)
  struct Label {
    Time value;
    long long eps; // number of strict edges on the path
    bool operator<(const Label &o) const {
      if (value != o.value)
        return value < o.value;
      return eps > o.eps;
    }
  };
  // The origin precedes every point, so every point carries the implicit
  // bound origin - p <= 0. Seeding all labels with (0, non-strict) encodes
  // those edges; the result is the shortest distance point -> origin in the
  // distance graph, i.e. the negated earliest time.
  std::vector<Label> dist(n, Label{Time(0), 0});
  bool changed = true;
  int pass = 0;
  for (; changed && pass <= n + 1; ++pass) {
    changed = false;
    for (const auto &e : edges) {
      // constraint: to - from <= b. Reverse-encoded relaxation:
      // dist[from] <= dist[to] + b
      Label cand{dist[e.to].value + e.bound.value,
                 dist[e.to].eps + (e.bound.strict ? 1 : 0)};
      if (cand < dist[e.from]) {
        dist[e.from] = cand;
        changed = true;
      }
    }
    // relax the implicit origin-precedes-all edges: dist[p] <= dist[origin]
    for (int p = 0; p < n; ++p) {
      if (dist[origin_] < dist[p]) {
        dist[p] = dist[origin_];
        changed = true;
      }
    }
  }
  s.consistent = !changed;
  s.reached.assign(n, true);
  s.earliest.reserve(n);
  for (const auto &l : dist)
    s.earliest.push_back(Bound{l.value, l.eps > 0});
  cache_ = std::move(s);
  return *cache_;
}

bool Stp::is_consistent() const { return solve().consistent; }

StpSolution Stp::earliest_solution() const {
  const Solved &s = solve();
  if (!s.consistent)
    throw std::logic_error("Stp::earliest_solution: inconsistent STP");
  StpSolution sol;
  sol.assignment.reserve(num_points());
  for (int p = 0; p < num_points(); ++p) {
    if (s.earliest[p].strict)
      throw std::logic_error(
          "Stp::earliest_solution: strict lower bound on " + label(p) +
          " has no attained minimum");
    sol.assignment.push_back(-s.earliest[p].value);
  }
  return sol;
}

std::vector<Time> Stp::latest_times() const {
  int n = num_points();
  auto edges = effective_edges();
  std::vector<Bound> dist(n, Bound{Time::infinity(), false});
  std::vector<bool> reached(n, false);
  dist[origin_] = {Time(0), false};
  reached[origin_] = true;
  for (int pass = 0; pass < n + 1; ++pass) {
    bool changed = false;
    for (const auto &e : edges) {
      if (!reached[e.from])
        continue;
      Bound cand = dist[e.from] + e.bound;
      if (!reached[e.to] || cand < dist[e.to]) {
        dist[e.to] = cand;
        reached[e.to] = true;
        changed = true;
      }
    }
    if (!changed)
      break;
  }
  std::vector<Time> out(n, Time::infinity());
  for (int p = 0; p < n; ++p)
    if (reached[p])
      out[p] = dist[p].value;
  return out;
}

} // namespace tempora
