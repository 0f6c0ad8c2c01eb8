#ifndef TEMPORA_STP_HPP
#define TEMPORA_STP_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempora/time.hpp"

namespace tempora {

using PointId = int;

/// Lexicographic edge weight under min-plus algebra: (value, strict). A
/// strict bound (k, true) encodes `x < k` and is tighter than (k, false).
struct Bound {
  Time value;
  bool strict = false;

  friend Bound operator+(const Bound &a, const Bound &b) {
    return {a.value + b.value, a.strict || b.strict};
  }
  friend bool operator<(const Bound &a, const Bound &b) {
    if (a.value != b.value)
      return a.value < b.value;
    return a.strict && !b.strict;
  }
  friend bool operator==(const Bound &a, const Bound &b) {
    return a.value == b.value && a.strict == b.strict;
  }
};

struct StpEdge {
  PointId from;
  PointId to;
  Bound bound; // to - from <= value  (or < when strict)

  bool operator==(const StpEdge &o) const {
    return from == o.from && to == o.to && bound == o.bound;
  }
};

struct StpSolution {
  std::vector<Time> assignment; // by PointId; origin = 0
  Time at(PointId p) const { return assignment.at(p); }
};

/// Simple Temporal Problem with strict-inequality edges. Consistency is
/// negative-cycle detection (a zero cycle through a strict edge counts as
/// negative); earliest times are shortest distances from the origin in the
/// reverse-encoded distance graph, all in exact arithmetic.
class Stp {
public:
  Stp() { origin_ = add_point("origin"); }

  PointId add_point(std::string label);
  PointId origin() const { return origin_; }
  int num_points() const { return (int)labels_.size(); }
  const std::string &label(PointId p) const { return labels_.at(p); }

  /// Stores the edge. Parallel asserted edges are kept individually (so they
  /// can be retracted); the effective constraint is the tightest of them.
  void assert_edge(const StpEdge &e);
  /// Removes one previously asserted occurrence; throws on unknown edge.
  void retract_edge(const StpEdge &e);
  void retract_and_assert(const std::vector<StpEdge> &removed,
                          const std::vector<StpEdge> &added);

  bool has_edge(const StpEdge &e) const;
  std::vector<StpEdge> effective_edges() const;

  bool is_consistent() const;
  /// Minimal feasible time per point, origin = 0. Throws if inconsistent.
  StpSolution earliest_solution() const;
  /// Maximal feasible time per point (infinity when unbounded).
  /// Only meaningful for a consistent STP.
  std::vector<Time> latest_times() const;

private:
  struct Solved {
    bool consistent;
    std::vector<Bound> earliest; // -shortest distance point->origin
    std::vector<bool> reached;
  };
  const Solved &solve() const;

  PointId origin_;
  std::vector<std::string> labels_;
  // (from,to) -> multiset of asserted bounds
  std::map<std::pair<PointId, PointId>, std::vector<Bound>> edges_;
  mutable std::optional<Solved> cache_;
};

} // namespace tempora

#endif
