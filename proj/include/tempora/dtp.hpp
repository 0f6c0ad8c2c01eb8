#ifndef TEMPORA_DTP_HPP
#define TEMPORA_DTP_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempora/model.hpp"
#include "tempora/stp.hpp"

namespace tempora {

/// One node of the leveled plan structure as the scheduler sees it: a pair of
/// time points (start, end) with a fixed duration, optionally constrained to
/// execute inside one of a set of disjoint time windows.
struct DtpNodeSpec {
  int node_id = 0; // stable identity across level shifts
  int level = 0;   // 0 = plan start node, max = plan end node
  Time duration;
  std::vector<TimeWindow> windows; // nonempty => disjunctive constraint
  std::string label;
};

/// from's end point precedes to's start point (end(from) - start(to) <= 0).
struct DtpOrderingSpec {
  int from = 0;
  int to = 0;
  bool operator==(const DtpOrderingSpec &o) const {
    return from == o.from && to == o.to;
  }
  bool operator<(const DtpOrderingSpec &o) const {
    return from != o.from ? from < o.from : to < o.to;
  }
};

/// A disjunctive scheduling constraint: the node must execute inside one of
/// the windows. Window w expands to the conjunct pair
///   start(node) >= w.lo  and  end(node) <= w.hi (strict when hi_strict).
struct SchedulingConstraint {
  int node_id = 0;
  int level = 0;
  std::vector<TimeWindow> disjuncts; // sorted by lo ascending
};

/// A meta-variable of the constraint-selection view: every constraint of the
/// problem is one variable; non-disjunctive constraints have a single value.
struct MetaVar {
  enum Kind { Duration, Ordering, Scheduling } kind;
  int node_id = 0;      // owning node (Duration/Scheduling)
  int from = 0, to = 0; // endpoints (Ordering)
  int level = 0;        // level at which the constraint is introduced
  int domain_size = 1;
  std::string name;
};

struct MetaAssignment {
  // node_id -> chosen window, or nullopt when the constraint is
  // unsatisfiable under the rest (the node stays unscheduled)
  std::map<int, std::optional<TimeWindow>> choice;
};

struct SolveOutcome {
  MetaAssignment assignment;
  bool complete = false;
  std::map<int, Time> start_time; // by node_id; from the induced STP
  std::map<int, Time> end_time;
  Time makespan;                 // start of the plan end node
  std::vector<int> unscheduled;  // node_ids whose constraint got no window
  std::map<int, std::vector<TimeWindow>> pruned; // removed by forward checking
  long long backtracks = 0;

  bool equivalent(const SolveOutcome &o) const {
    return assignment.choice == o.assignment.choice &&
           complete == o.complete && start_time == o.start_time &&
           end_time == o.end_time && unscheduled == o.unscheduled;
  }
};

/// The temporal side of a leveled plan graph: ordering and duration
/// constraints (a simple temporal problem) plus at most one disjunctive
/// scheduling constraint per level. Immutable once built; the graph layer
/// rebuilds it after each edit and reuses previous scheduling choices
/// through incremental_solve.
class Dtp {
public:
  Dtp(std::vector<DtpNodeSpec> nodes, std::vector<DtpOrderingSpec> orderings);

  /// Extra background bound end-of-plan < / <= value (used by the
  /// plan-improvement loop to force strictly better makespans).
  void set_makespan_bound(std::optional<Bound> b) { makespan_bound_ = b; }
  const std::optional<Bound> &makespan_bound() const {
    return makespan_bound_;
  }

  const std::vector<DtpNodeSpec> &nodes() const { return nodes_; }
  const std::vector<DtpOrderingSpec> &orderings() const { return orderings_; }
  const std::vector<SchedulingConstraint> &sched() const { return sched_; }
  int plan_start_id() const { return nodes_.front().node_id; }
  int plan_end_id() const { return nodes_.back().node_id; }
  int last_level() const { return nodes_.back().level; }

  /// Ordered partition X_1 ... X_last of all meta-variables by the level at
  /// which each constraint is introduced (max level of its endpoints).
  /// Index 0 of the result is level 1; level-0 background constraints of the
  /// plan start node are not variables.
  std::vector<std::vector<MetaVar>> partition_meta_variables() const;

  /// Backtrack-free solve: singleton variables first, then scheduling
  /// variables in level order; values tried earliest-start first with one
  /// forward check per variable. Unsatisfiable constraints are dropped
  /// (their node is reported unscheduled) and processing continues, so a
  /// partial schedule is always produced. The returned start times are the
  /// earliest consistent ones; with all constraints satisfied the plan end
  /// time is minimal. Throws std::logic_error if the ordering + duration
  /// constraints alone are inconsistent.
  SolveOutcome solve_plus() const;

  /// Same result as solve_plus from scratch, but scheduling choices of
  /// levels strictly below edit_level are reused from prev (keyed by
  /// node_id) instead of searched for.
  SolveOutcome incremental_solve(const SolveOutcome &prev,
                                 int edit_level) const;

  /// Chronological-backtracking reference solver over the same variable and
  /// value ordering; counts backtracks (assignments undone after a failed
  /// subtree) and optionally records a search trace. Unlike solve_plus it
  /// fails globally when some constraint cannot be satisfied.
  std::optional<SolveOutcome>
  solve_backtracking(std::vector<std::string> *trace = nullptr) const;

  /// Equality of structure (nodes, orderings, scheduling constraints);
  /// used to check that edit sequences keep the graph and its temporal
  /// problem in lockstep.
  bool same_structure(const Dtp &o) const;

  /// The constraint set with every disjunctive constraint expanded into the
  /// equivalent conjunction of binary-disjunction clauses (one inequality
  /// chosen per window, 2^m clauses for m windows), as text.
  std::string classical_form() const;

private:
  struct Solver;
  SolveOutcome run(const SolveOutcome *prev, int edit_level,
                   bool backtracking, std::vector<std::string> *trace,
                   bool &unsat) const;

  std::vector<DtpNodeSpec> nodes_; // sorted by level
  std::vector<DtpOrderingSpec> orderings_;
  std::vector<SchedulingConstraint> sched_;
  std::map<int, int> index_of_; // node_id -> index in nodes_
  std::optional<Bound> makespan_bound_;
};

} // namespace tempora

#endif
