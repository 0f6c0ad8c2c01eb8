#ifndef TEMPORA_LAGRAPH_HPP
#define TEMPORA_LAGRAPH_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempora/dtp.hpp"
#include "tempora/model.hpp"

namespace tempora {

struct PlanStep {
  Time start;
  std::string name;
  std::vector<std::string> args;
  Time duration;
};

struct Plan {
  std::vector<PlanStep> steps;
  Time makespan;
};

struct Flaw {
  enum Kind { Propositional, Temporal } kind;
  int level = 0;
  int node_id = 0;       // owning action node
  int fact = -1;         // unsupported precondition (Propositional only)
  bool operator==(const Flaw &o) const {
    return kind == o.kind && level == o.level && node_id == o.node_id &&
           fact == o.fact;
  }
};

/// True iff the two actions statically interfere: one deletes a
/// precondition or add effect of the other.
bool actions_mutex(const GroundAction &a, const GroundAction &b);

/// A leveled partial plan: one action node per level between the two
/// endpoint nodes, facts carried forward between levels unless deleted, and
/// a temporal network (ordering + duration + window constraints) kept in
/// lockstep with every edit. Start times come from the network's earliest
/// solution; actions whose window constraint cannot be met stay in the plan
/// unscheduled and show up as temporal flaws.
class TdaGraph {
public:
  explicit TdaGraph(const ProblemInstance &p);
  // levels_ points at members (endpoint pseudo-actions), so the graph must
  // stay put
  TdaGraph(const TdaGraph &) = delete;
  TdaGraph &operator=(const TdaGraph &) = delete;

  int last_level() const { return (int)levels_.size() - 1; }
  int num_domain_actions() const { return last_level() - 1; }

  /// Places a at the given level (1 <= level <= last_level()); existing
  /// levels from there on shift up one.
  void insert_action(const GroundAction &a, int level);
  /// Deletes the level of a domain action node (endpoints are fixed).
  void remove_action(int level);

  const ProblemInstance &problem() const { return *inst_; }
  const GroundAction &action_at(int level) const {
    return *levels_.at(level).action;
  }
  int node_id_at(int level) const { return levels_.at(level).node_id; }
  bool is_endpoint(int level) const {
    return level == 0 || level == last_level();
  }

  /// Facts available to the action at the given level (1 <= level <= last).
  bool fact_supported(int fact, int level) const;
  /// Achievement time of a supported fact at a level: end time of its
  /// nearest earlier achiever (0 when it comes from the initial state).
  Time fact_time(int fact, int level) const;
  /// Level of the nearest earlier achiever (0 = initial state).
  int supporter_level(int fact, int level) const;

  const Dtp &dtp() const { return *dtp_; }
  const SolveOutcome &outcome() const { return outcome_; }
  Time start_of(int level) const {
    return outcome_.start_time.at(node_id_at(level));
  }
  Time end_of(int level) const {
    return outcome_.end_time.at(node_id_at(level));
  }
  bool scheduled(int level) const;

  /// Makespan bound used by the plan-improvement loop; applies to every
  /// subsequent solve.
  void set_makespan_bound(std::optional<Bound> b);

  /// All flaws, level ascending (propositional before temporal at one
  /// level).
  std::vector<Flaw> find_flaws() const;

  Plan extract_plan() const;

  /// Indented text rendering of levels, supported facts, orderings.
  std::string dump() const;

  /// Canonical structural equality (levels, node actions, orderings,
  /// schedule); node ids are ignored so edit round-trips compare equal.
  bool same_shape(const TdaGraph &o) const;

private:
  struct LevelEntry {
    int node_id;
    const GroundAction *action; // endpoint pseudo-actions owned below
  };

  void rebuild(int edit_level);

  const ProblemInstance *inst_;
  GroundAction start_action_, end_action_;
  std::vector<LevelEntry> levels_;
  int next_node_id_ = 0;

  // recomputed by rebuild()
  std::vector<std::vector<char>> supported_;  // [level][fact]
  std::vector<std::vector<int>> achiever_;    // [level][fact] achiever level
  std::vector<DtpOrderingSpec> orderings_;    // by node_id (causal + mutex)
  std::unique_ptr<Dtp> dtp_;
  SolveOutcome outcome_;
  std::optional<Bound> makespan_bound_;
};

} // namespace tempora

#endif
