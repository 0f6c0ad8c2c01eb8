#ifndef TEMPORA_HEURISTICS_HPP
#define TEMPORA_HEURISTICS_HPP

#include <map>
#include <optional>
#include <vector>

#include "tempora/lagraph.hpp"
#include "tempora/model.hpp"

namespace tempora {

/// Delete-free reachability estimates from a timed base state: per fact the
/// estimated minimum achiever count, earliest achievement time and best
/// achiever; per action the estimated minimum supporting-action count and a
/// lower bound on its earliest finishing time under its window constraint.
struct ReachabilityTable {
  static constexpr long long kUnreachable = -1;

  std::vector<long long> fact_num_acts; // kUnreachable when not reachable
  std::vector<Time> fact_et;
  std::vector<int> fact_action; // best achiever action index; -1 = base state
  std::vector<long long> act_num_acts;
  std::vector<Time> act_eft;
  std::vector<Time> act_lft;

  bool fact_reachable(int f) const {
    return fact_num_acts.at(f) != kUnreachable;
  }
  bool action_reachable(int a) const {
    return act_num_acts.at(a) != kUnreachable;
  }
};

/// Earliest finishing time of a when its preconditions are ready at t: the
/// least finish >= t + Dur(a) placing the whole execution inside one of a's
/// windows; t + Dur(a) when a has no windows or none fits.
Time compute_eft(const GroundAction &a, const Time &t);
/// Upper end of a's last window; infinity without windows.
Time compute_lft(const GroundAction &a);
/// Whether an execution finishing at eft can meet the last-window deadline.
bool eft_within_lft(const GroundAction &a, const Time &eft);

/// Number of a's timed preconditions (original at-start/at-end/over-all
/// formulation) that hold in none of their windows for an execution over
/// [start, end].
int unsatisfied_timed_preconditions(const GroundAction &a, const Time &start,
                                    const Time &end);

/// Fixpoint reachability pass over all actions from the given timed state
/// (fact id -> time it becomes true). Actions are re-applied whenever a
/// precondition's earliest time drops; actions whose earliest finish
/// exceeds their deadline contribute nothing.
ReachabilityTable
reachability_information(const ProblemInstance &p,
                         const std::map<int, Time> &state);

/// Minimum size of an action set achieving the goals from the state by the
/// best-achiever backward walk; nullopt when some goal is unreachable.
std::optional<long long> required_actions(const ProblemInstance &p,
                                          const std::map<int, Time> &state,
                                          const std::vector<int> &goals,
                                          const ReachabilityTable &table);

/// Maximum time the start of the node at level_i can be pushed back without
/// the node at level_j leaving its chosen execution window, measured in the
/// ordering+duration network plus only level_j's window. Infinity when
/// level_j has no window constraint or is not downstream of level_i.
Time slack(const TdaGraph &g, int level_i, int level_j);

struct RelaxedPlan {
  std::vector<const GroundAction *> acts; // in selection order
  Time finish;
  std::map<const GroundAction *, Time> start_est;
  std::map<const GroundAction *, Time> finish_est;
};

struct TemporalFlawCounts {
  int broken_existing = 0;   // (I) graph nodes that would lose their schedule
  int unsatisfied_timed = 0; // (II) timed preconditions of the edited action
  int plan_unschedulable = 0; // (III) relaxed-plan actions missing windows
  int total() const {
    return broken_existing + unsatisfied_timed + plan_unschedulable;
  }
};

/// Score breakdown of one candidate achiever for a subgoal.
struct CandidateScore {
  long long num_acts = 0;        // estimated actions to support it
  long long threats = 0;         // supported precondition nodes it breaks
  long long missed_windows = 0;  // timed preconditions outside their windows
  long long schedule_breaks = 0; // scheduled nodes failing the slack test
  Time est;                      // estimated start
  Time eft;                      // estimated finish (est + duration)
  long long total() const {
    return num_acts + threats + missed_windows + schedule_breaks;
  }
};

struct EvalResult {
  int search_cost = 0; // |π| + the three temporal-flaw counts
  Time temporal_cost;  // estimated finish of the relaxed plan
  double combined = 0; // alpha * search_cost + beta * normalized time
  TemporalFlawCounts flaws;
  int plan_size = 0;
};

/// Neighborhood evaluation for one search instance. Owns the per-level
/// reachability cache (invalidated from the edited level on) and performs
/// tentative graph edits internally; the graph is always restored before a
/// call returns.
class Heuristics {
public:
  explicit Heuristics(TdaGraph &g, double alpha = 1.0, double beta = 1.0);

  /// Drop cached reachability info for levels after an edit at edit_level.
  void invalidate_from(int edit_level);

  /// Reachability table for the state formed by the facts supported at the
  /// given level, each at its achievement time.
  const ReachabilityTable &table_at(int level);

  /// Timed state of the facts supported at the level.
  std::map<int, Time> state_at(int level) const;

  /// Score for inserting a at insert_level while repairing flawed_level
  /// (insert_level <= flawed_level).
  EvalResult evaluate_insertion(const GroundAction &a, int insert_level,
                                int flawed_level);
  /// Score for removing the action node at remove_level while repairing
  /// flawed_level (remove_level <= flawed_level).
  EvalResult evaluate_removal(int remove_level, int flawed_level);

  /// The backward relaxed-plan construction, exposed for testing: achieves
  /// goals from the timed state, reusing (and extending) plan. Level is the
  /// graph level whose context (threats, mutexes, reachability) guides the
  /// choice of achievers. Returns the finish estimate; nullopt when a goal
  /// is unreachable.
  std::optional<Time> relaxed_time_plan(const std::vector<int> &goals,
                                        const std::map<int, Time> &state,
                                        RelaxedPlan &plan, int level);

  /// Achiever choice for one subgoal, minimizing estimated added actions +
  /// broken supports + missed windows + schedule breaks over the candidates
  /// whose preconditions are all reachable.
  const GroundAction *best_action(int goal, const std::map<int, Time> &state,
                                  const RelaxedPlan &plan, int level);

  /// Full score of one candidate; nullopt when some precondition is
  /// unreachable from the level's state.
  std::optional<CandidateScore>
  score_candidate(const GroundAction &b, const std::map<int, Time> &state,
                  const RelaxedPlan &plan, int level);

  /// Start-time estimate for a candidate action: max of the reachability
  /// lower bound, the achievement times of its preconditions, and the end
  /// times of interfering nodes before the level.
  Time start_estimate(const GroundAction &b, const std::map<int, Time> &state,
                      const RelaxedPlan &plan, int level);

  /// The three temporal-flaw counts for an edit at anchor_level with relaxed
  /// repair plan `plan` finishing at est_finish: nodes newly unscheduled (vs
  /// prev_unscheduled) or failing the slack test under the estimated delay;
  /// timed preconditions of the edited action violated at its assigned
  /// times when it is unscheduled; plan actions missing their windows.
  TemporalFlawCounts count_temporal_flaws(int anchor_level,
                                          const GroundAction *edited,
                                          const RelaxedPlan &plan,
                                          const std::vector<int> &prev_unscheduled,
                                          const Time &est_finish);

private:
  long long threat_count(const GroundAction &b, int level) const;
  Time fact_time_est(int f, const std::map<int, Time> &state,
                     const RelaxedPlan &plan,
                     const ReachabilityTable &tbl) const;
  std::optional<Time> rtp_impl(const std::vector<int> &goals,
                               const std::map<int, Time> &state,
                               RelaxedPlan &plan, int level, int depth);
  EvalResult assemble(const RelaxedPlan &plan, int extra_acts,
                      const TemporalFlawCounts &flaws, const Time &finish);
  EvalResult fail_result() const;

  TdaGraph *g_;
  double alpha_, beta_;
  std::map<int, ReachabilityTable> cache_;
};

} // namespace tempora

#endif
