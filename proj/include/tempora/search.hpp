#ifndef TEMPORA_SEARCH_HPP
#define TEMPORA_SEARCH_HPP

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tempora/heuristics.hpp"
#include "tempora/lagraph.hpp"

namespace tempora {

struct SearchConfig {
  double noise = 0.1;         // probability of a uniform random pick
  int tabu_len = 5;           // inverse edits barred this many steps
  int max_steps = 500;        // per restart
  int max_restarts = 10;
  std::uint64_t seed = 0;
  int quality_iterations = 5; // improvement rounds after the first plan
  std::optional<Time> makespan_bound; // require plan end strictly below
  int insertion_horizon = 3;  // candidate levels below the flawed one
  bool log = false;           // progress lines on standard error
  std::optional<std::chrono::steady_clock::time_point>
      deadline;               // wall-clock cap, checked between steps
  std::function<void(const TdaGraph &)>
      observer;               // called after every applied step
};

struct SearchStats {
  long long steps = 0;
  long long restarts = 0;
  long long dtp_solves = 0;
  long long backtracks = 0; // must stay 0: the scheduler never backtracks
  std::vector<int> neighborhood_sizes; // one entry per executed step
};

/// One local-search move: inserting an action at a level or removing the
/// node at a level. The stored action is the one inserted, or (for a
/// removal) the one that was removed, which makes the inverse well defined.
struct SearchEdit {
  enum Kind { Insert, Remove } kind;
  const GroundAction *action = nullptr;
  int level = 0;
  int flawed_level = 0; // level of the flaw the move targets (not identity)

  SearchEdit inverse() const {
    return {kind == Insert ? Remove : Insert, action, level, flawed_level};
  }
  /// Tabu identity: kind, action signature and level.
  bool same_move(const SearchEdit &o) const;
};

struct ScoredEdit {
  SearchEdit edit;
  EvalResult eval;
};

struct StepOutcome {
  bool applied = false;     // false: empty neighborhood, restart needed
  bool random_pick = false; // the noise branch was taken
  SearchEdit edit;          // meaningful when applied
};

struct SearchResult {
  std::optional<Plan> plan;
  SearchStats stats;
  std::string diagnostics; // failure reason, empty on success
};

/// Stochastic local search over the leveled plan graph: repair the
/// earliest-level flaw by inserting a helpful action or removing a harmful
/// node, choosing noisily among candidates scored by the relaxed-plan
/// heuristics, with a short tabu list of inverse moves and random restarts.
class Searcher {
public:
  Searcher(const ProblemInstance &p, SearchConfig cfg);

  /// Searches for a flawless graph and returns its (internally validated)
  /// plan, or a failure with diagnostics once the step/restart budget is
  /// exhausted.
  SearchResult plan();

  /// Re-plans with the plan-end bound set strictly below the best makespan
  /// so far, emitting each strictly better valid plan; stops after
  /// quality_iterations rounds or on the first failed round.
  std::vector<Plan> improve(const Plan &first);

  // --- low-level interface (driven directly by tests) ---

  /// Fresh initial graph, rng re-seeded deterministically from (seed,
  /// restart index).
  void reset(int restart_index);
  /// One local-search step on the current graph.
  StepOutcome step();
  /// Candidate moves for a flaw, tabu not yet applied.
  std::vector<SearchEdit> neighborhood(const Flaw &flaw) const;
  /// Heuristic scores of the non-tabu candidates.
  std::vector<ScoredEdit> scored_neighborhood(const Flaw &flaw);

  TdaGraph &graph() { return *graph_; }
  const SearchStats &stats() const { return stats_; }

private:
  bool is_tabu(const SearchEdit &e) const;
  void apply(const SearchEdit &e);

  const ProblemInstance *inst_;
  SearchConfig cfg_;
  SearchStats stats_;
  std::unique_ptr<TdaGraph> graph_;
  std::unique_ptr<Heuristics> heur_;
  std::mt19937_64 rng_;
  std::deque<SearchEdit> tabu_;
};

/// Runs independent searches with distinct seeds (seed, seed+1, ...) on
/// separate threads; the coordinator keeps the best-makespan success.
SearchResult plan_parallel(const ProblemInstance &p, const SearchConfig &cfg,
                           int workers);

} // namespace tempora

#endif
