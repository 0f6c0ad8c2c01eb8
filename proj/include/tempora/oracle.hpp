#ifndef TEMPORA_ORACLE_HPP
#define TEMPORA_ORACLE_HPP

#include <optional>

#include "tempora/dtp.hpp"
#include "tempora/lagraph.hpp"

namespace tempora {

/// Exhaustive reference solver: enumerates every complete window-choice
/// combination, keeps the consistent ones and returns the one minimizing the
/// plan end time. When no combination is consistent, returns an incomplete
/// outcome built by a greedy prefix walk (meaningful for the satisfiability
/// verdict only). Throws std::length_error when the number of combinations
/// exceeds 100000.
SolveOutcome brute_dtp(const Dtp &d);

/// Second cross-check: expands every disjunctive constraint into its
/// equivalent conjunction of clauses (one inequality per window, all
/// combinations) and solves the clause system by naive chronological
/// backtracking over all selections. Returns the minimal plan end time, or
/// nullopt when unsatisfiable. Intended for small window counts.
std::optional<Time> classical_dtp_makespan(const Dtp &d);

/// Exhaustive optimal planner for tiny instances: tries every action
/// sequence up to the given length, schedules each as a leveled plan and
/// returns a minimum-makespan plan accepted by the independent validator.
/// Throws std::length_error when the sequence space exceeds 200000.
std::optional<Plan> brute_plan(const ProblemInstance &p, int max_actions);

} // namespace tempora

#endif
