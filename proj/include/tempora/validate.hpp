#ifndef TEMPORA_VALIDATE_HPP
#define TEMPORA_VALIDATE_HPP

#include <string>
#include <vector>

#include "tempora/lagraph.hpp" // Plan / PlanStep only
#include "tempora/model.hpp"

namespace tempora {

struct Violation {
  enum Kind { Precondition, MutexOverlap, Window, Goal } kind;
  int step; // index into plan.steps; -1 for goal violations
  std::string detail;

  static const char *kind_name(Kind k);
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;

  /// One line per violation: "<kind> step <i>: <detail>"; "valid" if none.
  std::string to_string() const;
};

/// Semantic check of a plan by timeline simulation, independent of the
/// planner's scheduling machinery: effects apply at each action's end
/// (deletes before adds at one instant); every plain precondition must hold
/// over the half-open execution interval; interfering actions must not
/// overlap; each timed-precondition action must execute inside one window
/// (ending exactly at a closed window end is allowed); goals must hold after
/// the last effect.
ValidationReport validate_plan(const ProblemInstance &p, const Plan &plan);

/// Plan text: one step per line, "<start>: (<name> <args...>) [<duration>]".
std::string render_plan(const Plan &plan);

/// Parses the format above; lines starting with ';' and blank lines are
/// skipped; makespan is recomputed. Throws std::runtime_error on bad input.
Plan parse_plan(const std::string &text);

} // namespace tempora

#endif
