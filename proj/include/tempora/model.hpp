#ifndef TEMPORA_MODEL_HPP
#define TEMPORA_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempora/time.hpp"

namespace tempora {

struct Literal {
  std::string predicate;
  std::vector<std::string> args;
  bool negated = false;

  bool operator==(const Literal &o) const {
    return predicate == o.predicate && args == o.args && negated == o.negated;
  }
  bool operator<(const Literal &o) const {
    if (predicate != o.predicate)
      return predicate < o.predicate;
    if (args != o.args)
      return args < o.args;
    return negated < o.negated;
  }
  Literal positive() const { return {predicate, args, false}; }
  std::string to_string() const;
};

enum class CondTiming { AtStart, OverAll, AtEnd };

struct TimedConditionSpec {
  Literal literal;
  CondTiming timing = CondTiming::OverAll;
  std::vector<TimeWindow> windows; // pairwise disjoint, sorted by lo
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  Time duration;
  std::vector<int> pre; // fact ids, sorted; over-all semantics
  std::vector<int> eff_add;
  std::vector<int> eff_del;
  std::optional<TimedConditionSpec> timed_pre; // merged, timing = over-all
  std::vector<TimedConditionSpec> original_timed;

  std::string signature() const;
};

struct ProblemInstance {
  std::vector<Literal> facts; // positive ground literals, by fact id
  std::vector<int> init;
  std::vector<int> goals;
  std::vector<GroundAction> actions;
  std::map<Literal, std::vector<TimeWindow>> timed_windows;
  std::vector<std::string> diagnostics; // e.g. pruned unschedulable actions

  int intern(const Literal &positive_lit);
  std::optional<int> fact_id(const Literal &positive_lit) const;
  const Literal &fact(int id) const { return facts.at(id); }

private:
  std::map<Literal, int> fact_ids_;
};

/// Turns sorted (time, literal) assertions into disjoint windows per ground
/// literal: a positive assertion opens a window, a negative one closes it; a
/// trailing open window extends to +infinity. Throws on two consecutive
/// same-polarity assertions for one literal.
std::map<Literal, std::vector<TimeWindow>>
build_windows(const std::vector<std::pair<Time, Literal>> &assertions);

/// Intersection of two disjoint sorted window sets. Strictness of a produced
/// bound follows the tighter contributing bound.
std::vector<TimeWindow> intersect_window_sets(const std::vector<TimeWindow> &a,
                                              const std::vector<TimeWindow> &b);

/// True iff an execution of the given duration fits inside w.
bool window_admits(const TimeWindow &w, const Time &duration);

/// Translates a.original_timed into one merged over-all timed precondition
/// (at-start windows shifted to [lo, hi + dur), at-end to [lo - dur, hi),
/// translated hi bounds strict), intersects them, and prunes windows that
/// cannot hold an execution of Dur(a). Returns false when the merge is empty
/// while original_timed is not: the action can never be scheduled.
bool compile_timed_conditions(GroundAction &a);

} // namespace tempora

#endif
