#ifndef TEMPORA_PDDL_HPP
#define TEMPORA_PDDL_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempora/model.hpp"

namespace tempora {

struct ParseError : std::runtime_error {
  ParseError(const std::string &msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) +
                           ", column " + std::to_string(col) + ")"),
        line(line), col(col) {}
  int line;
  int col;
};

struct TypedVar {
  std::string name;
  std::string type;
};

struct SchemaCondition {
  Literal lit; // args may be ?variables
  CondTiming timing;
};

struct SchemaEffect {
  Literal lit;
  bool del;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  Time duration;
  std::vector<SchemaCondition> conds;
  std::vector<SchemaEffect> effects;
};

/// Ungrounded result of parsing a domain/problem pair.
struct ParsedTask {
  std::string domain_name;
  std::string problem_name;
  std::map<std::string, std::string> type_parent; // type -> supertype
  std::map<std::string, int> predicate_arity;
  std::vector<std::pair<std::string, std::string>> objects; // name, type
  std::vector<Literal> init;                                // plain literals
  std::vector<std::pair<Time, Literal>> timed_assertions;   // (at t L)
  std::vector<Literal> goals;
  std::vector<ActionSchema> schemas;

  bool type_conforms(const std::string &object_type,
                     const std::string &param_type) const;
};

ParsedTask parse_pddl(const std::string &domain_text,
                      const std::string &problem_text);

/// Instantiates the schemas over all type-consistent bindings, assembles the
/// timed-literal window lists, splits timed conditions out of the
/// precondition sets, compiles them into a merged over-all precondition per
/// action, and prunes unschedulable actions (recorded in diagnostics).
ProblemInstance ground(const ParsedTask &task);

/// Re-renders the problem file (used by the benchmark generator after
/// rewriting the timed-literal windows).
std::string render_problem(const ParsedTask &task);

} // namespace tempora

#endif
