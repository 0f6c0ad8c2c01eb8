#include "tempora/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace tempora {

namespace {

struct Node {
  bool atom = false;
  std::string text;
  std::vector<Node> kids;
  int line = 0;
  int col = 0;

  bool is(const std::string &s) const { return atom && text == s; }
  const Node &head() const {
    if (kids.empty())
      throw ParseError("empty list", line, col);
    return kids.front();
  }
};

class Reader {
public:
  explicit Reader(const std::string &text) : text_(text) {}

  std::vector<Node> read_all() {
    std::vector<Node> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        if (c == '\n') {
          ++line_;
          col_ = 1;
        } else {
          ++col_;
        }
      } else {
        break;
      }
    }
  }

  Node read() {
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input", line_, col_);
    char c = text_[pos_];
    Node n;
    n.line = line_;
    n.col = col_;
    if (c == '(') {
      advance();
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        n.kids.push_back(read());
        skip_space();
      }
      if (pos_ >= text_.size())
        throw ParseError("missing ')'", n.line, n.col);
      advance();
      return n;
    }
    if (c == ')')
      throw ParseError("unexpected ')'", line_, col_);
    n.atom = true;
    while (pos_ < text_.size()) {
      c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      n.text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      advance();
    }
    return n;
  }

  void advance() {
    ++pos_;
    ++col_;
  }

  const std::string &text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void unsupported(const std::string &construct, const Node &n) {
  throw ParseError("unsupported construct: " + construct, n.line, n.col);
}

bool numeric_atom(const Node &n) {
  if (!n.atom || n.text.empty())
    return false;
  char c = n.text[0];
  if (std::isdigit(static_cast<unsigned char>(c)))
    return true;
  return (c == '-' || c == '.') && n.text.size() > 1 &&
         std::isdigit(static_cast<unsigned char>(n.text[1]));
}

Literal parse_literal(const Node &n, bool allow_not) {
  if (n.atom)
    throw ParseError("expected a literal", n.line, n.col);
  if (!n.kids.empty() && n.head().is("not")) {
    if (!allow_not)
      unsupported("negative condition (not ...)", n);
    if (n.kids.size() != 2)
      throw ParseError("malformed (not ...)", n.line, n.col);
    Literal l = parse_literal(n.kids[1], false);
    l.negated = true;
    return l;
  }
  Literal l;
  for (const auto &k : n.kids) {
    if (!k.atom)
      throw ParseError("expected an atom in literal", k.line, k.col);
    if (l.predicate.empty())
      l.predicate = k.text;
    else
      l.args.push_back(k.text);
  }
  if (l.predicate.empty())
    throw ParseError("empty literal", n.line, n.col);
  return l;
}

// Parses a PDDL typed list "a b - t c d - u e" into (name, type) pairs.
std::vector<std::pair<std::string, std::string>>
parse_typed_list(const std::vector<Node> &items, std::size_t begin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const Node &n = items[i];
    if (n.is("-")) {
      if (i + 1 >= items.size())
        throw ParseError("dangling '-' in typed list", n.line, n.col);
      const Node &t = items[i + 1];
      if (!t.atom) {
        if (!t.kids.empty() && t.head().is("either"))
          unsupported("(either ...) types", t);
        throw ParseError("expected a type name", t.line, t.col);
      }
      for (auto &p : pending)
        out.emplace_back(p, t.text);
      pending.clear();
      ++i;
    } else if (n.atom) {
      pending.push_back(n.text);
    } else {
      throw ParseError("expected an atom in typed list", n.line, n.col);
    }
  }
  for (auto &p : pending)
    out.emplace_back(p, "object");
  return out;
}

void collect_conditions(const Node &n, std::vector<SchemaCondition> &out) {
  if (n.kids.empty())
    return; // ()
  if (n.head().is("and")) {
    for (std::size_t i = 1; i < n.kids.size(); ++i)
      collect_conditions(n.kids[i], out);
    return;
  }
  const std::string &h = n.head().text;
  if (h == "at" || h == "over") {
    if (n.kids.size() != 3 || !n.kids[1].atom)
      throw ParseError("malformed timed condition", n.line, n.col);
    const std::string &tag = n.kids[1].text;
    CondTiming timing;
    if (h == "at" && tag == "start")
      timing = CondTiming::AtStart;
    else if (h == "at" && tag == "end")
      timing = CondTiming::AtEnd;
    else if (h == "over" && tag == "all")
      timing = CondTiming::OverAll;
    else
      throw ParseError("malformed condition tag '" + h + " " + tag + "'",
                       n.line, n.col);
    out.push_back({parse_literal(n.kids[2], false), timing});
    return;
  }
  if (h == "forall" || h == "exists" || h == "imply" || h == "or")
    unsupported("(" + h + " ...) condition", n);
  if (h == "=" || h == ">" || h == "<" || h == ">=" || h == "<=")
    unsupported("numeric condition (" + h + " ...)", n);
  // Bare literal: non-timed, mapped to over-all downstream.
  out.push_back({parse_literal(n, false), CondTiming::OverAll});
}

void collect_effects(const Node &n, std::vector<SchemaEffect> &out) {
  if (n.kids.empty())
    return;
  if (n.head().is("and")) {
    for (std::size_t i = 1; i < n.kids.size(); ++i)
      collect_effects(n.kids[i], out);
    return;
  }
  const std::string &h = n.head().text;
  if (h == "when")
    unsupported("conditional effect (when ...)", n);
  if (h == "increase" || h == "decrease" || h == "assign" || h == "scale-up" ||
      h == "scale-down")
    unsupported("numeric effect (" + h + " ...)", n);
  if (h == "at") {
    if (n.kids.size() != 3 || !n.kids[1].atom ||
        (n.kids[1].text != "start" && n.kids[1].text != "end"))
      throw ParseError("malformed timed effect", n.line, n.col);
    // Effects are treated with at-end semantics either way.
    collect_effects(n.kids[2], out);
    return;
  }
  if (h == "forall")
    unsupported("(forall ...) effect", n);
  Literal l = parse_literal(n, true);
  out.push_back({l.positive(), l.negated});
}

Time parse_duration(const Node &n) {
  if (n.kids.size() == 3 && !n.head().atom)
    throw ParseError("malformed :duration (expected (= ?duration <number>))",
                     n.line, n.col);
  if (n.kids.size() == 3 && n.head().is("=") && n.kids[1].atom &&
      n.kids[1].text == "?duration") {
    if (!numeric_atom(n.kids[2]))
      unsupported("non-constant action duration", n.kids[2]);
    Time d = Time::parse(n.kids[2].text);
    if (!(d > Time(0)))
      throw ParseError("action duration must be positive", n.line, n.col);
    return d;
  }
  throw ParseError("malformed :duration (expected (= ?duration <number>))",
                   n.line, n.col);
}

ActionSchema parse_durative_action(const Node &n) {
  ActionSchema s;
  if (n.kids.size() < 2 || !n.kids[1].atom)
    throw ParseError("malformed :durative-action", n.line, n.col);
  s.name = n.kids[1].text;
  bool have_duration = false;
  for (std::size_t i = 2; i < n.kids.size(); i += 2) {
    if (!n.kids[i].atom || i + 1 >= n.kids.size())
      throw ParseError("malformed action body", n.kids[i].line, n.kids[i].col);
    const std::string &key = n.kids[i].text;
    const Node &val = n.kids[i + 1];
    if (key == ":parameters") {
      for (auto &[name, type] : parse_typed_list(val.kids, 0)) {
        if (name.empty() || name[0] != '?')
          throw ParseError("parameter must start with '?'", val.line, val.col);
        s.params.push_back({name, type});
      }
    } else if (key == ":duration") {
      s.duration = parse_duration(val);
      have_duration = true;
    } else if (key == ":condition") {
      collect_conditions(val, s.conds);
    } else if (key == ":effect") {
      collect_effects(val, s.effects);
    } else {
      throw ParseError("unexpected key '" + key + "' in action", n.kids[i].line,
                       n.kids[i].col);
    }
  }
  if (!have_duration)
    throw ParseError("missing :duration in action '" + s.name + "'", n.line,
                     n.col);
  return s;
}

void parse_domain(const Node &root, ParsedTask &task) {
  if (root.kids.empty() || !root.head().is("define"))
    throw ParseError("expected (define (domain ...))", root.line, root.col);
  for (std::size_t i = 1; i < root.kids.size(); ++i) {
    const Node &sec = root.kids[i];
    if (sec.kids.empty())
      continue;
    const std::string &h = sec.head().text;
    if (h == "domain") {
      task.domain_name = sec.kids.size() > 1 ? sec.kids[1].text : "";
    } else if (h == ":requirements") {
      for (std::size_t k = 1; k < sec.kids.size(); ++k) {
        const std::string &req = sec.kids[k].text;
        if (req == ":fluents" || req == ":numeric-fluents")
          unsupported("numeric fluents (" + req + ")", sec.kids[k]);
        if (req == ":derived-predicates")
          unsupported("derived predicates (:derived-predicates)", sec.kids[k]);
      }
    } else if (h == ":types") {
      for (auto &[name, type] : parse_typed_list(sec.kids, 1))
        task.type_parent[name] = type;
    } else if (h == ":constants") {
      for (auto &p : parse_typed_list(sec.kids, 1))
        task.objects.push_back(p);
    } else if (h == ":predicates") {
      for (std::size_t k = 1; k < sec.kids.size(); ++k) {
        const Node &p = sec.kids[k];
        if (p.atom || p.kids.empty() || !p.head().atom)
          throw ParseError("malformed predicate declaration", p.line, p.col);
        task.predicate_arity[p.head().text] =
            (int)parse_typed_list(p.kids, 1).size();
      }
    } else if (h == ":functions") {
      unsupported("numeric fluents (:functions)", sec);
    } else if (h == ":derived") {
      unsupported("derived predicates (:derived)", sec);
    } else if (h == ":durative-action") {
      task.schemas.push_back(parse_durative_action(sec));
    } else if (h == ":action") {
      unsupported("non-durative :action (only :durative-action)", sec);
    } else {
      throw ParseError("unexpected domain section '" + h + "'", sec.line,
                       sec.col);
    }
  }
}

void parse_problem(const Node &root, ParsedTask &task) {
  if (root.kids.empty() || !root.head().is("define"))
    throw ParseError("expected (define (problem ...))", root.line, root.col);
  for (std::size_t i = 1; i < root.kids.size(); ++i) {
    const Node &sec = root.kids[i];
    if (sec.kids.empty())
      continue;
    const std::string &h = sec.head().text;
    if (h == "problem") {
      task.problem_name = sec.kids.size() > 1 ? sec.kids[1].text : "";
    } else if (h == ":domain") {
      // name cross-check is cosmetic; skip
    } else if (h == ":objects") {
      for (auto &p : parse_typed_list(sec.kids, 1))
        task.objects.push_back(p);
    } else if (h == ":init") {
      for (std::size_t k = 1; k < sec.kids.size(); ++k) {
        const Node &item = sec.kids[k];
        if (item.atom)
          throw ParseError("malformed init item", item.line, item.col);
        if (!item.kids.empty() && item.head().is("at") &&
            item.kids.size() == 3 && numeric_atom(item.kids[1])) {
          Time t = Time::parse(item.kids[1].text);
          task.timed_assertions.emplace_back(t,
                                             parse_literal(item.kids[2], true));
        } else if (!item.kids.empty() && item.head().is("=")) {
          unsupported("numeric fluent initialisation (= ...)", item);
        } else {
          Literal l = parse_literal(item, true);
          if (l.negated)
            unsupported("negative init literal", item);
          task.init.push_back(l);
        }
      }
    } else if (h == ":goal") {
      if (sec.kids.size() != 2)
        throw ParseError("malformed :goal", sec.line, sec.col);
      std::vector<SchemaCondition> conds;
      collect_conditions(sec.kids[1], conds);
      for (auto &c : conds)
        task.goals.push_back(c.lit);
    } else if (h == ":metric") {
      // plan quality is makespan only; the metric section is ignored
    } else {
      throw ParseError("unexpected problem section '" + h + "'", sec.line,
                       sec.col);
    }
  }
}

Literal substitute(const Literal &l,
                   const std::map<std::string, std::string> &binding) {
  Literal out = l;
  for (auto &a : out.args) {
    if (!a.empty() && a[0] == '?') {
      auto it = binding.find(a);
      if (it == binding.end())
        throw std::runtime_error("unbound variable " + a + " in " +
                                 l.to_string());
      a = it->second;
    }
  }
  return out;
}

} // namespace

bool ParsedTask::type_conforms(const std::string &object_type,
                               const std::string &param_type) const {
  std::string t = object_type;
  for (int depth = 0; depth < 64; ++depth) {
    if (t == param_type)
      return true;
    if (t == "object")
      return false;
    auto it = type_parent.find(t);
    t = it == type_parent.end() ? "object" : it->second;
  }
  return false;
}

ParsedTask parse_pddl(const std::string &domain_text,
                      const std::string &problem_text) {
  ParsedTask task;
  auto dom = Reader(domain_text).read_all();
  if (dom.size() != 1)
    throw ParseError("expected a single (define ...) form in the domain file",
                     1, 1);
  parse_domain(dom.front(), task);
  auto prob = Reader(problem_text).read_all();
  if (prob.size() != 1)
    throw ParseError("expected a single (define ...) form in the problem file",
                     1, 1);
  parse_problem(prob.front(), task);
  return task;
}

ProblemInstance ground(const ParsedTask &task) {
  ProblemInstance inst;

  std::set<std::string> timed_preds;
  for (const auto &[t, lit] : task.timed_assertions)
    timed_preds.insert(lit.predicate);

  // Plain init literals of timed predicates open a window at time 0.
  std::vector<std::pair<Time, Literal>> assertions = task.timed_assertions;
  std::vector<Literal> plain_init;
  for (const auto &l : task.init) {
    if (timed_preds.count(l.predicate))
      assertions.emplace_back(Time(0), l);
    else
      plain_init.push_back(l);
  }
  std::stable_sort(assertions.begin(), assertions.end(),
                   [](const auto &a, const auto &b) {
                     if (a.first != b.first)
                       return a.first < b.first;
                     // closings before openings at the same instant
                     return a.second.negated && !b.second.negated;
                   });
  inst.timed_windows = build_windows(assertions);

  for (const auto &s : task.schemas)
    for (const auto &e : s.effects)
      if (timed_preds.count(e.lit.predicate))
        throw std::runtime_error("timed literal predicate '" +
                                 e.lit.predicate +
                                 "' appears in the effects of action '" +
                                 s.name + "'");

  for (const auto &l : plain_init)
    inst.init.push_back(inst.intern(l));
  std::sort(inst.init.begin(), inst.init.end());
  inst.init.erase(std::unique(inst.init.begin(), inst.init.end()),
                  inst.init.end());

  for (const auto &g : task.goals) {
    if (timed_preds.count(g.predicate))
      throw std::runtime_error("goal on timed literal " + g.to_string() +
                               " is not supported");
    inst.goals.push_back(inst.intern(g));
  }
  std::sort(inst.goals.begin(), inst.goals.end());
  inst.goals.erase(std::unique(inst.goals.begin(), inst.goals.end()),
                   inst.goals.end());

  for (const auto &schema : task.schemas) {
    std::map<std::string, std::string> binding;
    std::vector<std::string> arg_values;
    // Depth-first enumeration of all type-consistent parameter bindings.
    auto instantiate = [&](auto &&self, std::size_t p) -> void {
      if (p == schema.params.size()) {
        GroundAction a;
        a.name = schema.name;
        a.args = arg_values;
        a.duration = schema.duration;
        for (const auto &c : schema.conds) {
          Literal gl = substitute(c.lit, binding);
          if (timed_preds.count(gl.predicate)) {
            TimedConditionSpec spec;
            spec.literal = gl;
            spec.timing = c.timing;
            auto it = inst.timed_windows.find(gl);
            if (it != inst.timed_windows.end())
              spec.windows = it->second;
            a.original_timed.push_back(std::move(spec));
          } else {
            a.pre.push_back(inst.intern(gl));
          }
        }
        for (const auto &e : schema.effects) {
          int id = inst.intern(substitute(e.lit, binding));
          (e.del ? a.eff_del : a.eff_add).push_back(id);
        }
        for (auto *v : {&a.pre, &a.eff_add, &a.eff_del}) {
          std::sort(v->begin(), v->end());
          v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        if (!compile_timed_conditions(a)) {
          inst.diagnostics.push_back("pruned unschedulable action " +
                                     a.signature());
          return;
        }
        inst.actions.push_back(std::move(a));
        return;
      }
      for (const auto &[obj, type] : task.objects) {
        if (!task.type_conforms(type, schema.params[p].type))
          continue;
        binding[schema.params[p].name] = obj;
        arg_values.push_back(obj);
        self(self, p + 1);
        arg_values.pop_back();
      }
      binding.erase(schema.params[p].name);
    };
    instantiate(instantiate, 0);
  }
  return inst;
}

std::string render_problem(const ParsedTask &task) {
  std::string s = "(define (problem " + task.problem_name + ")\n";
  s += "  (:domain " + task.domain_name + ")\n";
  s += "  (:objects";
  for (const auto &[name, type] : task.objects)
    s += " " + name + " - " + type;
  s += ")\n  (:init\n";
  for (const auto &l : task.init)
    s += "    " + l.to_string() + "\n";
  for (const auto &[t, l] : task.timed_assertions)
    s += "    (at " + t.to_string() + " " + l.to_string() + ")\n";
  s += "  )\n  (:goal (and";
  for (const auto &g : task.goals)
    s += " " + g.to_string();
  s += "))\n)\n";
  return s;
}

} // namespace tempora
