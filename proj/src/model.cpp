#include "tempora/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempora {

std::string Literal::to_string() const {
  std::string s = negated ? "(not (" : "(";
  s += predicate;
  for (const auto &a : args)
    s += " " + a;
  s += ")";
  if (negated)
    s += ")";
  return s;
}

std::string GroundAction::signature() const {
  std::string s = "(" + name;
  for (const auto &a : args)
    s += " " + a;
  return s + ")";
}

int ProblemInstance::intern(const Literal &lit) {
  auto it = fact_ids_.find(lit);
  if (it != fact_ids_.end())
    return it->second;
  int id = (int)facts.size();
  facts.push_back(lit);
  fact_ids_.emplace(lit, id);
  return id;
}

std::optional<int> ProblemInstance::fact_id(const Literal &lit) const {
  auto it = fact_ids_.find(lit);
  if (it == fact_ids_.end())
    return std::nullopt;
  return it->second;
}

std::map<Literal, std::vector<TimeWindow>>
build_windows(const std::vector<std::pair<Time, Literal>> &assertions) {
  std::map<Literal, std::vector<TimeWindow>> out;
  std::map<Literal, std::optional<Time>> open; // currently open window start
  for (const auto &[t, lit] : assertions) {
    Literal key = lit.positive();
    auto &st = open[key];
    if (!lit.negated) {
      if (st)
        throw std::invalid_argument("ill-formed timeline for " +
                                    key.to_string() +
                                    ": two consecutive positive assertions");
      st = t;
    } else {
      if (!st)
        throw std::invalid_argument("ill-formed timeline for " +
                                    key.to_string() +
                                    ": closing assertion with no open window");
      out[key].push_back(TimeWindow{*st, t, false, false});
      st.reset();
    }
  }
  for (auto &[key, st] : open)
    if (st)
      out[key].push_back(TimeWindow{*st, Time::infinity(), false, false});
  return out;
}

bool window_admits(const TimeWindow &w, const Time &dur) {
  if (w.hi.is_infinite())
    return true;
  Time len = w.hi - w.lo;
  if (w.lo_strict || w.hi_strict)
    return len > dur;
  return len >= dur;
}

std::vector<TimeWindow>
intersect_window_sets(const std::vector<TimeWindow> &a,
                      const std::vector<TimeWindow> &b) {
  std::vector<TimeWindow> out;
  for (const auto &wa : a) {
    for (const auto &wb : b) {
      TimeWindow w;
      if (wa.lo > wb.lo || (wa.lo == wb.lo && wa.lo_strict)) {
        w.lo = wa.lo;
        w.lo_strict = wa.lo_strict;
      } else {
        w.lo = wb.lo;
        w.lo_strict = wb.lo_strict;
      }
      if (wa.hi < wb.hi || (wa.hi == wb.hi && wa.hi_strict)) {
        w.hi = wa.hi;
        w.hi_strict = wa.hi_strict;
      } else {
        w.hi = wb.hi;
        w.hi_strict = wb.hi_strict;
      }
      if (w.lo < w.hi)
        out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TimeWindow &x, const TimeWindow &y) { return x.lo < y.lo; });
  return out;
}

bool compile_timed_conditions(GroundAction &a) {
  if (a.original_timed.empty()) {
    a.timed_pre.reset();
    return true;
  }
  bool first = true;
  std::vector<TimeWindow> merged;
  for (const auto &cond : a.original_timed) {
    std::vector<TimeWindow> translated;
    for (const auto &w : cond.windows) {
      TimeWindow t = w;
      switch (cond.timing) {
      case CondTiming::OverAll:
        break;
      case CondTiming::AtStart:
        // start in [lo, hi) becomes execution in [lo, hi + dur)
        t.hi = t.hi.is_infinite() ? t.hi : t.hi + a.duration;
        t.hi_strict = true;
        break;
      case CondTiming::AtEnd:
        // end in [lo, hi) becomes execution in [lo - dur, hi)
        t.lo = t.lo - a.duration;
        t.hi_strict = true;
        break;
      }
      translated.push_back(t);
    }
    merged = first ? translated : intersect_window_sets(merged, translated);
    first = false;
  }
  std::vector<TimeWindow> admitted;
  for (const auto &w : merged)
    if (window_admits(w, a.duration))
      admitted.push_back(w);
  if (admitted.empty()) {
    a.timed_pre.reset();
    return false;
  }
  TimedConditionSpec spec;
  spec.timing = CondTiming::OverAll;
  spec.literal = a.original_timed.front().literal;
  spec.windows = std::move(admitted);
  a.timed_pre = std::move(spec);
  return true;
}

} // namespace tempora
