#include "tempora/lagraph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace tempora {

namespace {
bool deletes_any(const GroundAction &a, const std::vector<int> &facts) {
  for (int f : a.eff_del)
    if (std::binary_search(facts.begin(), facts.end(), f))
      return true;
  return false;
}
} // namespace

bool actions_mutex(const GroundAction &a, const GroundAction &b) {
  if (&a == &b)
    return false;
  return deletes_any(a, b.pre) || deletes_any(a, b.eff_add) ||
         deletes_any(b, a.pre) || deletes_any(b, a.eff_add);
}

TdaGraph::TdaGraph(const ProblemInstance &p) : inst_(&p) {
  start_action_.name = "a_start";
  start_action_.duration = Time(0);
  start_action_.eff_add = p.init;
  end_action_.name = "a_end";
  end_action_.duration = Time(0);
  end_action_.pre = p.goals;
  levels_.push_back({next_node_id_++, &start_action_});
  levels_.push_back({next_node_id_++, &end_action_});
  rebuild(1);
}

void TdaGraph::insert_action(const GroundAction &a, int level) {
  if (level < 1 || level > last_level())
    throw std::out_of_range("TdaGraph::insert_action: bad level");
  levels_.insert(levels_.begin() + level, {next_node_id_++, &a});
  rebuild(level);
}

void TdaGraph::remove_action(int level) {
  if (level < 1 || level >= last_level())
    throw std::out_of_range(
        "TdaGraph::remove_action: endpoint nodes cannot be removed");
  levels_.erase(levels_.begin() + level);
  rebuild(level);
}

void TdaGraph::rebuild(int edit_level) {
  int last = last_level();
  int nf = (int)inst_->facts.size();
  supported_.assign(last + 1, std::vector<char>(nf, 0));
  achiever_.assign(last + 1, std::vector<int>(nf, -1));
  for (int l = 0; l < last; ++l) {
    if (l >= 1) {
      supported_[l + 1] = supported_[l];
      achiever_[l + 1] = achiever_[l];
    }
    const GroundAction &act = *levels_[l].action;
    for (int f : act.eff_del)
      supported_[l + 1][f] = 0;
    for (int f : act.eff_add) {
      supported_[l + 1][f] = 1;
      achiever_[l + 1][f] = l;
    }
  }

  orderings_.clear();
  for (int l = 1; l <= last; ++l)
    for (int f : levels_[l].action->pre) {
      if (!supported_[l][f])
        continue;
      int src = achiever_[l][f];
      if (src >= 1) // support from the initial state needs no extra edge
        orderings_.push_back({levels_[src].node_id, levels_[l].node_id});
    }
  for (int i = 1; i < last; ++i)
    for (int j = i + 1; j < last; ++j)
      if (actions_mutex(*levels_[i].action, *levels_[j].action))
        orderings_.push_back({levels_[i].node_id, levels_[j].node_id});
  std::sort(orderings_.begin(), orderings_.end());
  orderings_.erase(std::unique(orderings_.begin(), orderings_.end()),
                   orderings_.end());

  std::vector<DtpNodeSpec> nodes;
  for (int l = 0; l <= last; ++l) {
    DtpNodeSpec n;
    n.node_id = levels_[l].node_id;
    n.level = l;
    n.duration = levels_[l].action->duration;
    if (levels_[l].action->timed_pre)
      n.windows = levels_[l].action->timed_pre->windows;
    n.label = levels_[l].action->signature();
    nodes.push_back(std::move(n));
  }
  bool first_solve = dtp_ == nullptr;
  dtp_ = std::make_unique<Dtp>(std::move(nodes), orderings_);
  dtp_->set_makespan_bound(makespan_bound_);
  outcome_ = first_solve ? dtp_->solve_plus()
                         : dtp_->incremental_solve(outcome_, edit_level);
}

bool TdaGraph::fact_supported(int fact, int level) const {
  return supported_.at(level).at(fact) != 0;
}

Time TdaGraph::fact_time(int fact, int level) const {
  int src = supporter_level(fact, level);
  return src == 0 ? Time(0) : end_of(src);
}

int TdaGraph::supporter_level(int fact, int level) const {
  if (!fact_supported(fact, level))
    throw std::logic_error("TdaGraph::supporter_level: fact unsupported");
  return achiever_.at(level).at(fact) < 0 ? 0 : achiever_.at(level).at(fact);
}

bool TdaGraph::scheduled(int level) const {
  int id = node_id_at(level);
  return std::find(outcome_.unscheduled.begin(), outcome_.unscheduled.end(),
                   id) == outcome_.unscheduled.end();
}

void TdaGraph::set_makespan_bound(std::optional<Bound> b) {
  makespan_bound_ = b;
  dtp_->set_makespan_bound(b);
  outcome_ = dtp_->solve_plus();
}

std::vector<Flaw> TdaGraph::find_flaws() const {
  std::vector<Flaw> out;
  for (int l = 1; l <= last_level(); ++l) {
    for (int f : levels_[l].action->pre)
      if (!supported_[l][f])
        out.push_back({Flaw::Propositional, l, levels_[l].node_id, f});
    if (!scheduled(l))
      out.push_back({Flaw::Temporal, l, levels_[l].node_id, -1});
  }
  return out; // built level-ascending already
}

Plan TdaGraph::extract_plan() const {
  if (!find_flaws().empty())
    throw std::logic_error("TdaGraph::extract_plan: plan still has flaws");
  Plan plan;
  for (int l = 1; l < last_level(); ++l) {
    const GroundAction &a = *levels_[l].action;
    plan.steps.push_back({start_of(l), a.name, a.args, a.duration});
  }
  std::stable_sort(plan.steps.begin(), plan.steps.end(),
                   [](const PlanStep &a, const PlanStep &b) {
                     return a.start < b.start;
                   });
  plan.makespan = outcome_.makespan;
  return plan;
}

std::string TdaGraph::dump() const {
  std::string s;
  std::map<int, int> level_of;
  for (int l = 0; l <= last_level(); ++l)
    level_of[levels_[l].node_id] = l;
  for (int l = 0; l <= last_level(); ++l) {
    const GroundAction &a = *levels_[l].action;
    s += "level " + std::to_string(l) + ": " + a.signature();
    s += "  start=" + start_of(l).to_string() +
         "  dur=" + a.duration.to_string();
    if (!scheduled(l))
      s += "  UNSCHEDULED";
    s += "\n";
    for (int f : a.pre) {
      s += "  pre " + inst_->fact(f).to_string();
      if (supported_[l][f])
        s += "  <- level " + std::to_string(supporter_level(f, l)) + " at " +
             fact_time(f, l).to_string();
      else
        s += "  UNSUPPORTED";
      s += "\n";
    }
    if (a.timed_pre) {
      s += "  windows";
      for (const auto &w : a.timed_pre->windows)
        s += " " + w.to_string();
      s += "\n";
    }
  }
  std::vector<std::pair<int, int>> ords;
  for (const auto &o : orderings_)
    ords.emplace_back(level_of.at(o.from), level_of.at(o.to));
  std::sort(ords.begin(), ords.end());
  for (const auto &[from, to] : ords)
    s += "order " + std::to_string(from) + " -> " + std::to_string(to) + "\n";
  return s;
}

bool TdaGraph::same_shape(const TdaGraph &o) const {
  auto shape = [](const TdaGraph &g) {
    std::map<int, int> level_of;
    for (int l = 0; l <= g.last_level(); ++l)
      level_of[g.levels_[l].node_id] = l;
    std::vector<std::string> sigs;
    std::vector<Time> starts;
    for (int l = 0; l <= g.last_level(); ++l) {
      sigs.push_back(g.levels_[l].action->signature());
      starts.push_back(g.start_of(l));
    }
    std::vector<std::pair<int, int>> ords;
    for (const auto &e : g.orderings_)
      ords.emplace_back(level_of.at(e.from), level_of.at(e.to));
    std::sort(ords.begin(), ords.end());
    return std::tuple(sigs, starts, ords);
  };
  return shape(*this) == shape(o);
}

} // namespace tempora
