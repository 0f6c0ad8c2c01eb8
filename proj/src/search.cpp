#include "tempora/search.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tempora/validate.hpp"

namespace tempora {

bool SearchEdit::same_move(const SearchEdit &o) const {
  if (kind != o.kind || level != o.level)
    return false;
  if (action == o.action)
    return true;
  return action && o.action && action->signature() == o.action->signature();
}

Searcher::Searcher(const ProblemInstance &p, SearchConfig cfg)
    : inst_(&p), cfg_(std::move(cfg)) {
  reset(0);
}

void Searcher::reset(int restart_index) {
  heur_.reset();
  graph_ = std::make_unique<TdaGraph>(*inst_);
  if (cfg_.makespan_bound)
    graph_->set_makespan_bound(Bound{*cfg_.makespan_bound, true});
  heur_ = std::make_unique<Heuristics>(*graph_);
  rng_.seed(cfg_.seed + 0x9e3779b97f4a7c15ull * (std::uint64_t)restart_index);
  tabu_.clear();
}

std::vector<SearchEdit> Searcher::neighborhood(const Flaw &flaw) const {
  std::vector<SearchEdit> out;
  int l = flaw.level;
  if (flaw.kind == Flaw::Propositional) {
    int lo = std::max(1, l - cfg_.insertion_horizon);
    for (const auto &a : inst_->actions) {
      if (std::find(a.eff_add.begin(), a.eff_add.end(), flaw.fact) ==
          a.eff_add.end())
        continue;
      for (int i = lo; i <= l; ++i)
        out.push_back({SearchEdit::Insert, &a, i, l});
    }
  }
  // removing any earlier node can shift or unblock the flawed one; the
  // heuristic evaluation sorts the useful candidates from the rest
  int hi = std::min(l, graph_->last_level() - 1);
  for (int i = 1; i <= hi; ++i)
    out.push_back({SearchEdit::Remove, &graph_->action_at(i), i, l});
  return out;
}

bool Searcher::is_tabu(const SearchEdit &e) const {
  for (const auto &t : tabu_)
    if (t.same_move(e))
      return true;
  return false;
}

std::vector<ScoredEdit> Searcher::scored_neighborhood(const Flaw &flaw) {
  std::vector<ScoredEdit> out;
  for (const auto &e : neighborhood(flaw)) {
    if (is_tabu(e))
      continue;
    EvalResult ev = e.kind == SearchEdit::Insert
                        ? heur_->evaluate_insertion(*e.action, e.level,
                                                    e.flawed_level)
                        : heur_->evaluate_removal(e.level, e.flawed_level);
    stats_.dtp_solves += 2; // tentative edit and its undo each re-solve
    out.push_back({e, ev});
  }
  return out;
}

void Searcher::apply(const SearchEdit &e) {
  if (e.kind == SearchEdit::Insert)
    graph_->insert_action(*e.action, e.level);
  else
    graph_->remove_action(e.level);
  heur_->invalidate_from(e.level);
  stats_.dtp_solves += 1;
  stats_.backtracks += graph_->outcome().backtracks;
  if (stats_.backtracks != 0)
    throw std::logic_error("search: scheduler reported a backtrack");
}

StepOutcome Searcher::step() {
  std::vector<Flaw> flaws = graph_->find_flaws();
  if (flaws.empty())
    return {};
  std::vector<ScoredEdit> cands = scored_neighborhood(flaws.front());
  if (cands.empty())
    return {}; // everything tabu or no candidates: restart signal
  stats_.steps += 1;
  stats_.neighborhood_sizes.push_back((int)cands.size());

  StepOutcome out;
  std::size_t pick;
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < cfg_.noise) {
    out.random_pick = true;
    pick = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(
        rng_);
  } else {
    double best = cands[0].eval.combined;
    for (const auto &c : cands)
      best = std::min(best, c.eval.combined);
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].eval.combined == best)
        ties.push_back(i);
    pick = ties[std::uniform_int_distribution<std::size_t>(
        0, ties.size() - 1)(rng_)];
  }
  out.applied = true;
  out.edit = cands[pick].edit;
  apply(out.edit);
  tabu_.push_front(out.edit.inverse());
  while ((int)tabu_.size() > cfg_.tabu_len)
    tabu_.pop_back();
  return out;
}

SearchResult Searcher::plan() {
  SearchResult res;
  // an unreachable goal can never be repaired: fail without searching
  {
    std::map<int, Time> state;
    for (int f : inst_->init)
      state[f] = Time(0);
    ReachabilityTable table = reachability_information(*inst_, state);
    for (int g : inst_->goals)
      if (!table.fact_reachable(g)) {
        res.stats = stats_;
        res.diagnostics =
            "goal unreachable: " + inst_->fact(g).to_string();
        return res;
      }
  }
  for (int r = 0; r <= cfg_.max_restarts; ++r) {
    reset(r);
    if (r > 0)
      stats_.restarts += 1;
    for (int s = 0; s < cfg_.max_steps; ++s) {
      if (cfg_.deadline && std::chrono::steady_clock::now() > *cfg_.deadline) {
        res.stats = stats_;
        res.diagnostics = "wall-clock budget exhausted";
        return res;
      }
      std::vector<Flaw> flaws = graph_->find_flaws();
      if (cfg_.log)
        std::fprintf(stderr, "search: restart %d step %d flaws %zu end %s\n",
                     r, s, flaws.size(),
                     graph_->outcome().makespan.to_string().c_str());
      if (flaws.empty()) {
        Plan p = graph_->extract_plan();
        ValidationReport rep = validate_plan(*inst_, p);
        res.stats = stats_;
        if (!rep.valid) {
          res.diagnostics = "internal validation failed:\n" + rep.to_string();
          return res;
        }
        res.plan = std::move(p);
        return res;
      }
      if (!step().applied)
        break; // empty neighborhood: forced restart
      if (cfg_.observer)
        cfg_.observer(*graph_);
    }
  }
  res.stats = stats_;
  res.diagnostics = "step and restart budget exhausted";
  return res;
}

std::vector<Plan> Searcher::improve(const Plan &first) {
  std::vector<Plan> out;
  Time best = first.makespan;
  for (int it = 0; it < cfg_.quality_iterations; ++it) {
    cfg_.makespan_bound = best; // enforced strictly by the bound edge
    SearchResult r = plan();
    if (!r.plan || !(r.plan->makespan < best))
      break;
    best = r.plan->makespan;
    out.push_back(std::move(*r.plan));
  }
  return out;
}

SearchResult plan_parallel(const ProblemInstance &p, const SearchConfig &cfg,
                           int workers) {
  if (workers <= 1)
    return Searcher(p, cfg).plan();
  std::vector<SearchResult> results((std::size_t)workers);
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      SearchConfig c = cfg;
      c.seed = cfg.seed + (std::uint64_t)w;
      results[(std::size_t)w] = Searcher(p, c).plan();
    });
  for (auto &t : threads)
    t.join();
  SearchResult best;
  for (auto &r : results) {
    best.stats.steps += r.stats.steps;
    best.stats.restarts += r.stats.restarts;
    best.stats.dtp_solves += r.stats.dtp_solves;
    best.stats.backtracks += r.stats.backtracks;
    if (r.plan && (!best.plan || r.plan->makespan < best.plan->makespan)) {
      best.plan = std::move(r.plan);
      best.diagnostics.clear();
    } else if (!best.plan && best.diagnostics.empty()) {
      best.diagnostics = r.diagnostics;
    }
  }
  return best;
}

} // namespace tempora
