// Command-line frontend: plan, validate, and benchmark-problem utilities.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tempora/oracle.hpp"
#include "tempora/pddl.hpp"
#include "tempora/search.hpp"
#include "tempora/validate.hpp"

namespace {

using namespace tempora;

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << text;
}

struct PlannerFlags {
  std::string domain, problem;
  std::uint64_t seed = 0;
  double noise = 0.1;
  int tabu = 5;
  int max_steps = 500;
  int restarts = 10;
  int quality_iterations = 5;
  double max_time = 0; // seconds; 0 = unlimited
  int parallel = 1;
};

void add_planner_flags(CLI::App *cmd, PlannerFlags &f) {
  cmd->add_option("-o,--domain", f.domain, "domain file")->required();
  cmd->add_option("-f,--problem", f.problem, "problem file")->required();
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--noise", f.noise, "random-pick probability");
  cmd->add_option("--tabu", f.tabu, "tabu list length");
  cmd->add_option("--max-steps", f.max_steps, "steps per restart");
  cmd->add_option("--restarts", f.restarts, "maximum restarts");
  cmd->add_option("--quality-iterations", f.quality_iterations,
                  "plan-improvement rounds");
  cmd->add_option("--max-time", f.max_time, "wall-clock limit in seconds");
  cmd->add_option("--parallel", f.parallel, "concurrent seeded searches");
}

SearchConfig make_config(const PlannerFlags &f) {
  SearchConfig cfg;
  cfg.seed = f.seed;
  cfg.noise = f.noise;
  cfg.tabu_len = f.tabu;
  cfg.max_steps = f.max_steps;
  cfg.max_restarts = f.restarts;
  cfg.quality_iterations = f.quality_iterations;
  cfg.log = std::getenv("TEMPORA_LOG") != nullptr;
  if (f.max_time > 0)
    cfg.deadline = std::chrono::steady_clock::now() +
                   std::chrono::milliseconds((long long)(f.max_time * 1000));
  return cfg;
}

ProblemInstance load_instance(const PlannerFlags &f) {
  ParsedTask task = parse_pddl(read_file(f.domain), read_file(f.problem));
  return ground(task);
}

int cmd_plan(const PlannerFlags &f) {
  ProblemInstance p = load_instance(f);
  SearchConfig cfg = make_config(f);
  SearchResult first = f.parallel > 1 ? plan_parallel(p, cfg, f.parallel)
                                      : Searcher(p, cfg).plan();
  if (!first.plan) {
    std::cerr << "no plan: " << first.diagnostics << "\n";
    return 2;
  }
  std::vector<Plan> plans{*first.plan};
  if (f.quality_iterations > 0) {
    Searcher s(p, cfg);
    for (auto &better : s.improve(*first.plan))
      plans.push_back(std::move(better));
  }
  for (std::size_t i = 0; i < plans.size(); ++i) {
    std::string path = f.problem + ".plan." + std::to_string(i + 1);
    write_file(path, render_plan(plans[i]));
    std::cout << path << " makespan " << plans[i].makespan.to_string()
              << "\n";
  }
  const SearchStats &st = first.stats;
  std::cout << "makespan " << plans.back().makespan.to_string() << " plans "
            << plans.size() << " steps " << st.steps << " restarts "
            << st.restarts << " dtp-solves " << st.dtp_solves
            << " backtracks " << st.backtracks << "\n";
  return 0;
}

int cmd_validate(const PlannerFlags &f, const std::string &plan_path) {
  ProblemInstance p = load_instance(f);
  Plan plan = parse_plan(read_file(plan_path));
  ValidationReport rep = validate_plan(p, plan);
  std::cout << rep.to_string();
  return rep.valid ? 0 : 2;
}

int cmd_bench_gen(const PlannerFlags &f, const std::string &method,
                  int n_windows, const std::string &output) {
  ParsedTask task = parse_pddl(read_file(f.domain), read_file(f.problem));
  ProblemInstance base = ground(task);

  // the literals whose windows get rewritten
  std::vector<Literal> timed_lits;
  for (const auto &a : task.timed_assertions) {
    Literal pos = a.second.positive();
    if (std::find(timed_lits.begin(), timed_lits.end(), pos) ==
        timed_lits.end())
      timed_lits.push_back(pos);
  }
  if (timed_lits.empty()) {
    std::cerr << "bench-gen: the base problem has no timed literals\n";
    return 1;
  }

  Time unit;
  if (method == "I") {
    // odd sub-intervals of [0, t], t = best makespan of the base problem
    SearchResult r = Searcher(base, make_config(f)).plan();
    if (!r.plan) {
      std::cerr << "bench-gen: base problem unsolved: " << r.diagnostics
                << "\n";
      return 2;
    }
    unit = r.plan->makespan / (2 * (long long)n_windows - 1);
  } else if (method == "II") {
    // sub-intervals of duration d = max duration among window-constrained
    // actions, over [0, d*(2n-1)]
    Time d(0);
    for (const auto &a : base.actions)
      if (a.timed_pre)
        d = max(d, a.duration);
    if (d == Time(0)) {
      std::cerr << "bench-gen: no window-constrained action in the base\n";
      return 1;
    }
    unit = d;
  } else {
    std::cerr << "bench-gen: method must be I or II\n";
    return 1;
  }

  std::vector<std::pair<Time, Literal>> rewritten;
  for (const auto &a : task.timed_assertions) {
    Literal pos = a.second.positive();
    if (std::find(timed_lits.begin(), timed_lits.end(), pos) ==
        timed_lits.end())
      rewritten.push_back(a);
  }
  for (const auto &lit : timed_lits)
    for (int k = 0; k < n_windows; ++k) {
      rewritten.push_back({unit * (2 * k), lit});
      Literal close = lit;
      close.negated = true;
      rewritten.push_back({unit * (2 * k + 1), close});
    }
  std::stable_sort(rewritten.begin(), rewritten.end(),
                   [](const auto &x, const auto &y) {
                     return x.first < y.first;
                   });
  task.timed_assertions = std::move(rewritten);

  std::string text = render_problem(task);
  if (output.empty())
    std::cout << text;
  else
    write_file(output, text);
  return 0;
}

int cmd_bench_stats(const PlannerFlags &f) {
  ProblemInstance p = load_instance(f);
  struct Row {
    long long vars = 0, sched = 0, clauses = 0;
    bool satisfiable = false;
  };
  std::vector<Row> rows;
  auto record = [&rows](const TdaGraph &g) {
    Row r;
    for (const auto &part : g.dtp().partition_meta_variables())
      r.vars += (long long)part.size();
    for (const auto &c : g.dtp().sched())
      r.clauses += 1ll << std::min<std::size_t>(c.disjuncts.size(), 62);
    r.sched = (long long)g.dtp().sched().size();
    r.satisfiable = g.outcome().complete;
    rows.push_back(r);
  };
  SearchConfig cfg = make_config(f);
  cfg.observer = record;
  SearchResult res = Searcher(p, cfg).plan();

  auto agg = [&rows](auto get) {
    long long mx = 0, sum = 0;
    for (const auto &r : rows) {
      mx = std::max(mx, get(r));
      sum += get(r);
    }
    double mean = rows.empty() ? 0.0 : (double)sum / (double)rows.size();
    return std::pair<long long, double>(mx, mean);
  };
  long long sat = 0;
  for (const auto &r : rows)
    if (r.satisfiable)
      ++sat;
  auto [vmax, vmean] = agg([](const Row &r) { return r.vars; });
  auto [smax, smean] = agg([](const Row &r) { return r.sched; });
  auto [cmax, cmean] = agg([](const Row &r) { return r.clauses; });
  std::printf("solved                %s\n", res.plan ? "yes" : "no");
  std::printf("dtps                  %zu\n", rows.size());
  std::printf("satisfiable dtps      %lld\n", sat);
  std::printf("variables max/mean    %lld / %.2f\n", vmax, vmean);
  std::printf("scheduling max/mean   %lld / %.2f\n", smax, smean);
  std::printf("clause-form max/mean  %lld / %.2f\n", cmax, cmean);
  return res.plan ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"temporal planner for durative actions with timed literals"};
  app.require_subcommand(1);

  PlannerFlags plan_f, val_f, gen_f, stats_f;
  std::string plan_path, method = "I", output;
  int n_windows = 1;

  CLI::App *c_plan = app.add_subcommand("plan", "search for a plan");
  add_planner_flags(c_plan, plan_f);

  CLI::App *c_val = app.add_subcommand("validate", "check a plan file");
  add_planner_flags(c_val, val_f);
  c_val->add_option("plan", plan_path, "plan file")->required();

  CLI::App *c_gen =
      app.add_subcommand("bench-gen", "rewrite timed-literal windows");
  add_planner_flags(c_gen, gen_f);
  c_gen->add_option("--bench-method", method, "I or II");
  c_gen->add_option("--windows", n_windows, "windows per literal")
      ->check(CLI::PositiveNumber);
  c_gen->add_option("--output", output, "output file (default stdout)");

  CLI::App *c_stats =
      app.add_subcommand("bench-stats", "per-run scheduling statistics");
  add_planner_flags(c_stats, stats_f);

  CLI11_PARSE(app, argc, argv);
  try {
    if (c_plan->parsed())
      return cmd_plan(plan_f);
    if (c_val->parsed())
      return cmd_validate(val_f, plan_path);
    if (c_gen->parsed())
      return cmd_bench_gen(gen_f, method, n_windows, output);
    if (c_stats->parsed())
      return cmd_bench_stats(stats_f);
  } catch (const tempora::ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
