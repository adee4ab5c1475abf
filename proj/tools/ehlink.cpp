// ehlink: simulate, analyse and tabulate policies for an energy-harvesting ARQ link.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ehlink/config.hpp"
#include "ehlink/errors.hpp"
#include "ehlink/experiments.hpp"
#include "ehlink/policy_table.hpp"
#include "ehlink/sim.hpp"

namespace {

using namespace ehlink;

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 42;
  std::optional<int> replications;
  std::optional<std::string> policy;
  std::optional<int> beta;
  std::optional<double> rho;
  std::optional<int> horizon;
  std::optional<long> frames;

  void attach(CLI::App* app, const std::string& out_help) {
    app->add_option("--config", config_path, "config file (key = value)");
    app->add_option("--out", out, out_help);
    app->add_option("--seed", seed, "base seed")->capture_default_str();
    app->add_option("--replications", replications, "independent replications per point")->check(CLI::PositiveNumber);
    app->add_option("--policy", policy, "greedy, mlph or equal:<mW>");
    app->add_option("--beta", beta, "packet divisions (1 gives plain ACK/NAK)");
    app->add_option("--rho", rho, "harvest probability of both nodes")->check(CLI::Range(0.0, 1.0));
    app->add_option("--horizon", horizon, "slots per spectral-efficiency window")->check(CLI::PositiveNumber);
    app->add_option("--frames", frames, "frames per replication")->check(CLI::PositiveNumber);
  }

  sim::SimConfig load() const {
    sim::SimConfig c = config_path.empty() ? config::parse_config("") : config::load_config(config_path);
    c.seed = seed;
    try {
      if (replications) c.replications = *replications;
      if (policy) c.policy = sim::PolicySpec::parse(*policy);
      if (beta) c.beta = *beta;
      if (rho) c = sim::with_rho(c, *rho);
      if (horizon) c.horizon_slots = *horizon;
      if (frames) c.frames = *frames;
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return c;
  }
};

void print_sets(const std::vector<sim::SampleSet>& sets) {
  std::printf("%-5s %-9s %-10s %2s  %-10s %-10s %-10s %-10s\n", "rho", "scheme", "policy", "K", "pdp", "T_p", "SE",
              "cost");
  for (const auto& s : sets)
    std::printf("%-5.2f %-9s %-10s %2d  %-10.5f %-10.4f %-10.5f %-10.5f\n", s.rho, s.scheme.label().c_str(),
                s.scheme.policy.label().c_str(), s.max_attempts, s.summary(sim::Metric::Pdp).mean,
                s.summary(sim::Metric::AvgPacketTime).mean, s.summary(sim::Metric::SpectralEfficiency).mean,
                s.summary(sim::Metric::AvgCost).mean);
}

int cmd_run(const std::string& name, const CommonOptions& o) {
  experiments::ExperimentSpec spec;
  spec.name = name;
  spec.base = o.load();
  spec.out_dir = o.out.empty() ? "." : o.out;
  spec.replications = o.replications;
  spec.frames = o.frames;
  spec.rho = o.rho;
  const auto res = experiments::run_experiment(spec);
  print_sets(res.sets);
  for (const auto& r : res.analytic)
    std::printf("analytic rho=%.2f p_out=%g mW: bound %.6f chain %.6f\n", r.rho, r.p_out_mw, r.bound_pdp, r.chain_pdp);
  for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& o) {
  const auto cfg = o.load();
  std::vector<double> grid = o.rho ? std::vector<double>{*o.rho} : cfg.rho_grid;
  const auto sets = sim::sweep(cfg, grid, cfg.replications, {{cfg.beta, cfg.policy}});
  if (o.out.empty()) {
    sim::write_csv(std::cout, sets);
  } else {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    sim::write_csv(f, sets);
    print_sets(sets);
  }
  return 0;
}

int cmd_compare(const CommonOptions& o) {
  const auto cfg = o.load();
  std::vector<double> grid = o.rho ? std::vector<double>{*o.rho} : cfg.rho_grid;
  const std::vector<sim::Scheme> schemes{{1, cfg.policy}, {cfg.beta == 1 ? 4 : cfg.beta, cfg.policy}};
  const auto sets = sim::sweep(cfg, grid, cfg.replications, schemes);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    sim::write_csv(f, sets);
  }
  std::printf("%-5s %-22s %-24s %-24s\n", "rho", "metric", "ACK/NAK", "ACK/NAKx - ACK/NAK");
  for (std::size_t i = 0; i + 1 < sets.size(); i += 2)
    for (sim::Metric m : sim::kAllMetrics) {
      const auto base = sets[i].summary(m);
      const auto d = sim::paired_difference(sets[i + 1], sets[i], m);
      std::printf("%-5.2f %-22s %-11.5f+-%-10.5f %-11.5f+-%-10.5f\n", sets[i].rho, sim::metric_name(m), base.mean,
                  base.stderr_, d.mean, d.stderr_);
    }
  return 0;
}

int cmd_solve(const CommonOptions& o) {
  auto cfg = o.load();
  cfg.policy = {sim::PolicyKind::Mlph, 0};
  const std::vector<double> grid = o.rho ? std::vector<double>{*o.rho} : cfg.rho_grid;
  std::optional<policy::PolicyTable> table;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const sim::PreparedModel model(sim::with_rho(cfg, grid[r]));
    const auto& mdp = *model.mdp();
    const auto& vi = *model.value_iteration();
    if (!table) table.emplace(cfg.kappa, mdp.num_channel_states(), mdp.battery_capacity(), mdp.max_attempts(), grid);
    table->tabulate(r, mdp, vi);
    std::printf("rho=%.3f states=%d average cost %.6f after %d iterations (span %.2e)\n", grid[r], mdp.num_states(),
                vi.average_cost, vi.iterations, vi.final_span);
  }
  const std::string out = o.out.empty() ? "policy.tbl" : o.out;
  table->save_file(out);
  std::printf("wrote %s: %zu entries, %zu belief buckets, memory formula %.3g bits\n", out.c_str(), table->num_entries(),
              table->num_buckets(), table->memory_formula_bits());
  return 0;
}

int cmd_analyze(const CommonOptions& o) {
  auto cfg = o.load();
  if (cfg.policy.kind != sim::PolicyKind::Equal) throw ConfigError("analyze needs policy = equal:<mW>");
  const auto row = experiments::analyze(cfg);
  std::printf("rho_tx=%g rho_rx=%g beta=%d K=%d p_out=%g mW\n", cfg.rho_tx, cfg.rho_rx, cfg.beta, cfg.max_attempts,
              cfg.policy.equal_mw);
  std::printf("bound-mode average PDP %.10g\nchain-mode average PDP %.10g\n", row.bound_pdp, row.chain_pdp);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    experiments::write_analytic_csv(f, {row});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting ACK/NAKx link simulator"};
  app.require_subcommand(1);

  CommonOptions run_o, sweep_o, solve_o, analyze_o, compare_o;
  std::string experiment;
  auto* run = app.add_subcommand("run", "run a named experiment (fig2..fig7, custom)");
  run->add_option("experiment", experiment, "fig2, fig3, fig4, fig5, fig6, fig7 or custom")
      ->required()
      ->check(CLI::IsMember(experiments::experiment_names()));
  run_o.attach(run, "output directory");
  auto* sweep = app.add_subcommand("sweep", "sweep rho_grid for the configured scheme");
  sweep_o.attach(sweep, "CSV file (stdout if omitted)");
  auto* solve = app.add_subcommand("solve", "value iteration and MLPH policy table");
  solve_o.attach(solve, "policy table file");
  auto* analyze = app.add_subcommand("analyze", "analytical PDP of an equal-power config");
  analyze_o.attach(analyze, "CSV file");
  auto* compare = app.add_subcommand("compare", "paired ACK/NAK vs ACK/NAKx comparison");
  compare_o.attach(compare, "CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(experiment, run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*solve) return cmd_solve(solve_o);
    if (*analyze) return cmd_analyze(analyze_o);
    if (*compare) return cmd_compare(compare_o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return 0;
}
