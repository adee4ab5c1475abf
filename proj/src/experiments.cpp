#include "ehlink/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ehlink::experiments {

using sim::PolicySpec;
using sim::Scheme;
using sim::SimConfig;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "custom"};
  return names;
}

bool is_named_experiment(const std::string& name) {
  const auto& n = experiment_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

namespace {

struct Plan {
  SimConfig cfg;
  std::vector<Scheme> schemes;
  std::vector<int> attempts;  // one sweep per K
  int replications;
  long frames;
  const char* metric;  // plotted metric
};

PolicySpec equal(double mw) { return {sim::PolicyKind::Equal, mw}; }
PolicySpec greedy() { return {sim::PolicyKind::Greedy, 0}; }
PolicySpec mlph() { return {sim::PolicyKind::Mlph, 0}; }

void reduced_fig6(SimConfig& c) {
  c.sizing.e_h_tx = 2;
  c.sizing.b_max_tx = 3;
  c.sizing.e_h_rx = 1.2;
  c.sizing.b_max_rx = 2;
  c.p_dec_w = 5 * c.p_circuit_rx_w;
  c.channel_timescale = sim::ChannelTimescale::Frame;
}

Plan make_plan(const std::string& name, const SimConfig& base) {
  Plan p{experiment_config(name, base), {}, {}, 10, 10'000, "pdp"};
  const std::vector<Scheme> fig345{{4, greedy()}, {1, greedy()}, {4, equal(5)},
                                   {1, equal(5)}, {4, equal(15)}, {1, equal(15)}};
  if (name == "fig2") {
    p.schemes = {{4, mlph()}, {4, greedy()}};
    p.attempts = {2, 3};
  } else if (name == "fig3" || name == "fig4" || name == "fig5") {
    p.schemes = fig345;
    p.metric = name == "fig3" ? "avg_packet_time" : name == "fig4" ? "pdp" : "spectral_efficiency";
  } else if (name == "fig6") {
    p.schemes = {{4, equal(5)}, {4, equal(15)}};
    p.replications = 4;
    p.frames = 250'000;
  } else if (name == "fig7") {
    p.schemes = {{4, greedy()}, {1, greedy()}, {4, equal(5)}, {1, equal(5)}};
  } else {
    p.schemes = {{p.cfg.beta, p.cfg.policy}};
    p.replications = p.cfg.replications;
    p.frames = p.cfg.frames;
  }
  if (p.attempts.empty()) p.attempts = {p.cfg.max_attempts};
  return p;
}

std::string gnuplot_script(const std::string& name, const char* metric, const std::vector<sim::SampleSet>& sets,
                           bool analytic) {
  std::vector<std::string> series;
  std::string s = "set datafile separator ','\nset key outside\nset xlabel 'probability of harvesting'\n";
  s += std::string("set ylabel '") + metric + "'\n";
  if (std::string(metric) == "pdp") s += "set logscale y\n";
  s += "set terminal pngcairo size 900,600\nset output '" + name + ".png'\n";
  std::string plot = "plot ";
  bool first = true;
  for (const auto& set : sets) {
    const std::string key = set.scheme.label() + "," + set.scheme.policy.label() + "," + std::to_string(set.max_attempts);
    if (std::find(series.begin(), series.end(), key) != series.end()) continue;
    series.push_back(key);
    if (!first) plot += ", \\\n     ";
    first = false;
    plot += "'" + name + ".csv' using 1:((strcol(2) eq '" + set.scheme.label() + "' && strcol(3) eq '" +
            set.scheme.policy.label() + "' && $5 == " + std::to_string(set.max_attempts) + " && strcol(6) eq '" +
            metric + "') ? $7 : 1/0) with linespoints title '" + set.scheme.label() + " " +
            set.scheme.policy.label() + " K=" + std::to_string(set.max_attempts) + "'";
  }
  if (analytic) {
    for (const char* col : {"5", "6"}) {
      for (double mw : {5.0, 15.0}) {
        plot += ", \\\n     'analytical.csv' using 1:($2 == " + sim::format_number(mw) + " ? $" + col +
                " : 1/0) with lines dashtype 2 title '" + (col[0] == '5' ? "bound " : "chain ") +
                sim::format_number(mw) + " mW'";
      }
    }
  }
  return s + plot + "\n";
}

}  // namespace

SimConfig experiment_config(const std::string& name, const SimConfig& base) {
  if (!is_named_experiment(name)) throw std::invalid_argument("unknown experiment '" + name + "'");
  SimConfig c = base;
  if (name == "fig2") {
    c.sizing.e_h_rx = 1.2;
  } else if (name == "fig3" || name == "fig4" || name == "fig5") {
    c.max_attempts = 4;
  } else if (name == "fig6") {
    reduced_fig6(c);
  } else if (name == "fig7") {
    c.max_attempts = 4;
    c.harvest_model = sim::HarvestModel::Poisson;
    c.e_mean_tx_ptxts = 1.5;
    c.e_mean_rx_prxts = 0.75;
  }
  return c;
}

analysis::ChainConfig chain_config(const sim::PreparedModel& model) {
  const auto& cfg = model.config();
  if (cfg.policy.kind != sim::PolicyKind::Equal) throw std::invalid_argument("analysis needs an equal:<mW> policy");
  if (cfg.harvest_model == sim::HarvestModel::Poisson)
    throw std::invalid_argument("analysis supports Bernoulli-type harvesting only");
  analysis::ChainConfig c;
  c.scale = model.scale();
  c.max_attempts = cfg.max_attempts;
  c.fixed_action = model.equal_action();
  c.weights = energy::harvest_weights(model.harvest(), cfg.slot_s);
  c.conventional = cfg.conventional();
  return c;
}

AnalyticRow analyze(const SimConfig& cfg) {
  const sim::PreparedModel model(cfg);
  const auto cc = chain_config(model);
  const Eigen::VectorXd pep = model.fixed_action_pep();
  AnalyticRow row;
  row.rho = cfg.rho_tx;
  row.p_out_mw = cfg.policy.equal_mw;
  row.beta = cfg.beta;
  row.K = cfg.max_attempts;
  row.bound_pdp = analysis::bound_pdp(cc, model.channel().steady_state(), pep).pdp;
  row.chain_pdp = analysis::chain_pdp(cc, model.channel().transition(), pep).pdp;
  return row;
}

void write_analytic_csv(std::ostream& out, const std::vector<AnalyticRow>& rows) {
  out << "rho,p_out_mw,beta,K,bound_pdp,chain_pdp\n";
  for (const auto& r : rows)
    out << sim::format_number(r.rho) << ',' << sim::format_number(r.p_out_mw) << ',' << r.beta << ',' << r.K << ','
        << sim::format_number(r.bound_pdp) << ',' << sim::format_number(r.chain_pdp) << '\n';
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  Plan plan = make_plan(spec.name, spec.base);
  if (spec.replications) plan.replications = *spec.replications;
  if (spec.frames) plan.frames = *spec.frames;
  plan.cfg.frames = plan.frames;
  std::vector<double> grid = plan.cfg.rho_grid;
  if (spec.rho) grid = {*spec.rho};

  ExperimentResult res;
  for (int K : plan.attempts) {
    SimConfig c = plan.cfg;
    c.max_attempts = K;
    auto sets = sim::sweep(c, grid, plan.replications, plan.schemes);
    res.sets.insert(res.sets.end(), std::make_move_iterator(sets.begin()), std::make_move_iterator(sets.end()));
  }
  const bool analytic = spec.name == "fig6";
  if (analytic) {
    for (double rho : grid)
      for (const auto& s : plan.schemes) {
        SimConfig c = sim::with_rho(plan.cfg, rho);
        c.beta = s.beta;
        c.policy = s.policy;
        res.analytic.push_back(analyze(c));
      }
  }

  std::filesystem::create_directories(spec.out_dir);
  const std::filesystem::path dir(spec.out_dir);
  auto write = [&](const std::string& file, auto&& body) {
    const auto path = (dir / file).string();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    body(f);
    res.files.push_back(path);
  };
  write(spec.name + ".csv", [&](std::ostream& o) { sim::write_csv(o, res.sets); });
  write(spec.name + ".gp", [&](std::ostream& o) { o << gnuplot_script(spec.name, plan.metric, res.sets, analytic); });
  if (analytic) write("analytical.csv", [&](std::ostream& o) { write_analytic_csv(o, res.analytic); });
  return res;
}

}  // namespace ehlink::experiments
