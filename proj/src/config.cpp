#include "ehlink/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ehlink/errors.hpp"

namespace ehlink::config {

using sim::SimConfig;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument("expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return x;
}


void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double probability(const std::string& v) {
  const double p = to_double(v);
  check(p >= 0 && p <= 1, "value " + v + " outside [0,1]");
  return p;
}

double positive(const std::string& v) {
  const double x = to_double(v);
  check(x > 0, "value must be positive");
  return x;
}

double non_negative(const std::string& v) {
  const double x = to_double(v);
  check(x >= 0, "value must be non-negative");
  return x;
}

int positive_int(const std::string& v) {
  const long x = to_long(v);
  check(x >= 1 && x <= 1'000'000'000L, "value must be a positive integer");
  return static_cast<int>(x);
}

std::vector<double> number_list(const std::string& v) {
  std::vector<double> out;
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(to_double(tok));
  return out;
}

Eigen::MatrixXd matrix(const std::string& v) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(v);
  std::string row;
  while (std::getline(ss, row, ';'))
    if (!trim(row).empty()) rows.push_back(number_list(row));
  check(!rows.empty(), "empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check(rows[i].size() == rows.front().size(), "matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

using Setter = std::function<void(SimConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"channel_states", [](SimConfig& c, const std::string& v) { c.channel_states = positive_int(v); }},
      {"mean_gain", [](SimConfig& c, const std::string& v) { c.mean_gain = positive(v); }},
      {"doppler_fdts", [](SimConfig& c, const std::string& v) { c.doppler_fdts = positive(v); }},
      {"channel_matrix", [](SimConfig& c, const std::string& v) { c.channel_matrix = matrix(v); }},
      {"channel_timescale",
       [](SimConfig& c, const std::string& v) {
         if (v == "slot") c.channel_timescale = sim::ChannelTimescale::Slot;
         else if (v == "frame") c.channel_timescale = sim::ChannelTimescale::Frame;
         else throw std::invalid_argument("channel_timescale must be slot or frame");
       }},
      {"info_bits", [](SimConfig& c, const std::string& v) { c.info_bits = positive_int(v); }},
      {"code_rate",
       [](SimConfig& c, const std::string& v) {
         c.code_rate = positive(v);
         check(c.code_rate <= 1, "code_rate must be in (0,1]");
       }},
      {"modulation_order",
       [](SimConfig& c, const std::string& v) {
         c.modulation_order = positive_int(v);
         check(energy::is_power_of_two(c.modulation_order) && c.modulation_order >= 2,
               "modulation_order must be a power of two >= 2");
       }},
      {"noise_mw", [](SimConfig& c, const std::string& v) { c.noise_mw = positive(v); }},
      {"weight_spectrum_file", [](SimConfig& c, const std::string& v) { c.weight_spectrum_file = v; }},
      {"max_attempts", [](SimConfig& c, const std::string& v) { c.max_attempts = positive_int(v); }},
      {"beta",
       [](SimConfig& c, const std::string& v) {
         c.beta = positive_int(v);
         check(energy::is_power_of_two(c.beta), "beta must be a power of two");
       }},
      {"slot_s", [](SimConfig& c, const std::string& v) { c.slot_s = positive(v); }},
      {"horizon_slots", [](SimConfig& c, const std::string& v) { c.horizon_slots = positive_int(v); }},
      {"frames", [](SimConfig& c, const std::string& v) { c.frames = positive_int(v); }},
      {"alpha", [](SimConfig& c, const std::string& v) { c.alpha = non_negative(v); }},
      {"p_out_mw", [](SimConfig& c, const std::string& v) { c.p_out_mw = positive(v); }},
      {"p_circuit_tx_w", [](SimConfig& c, const std::string& v) { c.p_circuit_tx_w = non_negative(v); }},
      {"p_circuit_rx_w", [](SimConfig& c, const std::string& v) { c.p_circuit_rx_w = positive(v); }},
      {"p_dec_w", [](SimConfig& c, const std::string& v) { c.p_dec_w = non_negative(v); }},
      {"p_fb_w", [](SimConfig& c, const std::string& v) { c.p_fb_w = non_negative(v); }},
      {"e_min_rx_j", [](SimConfig& c, const std::string& v) { c.e_min_rx_j = non_negative(v); }},
      {"b_max_tx_ptxts", [](SimConfig& c, const std::string& v) { c.sizing.b_max_tx = non_negative(v); }},
      {"b_max_rx_prxts", [](SimConfig& c, const std::string& v) { c.sizing.b_max_rx = non_negative(v); }},
      {"e_h_tx_ptxts", [](SimConfig& c, const std::string& v) { c.sizing.e_h_tx = non_negative(v); }},
      {"e_h_rx_prxts", [](SimConfig& c, const std::string& v) { c.sizing.e_h_rx = non_negative(v); }},
      {"harvest_model",
       [](SimConfig& c, const std::string& v) {
         if (v == "bernoulli") c.harvest_model = sim::HarvestModel::Bernoulli;
         else if (v == "correlated") c.harvest_model = sim::HarvestModel::Correlated;
         else if (v == "poisson") c.harvest_model = sim::HarvestModel::Poisson;
         else throw std::invalid_argument("harvest_model must be bernoulli, correlated or poisson");
       }},
      {"rho", [](SimConfig& c, const std::string& v) { c.rho_tx = c.rho_rx = probability(v); }},
      {"rho_tx", [](SimConfig& c, const std::string& v) { c.rho_tx = probability(v); }},
      {"rho_rx", [](SimConfig& c, const std::string& v) { c.rho_rx = probability(v); }},
      {"p00", [](SimConfig& c, const std::string& v) { c.p00 = probability(v); }},
      {"p01", [](SimConfig& c, const std::string& v) { c.p01 = probability(v); }},
      {"p10", [](SimConfig& c, const std::string& v) { c.p10 = probability(v); }},
      {"p11", [](SimConfig& c, const std::string& v) { c.p11 = probability(v); }},
      {"poisson_rate_per_slot", [](SimConfig& c, const std::string& v) { c.poisson_rate_per_slot = non_negative(v); }},
      {"e_mean_tx_ptxts", [](SimConfig& c, const std::string& v) { c.e_mean_tx_ptxts = non_negative(v); }},
      {"e_mean_rx_prxts", [](SimConfig& c, const std::string& v) { c.e_mean_rx_prxts = non_negative(v); }},
      {"policy", [](SimConfig& c, const std::string& v) { c.policy = sim::PolicySpec::parse(v); }},
      {"cost_model",
       [](SimConfig& c, const std::string& v) {
         if (v == "pep") c.cost_model = policy::CostModel::Pep;
         else if (v == "nak_weighted") c.cost_model = policy::CostModel::NakWeighted;
         else throw std::invalid_argument("cost_model must be pep or nak_weighted");
       }},
      {"kappa", [](SimConfig& c, const std::string& v) { c.kappa = positive_int(v); }},
      {"vi_tolerance", [](SimConfig& c, const std::string& v) { c.vi_tolerance = positive(v); }},
      {"vi_max_iterations", [](SimConfig& c, const std::string& v) { c.vi_max_iterations = positive_int(v); }},
      {"mdp_state_cap", [](SimConfig& c, const std::string& v) { c.mdp_state_cap = positive_int(v); }},
      {"seed",
       [](SimConfig& c, const std::string& v) {
         std::size_t used = 0;
         try {
           c.seed = std::stoull(v, &used);
         } catch (const std::exception&) {
           used = 0;
         }
         check(used == v.size() && used > 0 && v[0] != '-', "seed must be a non-negative integer");
       }},
      {"replications", [](SimConfig& c, const std::string& v) { c.replications = positive_int(v); }},
      {"initial_battery",
       [](SimConfig& c, const std::string& v) {
         if (v == "full") c.initial_battery = sim::InitialBattery::Full;
         else if (v == "empty") c.initial_battery = sim::InitialBattery::Empty;
         else throw std::invalid_argument("initial_battery must be full or empty");
       }},
      {"rho_grid",
       [](SimConfig& c, const std::string& v) {
         c.rho_grid = number_list(v);
         check(!c.rho_grid.empty(), "rho_grid is empty");
         for (double r : c.rho_grid) check(r >= 0 && r <= 1, "rho_grid value outside [0,1]");
       }},
  };
  return table;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", lineno);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", lineno);
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what(), lineno);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const SimConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  kv("channel_states", std::to_string(c.channel_states));
  kv("mean_gain", num(c.mean_gain));
  kv("doppler_fdts", num(c.doppler_fdts));
  if (c.channel_matrix.size() > 0) {
    std::string m;
    for (Eigen::Index i = 0; i < c.channel_matrix.rows(); ++i) {
      if (i) m += "; ";
      for (Eigen::Index j = 0; j < c.channel_matrix.cols(); ++j) m += (j ? " " : "") + num(c.channel_matrix(i, j));
    }
    kv("channel_matrix", m);
  }
  kv("channel_timescale", c.channel_timescale == sim::ChannelTimescale::Slot ? "slot" : "frame");
  kv("info_bits", std::to_string(c.info_bits));
  kv("code_rate", num(c.code_rate));
  kv("modulation_order", std::to_string(c.modulation_order));
  kv("noise_mw", num(c.noise_mw));
  if (!c.weight_spectrum_file.empty()) kv("weight_spectrum_file", c.weight_spectrum_file);
  kv("max_attempts", std::to_string(c.max_attempts));
  kv("beta", std::to_string(c.beta));
  kv("slot_s", num(c.slot_s));
  kv("horizon_slots", std::to_string(c.horizon_slots));
  kv("frames", std::to_string(c.frames));
  kv("alpha", num(c.alpha));
  kv("p_out_mw", num(c.p_out_mw));
  kv("p_circuit_tx_w", num(c.p_circuit_tx_w));
  kv("p_circuit_rx_w", num(c.p_circuit_rx_w));
  kv("p_dec_w", num(c.p_dec_w));
  kv("p_fb_w", num(c.p_fb_w));
  kv("e_min_rx_j", num(c.e_min_rx_j));
  kv("b_max_tx_ptxts", num(c.sizing.b_max_tx));
  kv("b_max_rx_prxts", num(c.sizing.b_max_rx));
  kv("e_h_tx_ptxts", num(c.sizing.e_h_tx));
  kv("e_h_rx_prxts", num(c.sizing.e_h_rx));
  kv("harvest_model", c.harvest_model == sim::HarvestModel::Bernoulli    ? "bernoulli"
                      : c.harvest_model == sim::HarvestModel::Correlated ? "correlated"
                                                                         : "poisson");
  kv("rho_tx", num(c.rho_tx));
  kv("rho_rx", num(c.rho_rx));
  kv("p00", num(c.p00));
  kv("p01", num(c.p01));
  kv("p10", num(c.p10));
  kv("p11", num(c.p11));
  kv("poisson_rate_per_slot", num(c.poisson_rate_per_slot));
  kv("e_mean_tx_ptxts", num(c.e_mean_tx_ptxts));
  kv("e_mean_rx_prxts", num(c.e_mean_rx_prxts));
  kv("policy", c.policy.kind == sim::PolicyKind::Equal ? "equal:" + num(c.policy.equal_mw) : c.policy.label());
  kv("cost_model", c.cost_model == policy::CostModel::Pep ? "pep" : "nak_weighted");
  kv("kappa", std::to_string(c.kappa));
  kv("vi_tolerance", num(c.vi_tolerance));
  kv("vi_max_iterations", std::to_string(c.vi_max_iterations));
  kv("mdp_state_cap", std::to_string(c.mdp_state_cap));
  kv("seed", std::to_string(c.seed));
  kv("replications", std::to_string(c.replications));
  kv("initial_battery", c.initial_battery == sim::InitialBattery::Full ? "full" : "empty");
  std::string grid;
  for (std::size_t i = 0; i < c.rho_grid.size(); ++i) grid += (i ? ", " : "") + num(c.rho_grid[i]);
  kv("rho_grid", grid);
  return o.str();
}

bool same_config(const SimConfig& a, const SimConfig& b) {
  const bool matrices = a.channel_matrix.rows() == b.channel_matrix.rows() &&
                        a.channel_matrix.cols() == b.channel_matrix.cols() &&
                        (a.channel_matrix.size() == 0 || a.channel_matrix == b.channel_matrix);
  return matrices && a.channel_states == b.channel_states && a.mean_gain == b.mean_gain &&
         a.doppler_fdts == b.doppler_fdts && a.channel_timescale == b.channel_timescale &&
         a.info_bits == b.info_bits && a.code_rate == b.code_rate && a.modulation_order == b.modulation_order &&
         a.noise_mw == b.noise_mw && a.weight_spectrum_file == b.weight_spectrum_file &&
         a.max_attempts == b.max_attempts && a.beta == b.beta && a.slot_s == b.slot_s &&
         a.horizon_slots == b.horizon_slots && a.frames == b.frames && a.alpha == b.alpha &&
         a.p_out_mw == b.p_out_mw && a.p_circuit_tx_w == b.p_circuit_tx_w && a.p_circuit_rx_w == b.p_circuit_rx_w &&
         a.p_dec_w == b.p_dec_w && a.p_fb_w == b.p_fb_w && a.e_min_rx_j == b.e_min_rx_j &&
         a.sizing.b_max_tx == b.sizing.b_max_tx && a.sizing.b_max_rx == b.sizing.b_max_rx &&
         a.sizing.e_h_tx == b.sizing.e_h_tx && a.sizing.e_h_rx == b.sizing.e_h_rx &&
         a.harvest_model == b.harvest_model && a.rho_tx == b.rho_tx && a.rho_rx == b.rho_rx && a.p00 == b.p00 &&
         a.p01 == b.p01 && a.p10 == b.p10 && a.p11 == b.p11 && a.poisson_rate_per_slot == b.poisson_rate_per_slot &&
         a.e_mean_tx_ptxts == b.e_mean_tx_ptxts && a.e_mean_rx_prxts == b.e_mean_rx_prxts && a.policy == b.policy &&
         a.cost_model == b.cost_model && a.kappa == b.kappa && a.vi_tolerance == b.vi_tolerance &&
         a.vi_max_iterations == b.vi_max_iterations && a.mdp_state_cap == b.mdp_state_cap && a.seed == b.seed &&
         a.replications == b.replications && a.initial_battery == b.initial_battery && a.rho_grid == b.rho_grid;
}

}  // namespace ehlink::config
