#include "ehlink/pep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ehlink/errors.hpp"

namespace ehlink::pep {

CodeSpec CodeSpec::standard(int info_bits, double rate, double noise_power_w, int modulation_order) {
  CodeSpec c;
  c.info_bits = info_bits;
  c.rate = rate;
  c.coded_bits = static_cast<int>(std::lround(info_bits / rate));
  c.noise_power_w = noise_power_w;
  c.modulation_order = modulation_order;
  c.set_spectrum({{10, 11}, {12, 38}, {14, 193}, {16, 1331}, {18, 7275}, {20, 40406}, {22, 234969}, {24, 1337714}});
  c.validate();
  return c;
}

void CodeSpec::set_spectrum(std::vector<std::pair<int, double>> spectrum) {
  std::sort(spectrum.begin(), spectrum.end());
  weight_spectrum = std::move(spectrum);
  d_free = weight_spectrum.empty() ? 0 : weight_spectrum.front().first;
  truncation = weight_spectrum.empty() ? 0 : weight_spectrum.back().first;
}

void CodeSpec::validate() const {
  if (info_bits <= 0 || coded_bits <= 0) throw std::invalid_argument("code: bit counts must be positive");
  if (!(rate > 0 && rate <= 1)) throw std::invalid_argument("code: rate must be in (0,1]");
  if (std::abs(coded_bits * rate - info_bits) > 1e-9) throw std::invalid_argument("code: m must equal c / R_c");
  if (!(noise_power_w > 0)) throw std::invalid_argument("code: noise power must be positive");
  for (std::size_t i = 0; i < weight_spectrum.size(); ++i) {
    const auto& [d, a] = weight_spectrum[i];
    if (d < 1 || a < 0) throw std::invalid_argument("code: spectrum needs d >= 1 and A_d >= 0");
    if (i && d <= weight_spectrum[i - 1].first) throw std::invalid_argument("code: spectrum distances must increase");
  }
}

std::vector<std::pair<int, double>> parse_weight_spectrum(const std::string& text) {
  std::vector<std::pair<int, double>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    int d = 0;
    double a = 0;
    std::string rest;
    if (!(fields >> d >> a) || (fields >> rest && rest[0] != '#'))
      throw ConfigError("weight spectrum: expected \"d A_d\"", lineno);
    out.emplace_back(d, a);
  }
  return out;
}

std::vector<std::pair<int, double>> load_weight_spectrum(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open weight spectrum file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_weight_spectrum(ss.str());
}

double bep_bpsk(int d, double mean_gain, double p_out_w, double noise_power_w) {
  return 0.5 * std::erfc(std::sqrt(d * mean_gain * p_out_w / noise_power_w));
}

double packet_error_prob(const CodeSpec& code, double mean_gain, double p_out_w) {
  double sum = 0;
  for (const auto& [d, a] : code.weight_spectrum) {
    if (d > code.coded_bits) break;
    sum += a * bep_bpsk(d, mean_gain, p_out_w, code.noise_power_w);
  }
  if (sum >= 1) return 1.0;
  return -std::expm1(code.coded_bits * std::log1p(-sum));
}

double pep_adaptive(std::span<const double> part_peps) {
  if (part_peps.empty()) throw std::invalid_argument("pep_adaptive: no parts");
  return *std::max_element(part_peps.begin(), part_peps.end());
}

PepTable::PepTable(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) throw std::invalid_argument("PepTable: empty");
  for (Eigen::Index g = 0; g < values_.rows(); ++g) {
    if (values_(g, 0) != 1.0) throw ConsistencyError("PepTable: P_e at action 0 must be 1");
    for (Eigen::Index a = 0; a < values_.cols(); ++a) {
      const double v = values_(g, a);
      if (!(v >= 0 && v <= 1)) throw ConsistencyError("PepTable: entry outside [0,1]");
      if (a > 0 && v > values_(g, a - 1)) throw ConsistencyError("PepTable: P_e increases with the action level");
    }
  }
}

PepTable PepTable::build(const CodeSpec& code, const Eigen::VectorXd& mean_gains, int max_action,
                         const std::function<double(int)>& power_for_action) {
  if (max_action < 0) throw std::invalid_argument("PepTable: negative max action");
  code.validate();
  Eigen::MatrixXd v(mean_gains.size(), max_action + 1);
  for (Eigen::Index g = 0; g < mean_gains.size(); ++g) {
    v(g, 0) = 1.0;
    for (int a = 1; a <= max_action; ++a) v(g, a) = packet_error_prob(code, mean_gains(g), power_for_action(a));
  }
  for (Eigen::Index g = 1; g < v.rows(); ++g)
    if (mean_gains(g) >= mean_gains(g - 1) && (v.row(g).array() > v.row(g - 1).array()).any())
      throw ConsistencyError("PepTable: P_e increases with the channel gain");
  return PepTable(std::move(v));
}

PepTable PepTable::constant(int num_states, int max_action, double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("PepTable::constant: p outside [0,1]");
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(num_states, max_action + 1, p);
  v.col(0).setOnes();
  return PepTable(std::move(v));
}

}  // namespace ehlink::pep
