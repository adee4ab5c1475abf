#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ehlink::pep {

/// (m, c) convolutional code with its truncated weight spectrum.
struct CodeSpec {
  int info_bits = 128;
  int coded_bits = 256;
  double rate = 0.5;
  int d_free = 10;
  std::vector<std::pair<int, double>> weight_spectrum;  // (d, A_d), sorted by d
  int truncation = 0;                                   // largest d listed
  double noise_power_w = 0.005;
  int modulation_order = 2;

  /// Rate-1/2 K=7 (133,171) code with its first eight spectrum terms.
  static CodeSpec standard(int info_bits, double rate, double noise_power_w, int modulation_order);

  /// Replaces the spectrum; d_free and truncation follow from it.
  void set_spectrum(std::vector<std::pair<int, double>> spectrum);
  void validate() const;
};

/// Parses "d A_d" lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<int, double>> parse_weight_spectrum(const std::string& text);
std::vector<std::pair<int, double>> load_weight_spectrum(const std::string& path);

/// 0.5 erfc(sqrt(d g P_out / sigma^2))
double bep_bpsk(int d, double mean_gain, double p_out_w, double noise_power_w);

/// 1 - (1 - sum_d A_d P_2(d))^m, with the union-bound sum clamped to 1.
double packet_error_prob(const CodeSpec& code, double mean_gain, double p_out_w);

/// Worst part of a packet sent in pieces.
double pep_adaptive(std::span<const double> part_peps);

/// P_e(g, a) for every channel state and action level 0..max_action.
class PepTable {
 public:
  explicit PepTable(Eigen::MatrixXd values);

  static PepTable build(const CodeSpec& code, const Eigen::VectorXd& mean_gains, int max_action,
                        const std::function<double(int)>& power_for_action);
  /// P_e = p for every a >= 1 (and 1 at a = 0).
  static PepTable constant(int num_states, int max_action, double p);

  double operator()(int state, int action) const { return values_(state, action); }
  int num_states() const { return static_cast<int>(values_.rows()); }
  int max_action() const { return static_cast<int>(values_.cols()) - 1; }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace ehlink::pep
