#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehlink/channel.hpp"
#include "ehlink/energy.hpp"
#include "ehlink/mdp.hpp"
#include "ehlink/pep.hpp"
#include "ehlink/protocol.hpp"

namespace ehlink::sim {

enum class PolicyKind { Greedy, Mlph, Equal };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Greedy;
  double equal_mw = 0;

  /// "greedy", "mlph" or "equal:<mW>"; throws std::invalid_argument.
  static PolicySpec parse(const std::string& text);
  std::string label() const;
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

enum class HarvestModel { Bernoulli, Correlated, Poisson };
enum class ChannelTimescale { Slot, Frame };
enum class InitialBattery { Full, Empty };

struct SimConfig {
  // channel
  int channel_states = 3;
  double mean_gain = 1.0;
  double doppler_fdts = 0.05;
  Eigen::MatrixXd channel_matrix;  // empty: level-crossing matrix
  ChannelTimescale channel_timescale = ChannelTimescale::Slot;
  // code
  int info_bits = 128;
  double code_rate = 0.5;
  int modulation_order = 2;
  double noise_mw = 5;
  std::string weight_spectrum_file;  // empty: built-in K=7 spectrum
  // protocol and run length
  int max_attempts = 4;
  int beta = 4;
  double slot_s = 1;
  int horizon_slots = 150;
  long frames = 100'000;
  // energy, powers in W unless the name says otherwise
  double alpha = 1;
  double p_out_mw = 5;
  double p_circuit_tx_w = 0.1;
  double p_circuit_rx_w = 0.1;
  double p_dec_w = 0.7;
  double p_fb_w = 0;
  double e_min_rx_j = 0;
  energy::BatterySizing sizing;
  // harvesting
  HarvestModel harvest_model = HarvestModel::Bernoulli;
  double rho_tx = 0.5;
  double rho_rx = 0.5;
  double p00 = 0.25, p01 = 0.25, p10 = 0.25, p11 = 0.25;
  double poisson_rate_per_slot = 1.0;
  double e_mean_tx_ptxts = 1.5;
  double e_mean_rx_prxts = 0.75;
  // policy
  PolicySpec policy;
  policy::CostModel cost_model = policy::CostModel::Pep;
  int kappa = 10;
  double vi_tolerance = 1e-8;
  int vi_max_iterations = 100'000;
  long mdp_state_cap = 2'000'000;
  // run
  std::uint64_t seed = 42;
  int replications = 1;
  InitialBattery initial_battery = InitialBattery::Full;
  std::vector<double> rho_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  /// Cross-field checks; throws std::invalid_argument.
  void validate() const;
  bool conventional() const { return beta == 1; }
  /// Power defining E_min_Tx: the equal power for equal:<mW>, else p_out_mw.
  double reference_p_out_w() const;
  energy::LinkEnergyConfig energy_config() const;
  energy::HarvestProcess harvest_process() const;
  /// Harvest probability at the receiver as known to the policy.
  double policy_rho_rx() const;
  double policy_rho_tx() const;
};

/// Sets the harvest probability of both nodes. Compound Poisson maps rho to
/// lambda T_s = 2 rho.
SimConfig with_rho(SimConfig cfg, double rho);

/// Everything a trial needs, derived once from a config.
class PreparedModel {
 public:
  explicit PreparedModel(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const energy::LinkEnergyConfig& energy() const { return energy_; }
  const energy::UnitScale& scale() const { return scale_; }
  const channel::ChannelModel& channel() const { return channel_; }
  const pep::CodeSpec& code() const { return code_; }
  const pep::PepTable& pep() const { return pep_; }
  const energy::HarvestProcess& harvest() const { return harvest_; }
  int equal_action() const { return cfg_.beta; }
  const policy::MdpModel* mdp() const { return mdp_ ? &*mdp_ : nullptr; }
  const policy::ValueIterationResult* value_iteration() const { return vi_ ? &*vi_ : nullptr; }
  /// PEP of every channel state at the fixed equal action.
  Eigen::VectorXd fixed_action_pep() const;

 private:
  SimConfig cfg_;
  energy::LinkEnergyConfig energy_;
  energy::UnitScale scale_;
  channel::ChannelModel channel_;
  pep::CodeSpec code_;
  pep::PepTable pep_;
  energy::HarvestProcess harvest_;
  std::optional<policy::MdpModel> mdp_;
  std::optional<policy::ValueIterationResult> vi_;
};

struct TraceRow {
  long slot;
  int k;
  int available_tx;  // battery plus this slot's harvest
  int available_rx;
  const Eigen::VectorXd* belief;  // belief behind the decision, null for equal power
  int action;
  int sent_parts;
  protocol::Feedback feedback;
  int tx_battery;
  int rx_battery;
  int channel;
};
using TraceSink = std::function<void(const TraceRow&)>;

struct Metrics {
  double avg_packet_time = 0;  // slots per delivered packet
  double pdp = 0;
  double spectral_efficiency = 0;
  double avg_cost = 0;
  long slot_count = 0;
  long frame_count = 0;
  long successes = 0;
  long drops = 0;
  long degenerate_observations = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// One trial: runs until config().frames frames have completed.
Metrics run_trial(const PreparedModel& model, std::uint64_t seed, const TraceSink& trace = {});

enum class Metric { AvgPacketTime, Pdp, SpectralEfficiency, AvgCost };
const char* metric_name(Metric m);
double metric_value(const Metrics& m, Metric which);
inline constexpr Metric kAllMetrics[] = {Metric::AvgPacketTime, Metric::Pdp, Metric::SpectralEfficiency,
                                         Metric::AvgCost};

/// ACK/NAK for beta = 1, ACK/NAKx otherwise.
struct Scheme {
  int beta = 4;
  PolicySpec policy;
  std::string label() const { return beta == 1 ? "ACK/NAK" : "ACK/NAKx"; }
};

struct Summary {
  double mean = 0;
  double stderr_ = 0;
  int n = 0;
};
Summary summarize(const std::vector<double>& values);

/// Replications of one scheme at one rho; seeds seed, seed+1, ...
struct SampleSet {
  double rho = 0;
  Scheme scheme;
  int max_attempts = 0;
  std::vector<Metrics> runs;

  std::vector<double> values(Metric m) const;
  Summary summary(Metric m) const { return summarize(values(m)); }
};

std::vector<SampleSet> sweep(const SimConfig& base, const std::vector<double>& rho_values, int replications,
                             const std::vector<Scheme>& schemes);

/// Same-seed comparison of every scheme at every rho.
inline std::vector<SampleSet> compare_schemes(const SimConfig& base, const std::vector<Scheme>& schemes) {
  return sweep(base, base.rho_grid, base.replications, schemes);
}

/// Mean and stderr of the per-seed difference a - b.
Summary paired_difference(const SampleSet& a, const SampleSet& b, Metric m);

/// `rho, scheme, policy, beta, K, metric, mean, stderr, n`
void write_csv(std::ostream& out, const std::vector<SampleSet>& sets);
std::string format_number(double v);

}  // namespace ehlink::sim
