#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "ehlink/belief.hpp"
#include "ehlink/pep.hpp"

namespace ehlink::policy {

enum class CostModel {
  Pep,          // r(s, a) = P_err(g, a)
  NakWeighted,  // r(s, a) = rho_Rx P_err(g, a)
};

struct MdpParams {
  int battery_capacity = 0;  // B_max in transmitter units
  int harvest_units = 0;     // L_Tx
  int max_attempts = 4;      // K
  double rho_tx = 0.5;
  double rho_rx = 0.5;
  CostModel cost = CostModel::Pep;
  std::size_t state_cap = 2'000'000;
};

/// Fully observed MDP over s = (b, g, k) with actions a = 0..b.
class MdpModel {
 public:
  struct Entry {
    int next;
    double prob;
  };

  MdpModel(const MdpParams& params, const Eigen::MatrixXd& omega, const pep::PepTable& pep);

  int num_states() const { return num_states_; }
  int num_channel_states() const { return G_; }
  int max_attempts() const { return K_; }
  int battery_capacity() const { return B_; }

  int index(int b, int g, int k) const { return (b * G_ + g) * K_ + (k - 1); }
  int battery_of(int s) const { return s / (G_ * K_); }
  int channel_of(int s) const { return (s / K_) % G_; }
  int attempt_of(int s) const { return s % K_ + 1; }

  int num_actions(int s) const { return battery_of(s) + 1; }
  double cost(int s, int a) const { return cost_[offset(s) + static_cast<std::size_t>(a)]; }
  /// Successor distribution of (s, a); entries may repeat a target.
  std::vector<Entry> transitions(int s, int a) const;
  const MdpParams& params() const { return params_; }

  /// Dense kernel of one action-selection (testing and small instances).
  Eigen::MatrixXd policy_matrix(const std::vector<int>& policy) const;
  Eigen::VectorXd policy_costs(const std::vector<int>& policy) const;

 private:
  std::size_t offset(int s) const { return action_offset_[static_cast<std::size_t>(s)]; }

  MdpParams params_;
  int G_, K_, B_;
  int num_states_;
  Eigen::MatrixXd omega_;
  std::vector<std::size_t> action_offset_;
  std::vector<double> cost_;
  std::vector<double> ack_prob_;  // rho_Rx (1 - P_err), per (s, a)
};

MdpModel build_mdp(const MdpParams& params, const Eigen::MatrixXd& omega, const pep::PepTable& pep);

struct ValueIterationResult {
  double average_cost = 0;
  Eigen::VectorXd relative_values;
  std::vector<int> policy;
  int iterations = 0;
  double final_span = 0;
};

struct ValueIterationOptions {
  double tolerance = 1e-8;
  int max_iterations = 100'000;
  double aperiodicity = 0.5;  // tau in P' = tau P + (1 - tau) I
};

/// Relative value iteration on the span seminorm. Throws ConvergenceError
/// when the span does not fall below the tolerance.
ValueIterationResult relative_value_iteration(const MdpModel& mdp, const ValueIterationOptions& options = {});

/// max_s |min_a [r(s,a) + sum p h] - h(s) - lambda|
double bellman_residual(const MdpModel& mdp, double average_cost, const Eigen::VectorXd& h);

/// argmax of the belief, lowest index on ties.
int most_likely_state(const Belief& belief);

/// pi*(min(available, B_max), g_ML, k), capped at the available energy.
int mlph_action(const Belief& belief, int available, int k, const MdpModel& mdp, const ValueIterationResult& vi);

/// argmin over a = 0..available of sum_g belief(g) P_err(g, a); smallest a on ties.
int greedy_action(const Belief& belief, int available, const pep::PepTable& pep);

}  // namespace ehlink::policy
