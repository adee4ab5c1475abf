#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

#include "ehlink/energy.hpp"
#include "ehlink/protocol.hpp"

namespace ehlink::analysis {

/// Alternative chain conventions that differ from the protocol module.
struct AnalysisVariant {
  bool cumulative_x = true;         // false: NAKx carries only the newly sampled parts
  bool rx_only_ack_refill = false;  // true: ACK rows of the rx-only harvest case add L_Tx
};

/// Fixed-power link for the chain analysis.
struct ChainConfig {
  energy::UnitScale scale;
  int max_attempts = 4;  // K
  int fixed_action = 4;  // transmitter units per full packet
  energy::HarvestWeights weights;
  bool conventional = false;
  AnalysisVariant variant;

  void validate() const;
};

/// (i, j, z, k) for a fixed channel state; z is a Feedback index.
struct SlotState {
  int i = 0;
  int j = 0;
  int z = 0;
  int k = 1;
};

class SlotSpace {
 public:
  explicit SlotSpace(const ChainConfig& cfg);
  int size() const { return size_; }
  int battery_pairs() const { return (bt_ + 1) * (br_ + 1); }
  int index(const SlotState& s) const { return ((s.i * (br_ + 1) + s.j) * nz_ + s.z) * K_ + (s.k - 1); }
  int pair_index(int i, int j) const { return i * (br_ + 1) + j; }
  SlotState state(int index) const;

 private:
  int bt_, br_, nz_, K_, size_;
};

struct SlotTransition {
  SlotState target;
  double prob = 0;
  bool success = false;  // ACK this slot
  bool drop = false;     // K-th attempt failed, frame restarts
};

/// One slot from `from` with packet error probability `pep`, grouped by the
/// four harvest outcomes. Zero-probability branches are omitted.
std::vector<SlotTransition> slot_transitions(const ChainConfig& cfg, const SlotState& from, double pep);

/// Row-stochastic slot transition matrix for one channel state.
Eigen::SparseMatrix<double, Eigen::RowMajor> build_xi(const ChainConfig& cfg, double pep);

/// Frame-level behaviour from every (i, j, ACK, 1): end-of-frame battery
/// distribution and drop probability.
struct FrameKernel {
  Eigen::MatrixXd transition;  // battery pair -> battery pair
  Eigen::VectorXd drop;
  Eigen::VectorXd mean_slots;
};

FrameKernel frame_kernel(const ChainConfig& cfg, double pep);

struct PdpResult {
  double pdp = 0;
  Eigen::VectorXd psi;  // stationary battery-pair distribution, index i (B_Rx + 1) + j
};

/// Exact PDP of the frame chain over (i, j, g): channel fixed in a frame and
/// moving by `omega` between frames. pep(g) is P_err at the fixed action.
PdpResult chain_pdp(const ChainConfig& cfg, const Eigen::MatrixXd& omega, const Eigen::VectorXd& pep);

/// Battery-pair kernel of one slot from (i, j, ACK, 1) mixed over omega_o.
Eigen::MatrixXd battery_kernel(const ChainConfig& cfg, const Eigen::VectorXd& omega_o, const Eigen::VectorXd& pep);

/// Stationary distribution of a battery-pair kernel. AmbiguityError if not unique.
Eigen::VectorXd stationary_psi(const Eigen::MatrixXd& kernel);

/// Per-attempt success bound at frame-start batteries (i, j), clamped to [0, 1].
double attempt_success_bound(const ChainConfig& cfg, int i, int j, double pep);

/// P_suc,k = q (1 - sum_{l<k} P_suc,l) with P_suc,0 = 0.
double p_suc_k(int k, double attempt_success);
double drop_from_attempt(int K, double attempt_success);

/// Bound-mode average PDP: psi of the mixed one-slot kernel, conditional drop
/// from the attempt-success bound, averaged over omega_o.
PdpResult bound_pdp(const ChainConfig& cfg, const Eigen::VectorXd& omega_o, const Eigen::VectorXd& pep);

}  // namespace ehlink::analysis
