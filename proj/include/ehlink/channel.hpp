#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

#include "ehlink/rng.hpp"

namespace ehlink::channel {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Boundaries 0 = g_0 < g_1 < ... < g_N = inf of an N-state partition of the
/// Rayleigh power gain (exponential with the given mean) in which every
/// interval carries probability 1/N.
std::vector<double> partition_rayleigh(int num_states, double mean_gain);

/// Conditional mean of the exponential gain on [boundaries[i], boundaries[i+1]).
double mean_power_gain(std::span<const double> boundaries, int interval, double mean_gain);

/// Probability mass of the exponential gain on each interval.
Eigen::VectorXd interval_masses(std::span<const double> boundaries, double mean_gain);

/// Slow-fading tridiagonal transition matrix from level-crossing rates:
/// p(k -> k+1) = N(g_{k+1}) Ts / pi_k, p(k -> k-1) = N(g_k) Ts / pi_k with
/// N(g) Ts = sqrt(2 pi g / mean) fd Ts exp(-g / mean).
Eigen::MatrixXd level_crossing_matrix(std::span<const double> boundaries, double mean_gain, double doppler_fdts);

/// Left eigenvector of a row-stochastic matrix for eigenvalue 1, summing to 1.
/// Throws AmbiguityError when the chain has more than one closed class.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition);

/// Finite-state Markov abstraction of the fading link. Immutable once built.
class ChannelModel {
 public:
  ChannelModel(std::vector<double> boundaries, Eigen::MatrixXd transition, double mean_gain);

  /// Equal-probability partition with the level-crossing transition matrix.
  static ChannelModel rayleigh(int num_states, double mean_gain, double doppler_fdts);

  int num_states() const { return static_cast<int>(transition_.rows()); }
  const std::vector<double>& boundaries() const { return boundaries_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::VectorXd& steady_state() const { return steady_state_; }
  const Eigen::VectorXd& mean_gains() const { return mean_gains_; }
  double mean_channel_gain() const { return mean_gain_; }

  int step(int state, Rng& rng) const;
  int sample_steady_state(Rng& rng) const;

 private:
  static int sample_row(const double* cumulative, Eigen::Index n, double u);

  std::vector<double> boundaries_;
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd cumulative_;  // row-wise cumulative sums, stored transposed
  Eigen::VectorXd steady_state_;
  Eigen::VectorXd steady_cumulative_;
  Eigen::VectorXd mean_gains_;
  double mean_gain_;
};

}  // namespace ehlink::channel
