#include "ehlink/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ehlink/markov.hpp"

namespace ehlink::channel {

std::vector<double> partition_rayleigh(int num_states, double mean_gain) {
  if (num_states < 1) throw std::invalid_argument("partition_rayleigh: num_states must be >= 1");
  if (!(mean_gain > 0)) throw std::invalid_argument("partition_rayleigh: mean_gain must be > 0");
  std::vector<double> b(static_cast<std::size_t>(num_states) + 1);
  b.front() = 0.0;
  for (int k = 1; k < num_states; ++k)
    b[static_cast<std::size_t>(k)] = -mean_gain * std::log1p(-static_cast<double>(k) / num_states);
  b.back() = kInfinity;
  return b;
}

double mean_power_gain(std::span<const double> boundaries, int interval, double mean_gain) {
  if (!(mean_gain > 0)) throw std::invalid_argument("mean_power_gain: mean_gain must be > 0");
  if (interval < 0 || static_cast<std::size_t>(interval) + 1 >= boundaries.size())
    throw std::invalid_argument("mean_power_gain: interval index out of range");
  const double lo = boundaries[static_cast<std::size_t>(interval)];
  const double hi = boundaries[static_cast<std::size_t>(interval) + 1];
  if (!(hi > lo)) throw std::invalid_argument("mean_power_gain: empty interval");
  if (std::isinf(hi)) return lo + mean_gain;  // memorylessness
  // E[g | lo <= g < hi] = lo + mean - w / (exp(w / mean) - 1), w = hi - lo
  const double w = hi - lo;
  return lo + mean_gain - w / std::expm1(w / mean_gain);
}

Eigen::VectorXd interval_masses(std::span<const double> boundaries, double mean_gain) {
  const auto n = static_cast<Eigen::Index>(boundaries.size()) - 1;
  Eigen::VectorXd m(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = boundaries[static_cast<std::size_t>(i)];
    const double hi = boundaries[static_cast<std::size_t>(i) + 1];
    const double tail_hi = std::isinf(hi) ? 0.0 : std::exp(-hi / mean_gain);
    m(i) = std::exp(-lo / mean_gain) - tail_hi;
  }
  return m;
}

Eigen::MatrixXd level_crossing_matrix(std::span<const double> boundaries, double mean_gain, double doppler_fdts) {
  if (doppler_fdts < 0) throw std::invalid_argument("level_crossing_matrix: negative Doppler");
  const auto n = static_cast<Eigen::Index>(boundaries.size()) - 1;
  const Eigen::VectorXd pi = interval_masses(boundaries, mean_gain);
  auto crossings = [&](double g) {
    if (g <= 0 || std::isinf(g)) return 0.0;
    return std::sqrt(2 * std::numbers::pi * g / mean_gain) * doppler_fdts * std::exp(-g / mean_gain);
  };
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k + 1 < n) P(k, k + 1) = crossings(boundaries[static_cast<std::size_t>(k) + 1]) / pi(k);
    if (k > 0) P(k, k - 1) = crossings(boundaries[static_cast<std::size_t>(k)]) / pi(k);
    const double off = P.row(k).sum();
    if (off > 1)
      throw std::invalid_argument("level_crossing_matrix: Doppler too large for " + std::to_string(n) +
                                  " states (row " + std::to_string(k) + " leaves with probability " +
                                  std::to_string(off) + ")");
    P(k, k) = 1 - off;
  }
  return P;
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition) {
  Eigen::VectorXd w = stationary_distribution(transition);
  if (stationary_residual(w, transition) > 1e-10)
    throw std::runtime_error("steady_state: residual above 1e-10");
  return w;
}

ChannelModel::ChannelModel(std::vector<double> boundaries, Eigen::MatrixXd transition, double mean_gain)
    : boundaries_(std::move(boundaries)), transition_(std::move(transition)), mean_gain_(mean_gain) {
  if (!(mean_gain_ > 0)) throw std::invalid_argument("ChannelModel: mean gain must be > 0");
  const auto n = transition_.rows();
  if (static_cast<Eigen::Index>(boundaries_.size()) != n + 1)
    throw std::invalid_argument("ChannelModel: need num_states + 1 boundaries");
  if (boundaries_.front() != 0.0 || !std::isinf(boundaries_.back()))
    throw std::invalid_argument("ChannelModel: boundaries must run from 0 to infinity");
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    if (!(boundaries_[i] > boundaries_[i - 1]))
      throw std::invalid_argument("ChannelModel: boundaries must be strictly increasing");
  require_row_stochastic(transition_, 1e-12);

  steady_state_ = channel::steady_state(transition_);
  mean_gains_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) mean_gains_(i) = mean_power_gain(boundaries_, static_cast<int>(i), mean_gain_);

  cumulative_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) cumulative_(j, i) = (acc += transition_(i, j));
    cumulative_(n - 1, i) = 1.0;
  }
  steady_cumulative_.resize(n);
  double acc = 0;
  for (Eigen::Index j = 0; j < n; ++j) steady_cumulative_(j) = (acc += steady_state_(j));
  steady_cumulative_(n - 1) = 1.0;
}

ChannelModel ChannelModel::rayleigh(int num_states, double mean_gain, double doppler_fdts) {
  auto b = partition_rayleigh(num_states, mean_gain);
  Eigen::MatrixXd P = level_crossing_matrix(b, mean_gain, doppler_fdts);
  return ChannelModel(std::move(b), std::move(P), mean_gain);
}

int ChannelModel::sample_row(const double* cumulative, Eigen::Index n, double u) {
  int j = 0;
  while (j + 1 < n && !(u < cumulative[j])) ++j;
  return j;
}

int ChannelModel::step(int state, Rng& rng) const {
  if (state < 0 || state >= num_states()) throw std::out_of_range("ChannelModel::step: state index");
  return sample_row(cumulative_.col(state).data(), cumulative_.rows(), uniform01(rng));
}

int ChannelModel::sample_steady_state(Rng& rng) const { return sample_row(steady_cumulative_.data(), steady_cumulative_.size(), uniform01(rng)); }

}  // namespace ehlink::channel
