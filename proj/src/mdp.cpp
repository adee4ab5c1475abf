#include "ehlink/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ehlink/errors.hpp"
#include "ehlink/markov.hpp"

namespace ehlink::policy {

MdpModel::MdpModel(const MdpParams& params, const Eigen::MatrixXd& omega, const pep::PepTable& pep)
    : params_(params),
      G_(static_cast<int>(omega.rows())),
      K_(params.max_attempts),
      B_(params.battery_capacity),
      omega_(omega) {
  if (B_ < 0 || params.harvest_units < 0 || K_ < 1) throw std::invalid_argument("mdp: invalid sizes");
  if (!(params.rho_tx >= 0 && params.rho_tx <= 1 && params.rho_rx >= 0 && params.rho_rx <= 1))
    throw std::invalid_argument("mdp: harvest probability outside [0,1]");
  require_row_stochastic(omega, 1e-10);
  if (pep.num_states() != G_) throw std::invalid_argument("mdp: PEP table and channel disagree on |G|");
  if (pep.max_action() < B_) throw std::invalid_argument("mdp: PEP table does not cover the battery capacity");
  const double states = static_cast<double>(B_ + 1) * G_ * K_;
  if (states > static_cast<double>(params.state_cap))
    throw CapacityError("mdp: " + std::to_string(static_cast<long long>(states)) + " states exceed the cap of " +
                        std::to_string(params.state_cap));
  num_states_ = static_cast<int>(states);
  action_offset_.resize(static_cast<std::size_t>(num_states_) + 1);
  std::size_t off = 0;
  for (int s = 0; s < num_states_; ++s) {
    action_offset_[static_cast<std::size_t>(s)] = off;
    off += static_cast<std::size_t>(num_actions(s));
  }
  action_offset_.back() = off;
  cost_.resize(off);
  ack_prob_.resize(off);
  for (int s = 0; s < num_states_; ++s) {
    const int g = channel_of(s);
    for (int a = 0; a < num_actions(s); ++a) {
      const double p = pep(g, a);
      const std::size_t i = offset(s) + static_cast<std::size_t>(a);
      cost_[i] = params.cost == CostModel::Pep ? p : params.rho_rx * p;
      ack_prob_[i] = params.rho_rx * (1 - p);
    }
  }
}

std::vector<MdpModel::Entry> MdpModel::transitions(int s, int a) const {
  const int b = battery_of(s), g = channel_of(s), k = attempt_of(s);
  if (a < 0 || a > b) throw CausalityError("mdp: action exceeds battery");
  const double ack = ack_prob_[offset(s) + static_cast<std::size_t>(a)];
  const int b_h = std::min(b + params_.harvest_units - a, B_);
  const int b_n = b - a;
  const int k_next = k % K_ + 1;
  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(4 * G_));
  for (int g2 = 0; g2 < G_; ++g2) {
    const double pg = omega_(g, g2);
    if (pg == 0) continue;
    for (int h = 0; h < 2; ++h) {
      const double ph = h ? params_.rho_tx : 1 - params_.rho_tx;
      if (ph == 0) continue;
      const int b2 = h ? b_h : b_n;
      if (ack > 0) out.push_back({index(b2, g2, 1), pg * ph * ack});
      if (ack < 1) out.push_back({index(b2, g2, k_next), pg * ph * (1 - ack)});
    }
  }
  return out;
}

Eigen::MatrixXd MdpModel::policy_matrix(const std::vector<int>& policy) const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(num_states_, num_states_);
  for (int s = 0; s < num_states_; ++s)
    for (const auto& e : transitions(s, policy[static_cast<std::size_t>(s)])) P(s, e.next) += e.prob;
  return P;
}

Eigen::VectorXd MdpModel::policy_costs(const std::vector<int>& policy) const {
  Eigen::VectorXd r(num_states_);
  for (int s = 0; s < num_states_; ++s) r(s) = cost(s, policy[static_cast<std::size_t>(s)]);
  return r;
}

MdpModel build_mdp(const MdpParams& params, const Eigen::MatrixXd& omega, const pep::PepTable& pep) {
  return MdpModel(params, omega, pep);
}

namespace {

struct Compiled {
  std::vector<std::size_t> action_begin;  // per state, into pair arrays
  std::vector<std::size_t> entry_begin;   // per (s, a), into entries
  std::vector<MdpModel::Entry> entries;
  std::vector<double> cost;
};

Compiled compile(const MdpModel& mdp) {
  Compiled c;
  const int n = mdp.num_states();
  c.action_begin.reserve(static_cast<std::size_t>(n) + 1);
  for (int s = 0; s < n; ++s) {
    c.action_begin.push_back(c.cost.size());
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      c.entry_begin.push_back(c.entries.size());
      c.cost.push_back(mdp.cost(s, a));
      for (const auto& e : mdp.transitions(s, a)) c.entries.push_back(e);
    }
  }
  c.action_begin.push_back(c.cost.size());
  c.entry_begin.push_back(c.entries.size());
  return c;
}

void require_weakly_accessible(const MdpModel& mdp, const Compiled& c) {
  Adjacency g(static_cast<std::size_t>(mdp.num_states()));
  for (int s = 0; s < mdp.num_states(); ++s)
    for (std::size_t pa = c.action_begin[static_cast<std::size_t>(s)]; pa < c.action_begin[static_cast<std::size_t>(s) + 1]; ++pa)
      for (std::size_t e = c.entry_begin[pa]; e < c.entry_begin[pa + 1]; ++e)
        if (c.entries[e].prob > 0) g[static_cast<std::size_t>(s)].push_back(c.entries[e].next);
  for (auto& row : g) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  const auto classes = closed_classes(g);
  if (classes.size() != 1)
    throw AmbiguityError("mdp: no state is reachable from every state (" + std::to_string(classes.size()) +
                         " closed classes)");
}

}  // namespace

ValueIterationResult relative_value_iteration(const MdpModel& mdp, const ValueIterationOptions& options) {
  const double tau = options.aperiodicity;
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("value iteration: aperiodicity must be in (0,1]");
  const Compiled c = compile(mdp);
  require_weakly_accessible(mdp, c);
  const int n = mdp.num_states();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n), next(n);
  std::vector<int> policy(static_cast<std::size_t>(n), 0);
  ValueIterationResult out;
  double span = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (int s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      int best_a = 0;
      const std::size_t first = c.action_begin[static_cast<std::size_t>(s)];
      const std::size_t last = c.action_begin[static_cast<std::size_t>(s) + 1];
      for (std::size_t pa = first; pa < last; ++pa) {
        double q = c.cost[pa];
        for (std::size_t e = c.entry_begin[pa]; e < c.entry_begin[pa + 1]; ++e) q += c.entries[e].prob * h(c.entries[e].next);
        if (q < best - 1e-14) {
          best = q;
          best_a = static_cast<int>(pa - first);
        }
      }
      next(s) = tau * best + (1 - tau) * h(s);
      policy[static_cast<std::size_t>(s)] = best_a;
    }
    const Eigen::VectorXd diff = next - h;
    span = diff.maxCoeff() - diff.minCoeff();
    out.average_cost = 0.5 * (diff.maxCoeff() + diff.minCoeff()) / tau;
    h = next.array() - next(0);
    out.iterations = it;
    if (span < options.tolerance * tau) {
      out.relative_values = h;
      out.policy = std::move(policy);
      out.final_span = span / tau;
      return out;
    }
  }
  throw ConvergenceError("value iteration did not converge in " + std::to_string(options.max_iterations) +
                             " iterations (span " + std::to_string(span / tau) + ")",
                         span / tau);
}

double bellman_residual(const MdpModel& mdp, double average_cost, const Eigen::VectorXd& h) {
  double worst = 0;
  for (int s = 0; s < mdp.num_states(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      double q = mdp.cost(s, a);
      for (const auto& e : mdp.transitions(s, a)) q += e.prob * h(e.next);
      best = std::min(best, q);
    }
    worst = std::max(worst, std::abs(best - h(s) - average_cost));
  }
  return worst;
}

int most_likely_state(const Belief& belief) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < belief.size(); ++i)
    if (belief(i) > belief(best)) best = i;
  return static_cast<int>(best);
}

int mlph_action(const Belief& belief, int available, int k, const MdpModel& mdp, const ValueIterationResult& vi) {
  if (available <= 0) return 0;
  const int b = std::min(available, mdp.battery_capacity());
  const int a = vi.policy[static_cast<std::size_t>(mdp.index(b, most_likely_state(belief), k))];
  return std::min(a, available);
}

int greedy_action(const Belief& belief, int available, const pep::PepTable& pep) {
  const int top = std::min(available, pep.max_action());
  int best_a = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= top; ++a) {
    double v = 0;
    for (int g = 0; g < pep.num_states(); ++g) v += belief(g) * pep(g, a);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace ehlink::policy
