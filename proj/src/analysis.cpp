#include "ehlink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ehlink/errors.hpp"
#include "ehlink/markov.hpp"

namespace ehlink::analysis {

using protocol::Feedback;
using protocol::FeedbackKind;

void ChainConfig::validate() const {
  if (max_attempts < 1) throw std::invalid_argument("analysis: K must be positive");
  if (fixed_action < 1) throw std::invalid_argument("analysis: fixed action must be positive");
  if (scale.beta < 1 || scale.rx_sample_part < 1) throw std::invalid_argument("analysis: bad unit scale");
  if (conventional && scale.beta != 1) throw std::invalid_argument("analysis: conventional ARQ needs beta = 1");
  const auto& w = weights;
  if (std::abs(w.both + w.tx_only + w.rx_only + w.neither - 1) > 1e-12)
    throw std::invalid_argument("analysis: harvest weights must sum to 1");
}

SlotSpace::SlotSpace(const ChainConfig& cfg)
    : bt_(cfg.scale.tx_capacity),
      br_(cfg.scale.rx_capacity),
      nz_(Feedback::alphabet_size(cfg.scale.beta)),
      K_(cfg.max_attempts),
      size_((bt_ + 1) * (br_ + 1) * nz_ * K_) {}

SlotState SlotSpace::state(int index) const {
  SlotState s;
  s.k = index % K_ + 1;
  index /= K_;
  s.z = index % nz_;
  index /= nz_;
  s.j = index % (br_ + 1);
  s.i = index / (br_ + 1);
  return s;
}

namespace {

struct Outcome {
  int q, r;
  Feedback w;
  double prob;
};

void append(std::vector<SlotTransition>& out, const ChainConfig& cfg, const SlotState& from, const Outcome& o) {
  if (o.prob <= 0) return;
  SlotTransition t;
  t.prob = o.prob;
  const auto upd = protocol::next_index(from.k, cfg.max_attempts, o.w);
  t.success = o.w.kind == FeedbackKind::Ack;
  t.drop = upd.dropped;
  const Feedback w = t.drop ? Feedback::ack() : o.w;
  t.target = {o.q, o.r, w.index(), upd.k};
  out.push_back(t);
}

}  // namespace

std::vector<SlotTransition> slot_transitions(const ChainConfig& cfg, const SlotState& from, double pep) {
  const auto& s = cfg.scale;
  const int beta = s.beta;
  const Feedback z = Feedback::from_index(from.z, beta);
  const int stored = z.stored_parts();
  const int pending = beta - stored;
  std::vector<SlotTransition> out;
  out.reserve(8);
  const double case_weight[2][2] = {{cfg.weights.neither, cfg.weights.rx_only},
                                    {cfg.weights.tx_only, cfg.weights.both}};
  for (int ht = 1; ht >= 0; --ht) {
    for (int hr = 1; hr >= 0; --hr) {
      const double w = case_weight[ht][hr];
      if (w <= 0) continue;
      const int avail_t = from.i + (ht ? s.tx_harvest : 0);
      const int avail_r = from.j + (hr ? s.rx_harvest : 0);
      const int a = protocol::affordable_fixed_action(cfg.fixed_action, pending, avail_t, beta);
      const auto tx = protocol::plan_transmitter(pending, a, avail_t, beta);
      if (!tx.active) {
        append(out, cfg, from,
               {std::min(avail_t, s.tx_capacity), std::min(avail_r, s.rx_capacity), protocol::silent_feedback(z), w});
        continue;
      }
      const auto rx = protocol::plan_receiver(stored, tx.sent_parts, avail_r, s, cfg.conventional);
      const int q = std::min(avail_t - tx.spend, s.tx_capacity);
      const int r = std::min(avail_r - rx.spend, s.rx_capacity);
      if (rx.decode) {
        int q_ack = q;
        if (cfg.variant.rx_only_ack_refill && !ht && hr) q_ack = std::min(avail_t + s.tx_harvest - tx.spend, s.tx_capacity);
        append(out, cfg, from, {q_ack, r, Feedback::ack(), w * (1 - pep)});
        append(out, cfg, from, {q, r, Feedback::nak(), w * pep});
      } else {
        Feedback fb = rx.on_no_decode;
        if (!cfg.variant.cumulative_x && fb.kind == FeedbackKind::NakX) fb = Feedback::nakx(rx.stored_after - stored);
        append(out, cfg, from, {q, r, fb, w});
      }
    }
  }
  return out;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> build_xi(const ChainConfig& cfg, double pep) {
  cfg.validate();
  const SlotSpace space(cfg);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(space.size()) * 8);
  for (int n = 0; n < space.size(); ++n) {
    const SlotState st = space.state(n);
    double total = 0;
    for (const auto& t : slot_transitions(cfg, st, pep)) {
      trips.emplace_back(n, space.index(t.target), t.prob);
      total += t.prob;
    }
    if (std::abs(total - 1) > 1e-9)
      throw ConsistencyError("build_xi: row " + std::to_string(n) + " sums to " + std::to_string(total));
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> xi(space.size(), space.size());
  xi.setFromTriplets(trips.begin(), trips.end());
  return xi;
}

FrameKernel frame_kernel(const ChainConfig& cfg, double pep) {
  cfg.validate();
  const SlotSpace space(cfg);
  const int nb = space.battery_pairs();
  FrameKernel fk;
  fk.transition = Eigen::MatrixXd::Zero(nb, nb);
  fk.drop = Eigen::VectorXd::Zero(nb);
  fk.mean_slots = Eigen::VectorXd::Zero(nb);
  struct Mass {
    SlotState s;
    double p;
  };
  std::vector<Mass> live, next;
  for (int i = 0; i <= cfg.scale.tx_capacity; ++i) {
    for (int j = 0; j <= cfg.scale.rx_capacity; ++j) {
      const int start = space.pair_index(i, j);
      live.assign(1, {{i, j, Feedback::ack().index(), 1}, 1.0});
      for (int slot = 1; slot <= cfg.max_attempts && !live.empty(); ++slot) {
        next.clear();
        for (const auto& m : live) {
          for (const auto& t : slot_transitions(cfg, m.s, pep)) {
            const double p = m.p * t.prob;
            if (t.success || t.drop) {
              fk.transition(start, space.pair_index(t.target.i, t.target.j)) += p;
              fk.mean_slots(start) += p * slot;
              if (t.drop) fk.drop(start) += p;
            } else {
              next.push_back({t.target, p});
            }
          }
        }
        // merge duplicates
        std::sort(next.begin(), next.end(), [&](const Mass& a, const Mass& b) {
          return space.index(a.s) < space.index(b.s);
        });
        live.clear();
        for (const auto& m : next) {
          if (!live.empty() && space.index(live.back().s) == space.index(m.s))
            live.back().p += m.p;
          else
            live.push_back(m);
        }
      }
      if (!live.empty()) throw ConsistencyError("frame_kernel: frame outlived K slots");
    }
  }
  return fk;
}

PdpResult chain_pdp(const ChainConfig& cfg, const Eigen::MatrixXd& omega, const Eigen::VectorXd& pep) {
  const int G = static_cast<int>(omega.rows());
  if (pep.size() != G) throw std::invalid_argument("chain_pdp: one PEP per channel state required");
  require_row_stochastic(omega, 1e-10);
  std::vector<FrameKernel> kernels;
  for (int g = 0; g < G; ++g) kernels.push_back(frame_kernel(cfg, pep(g)));
  const int nb = static_cast<int>(kernels.front().drop.size());
  const int n = nb * G;
  std::vector<Eigen::Triplet<double>> trips;
  for (int g = 0; g < G; ++g)
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) {
        const double f = kernels[static_cast<std::size_t>(g)].transition(a, b);
        if (f <= 0) continue;
        for (int g2 = 0; g2 < G; ++g2)
          if (omega(g, g2) > 0) trips.emplace_back(g * nb + a, g2 * nb + b, f * omega(g, g2));
      }
  Eigen::SparseMatrix<double> P(n, n);
  P.setFromTriplets(trips.begin(), trips.end());
  const Eigen::VectorXd pi = stationary_distribution(P);
  PdpResult res;
  res.psi = Eigen::VectorXd::Zero(nb);
  for (int g = 0; g < G; ++g) {
    const auto block = pi.segment(g * nb, nb);
    res.psi += block;
    res.pdp += block.dot(kernels[static_cast<std::size_t>(g)].drop);
  }
  res.pdp = std::clamp(res.pdp, 0.0, 1.0);
  return res;
}

Eigen::MatrixXd battery_kernel(const ChainConfig& cfg, const Eigen::VectorXd& omega_o, const Eigen::VectorXd& pep) {
  cfg.validate();
  const SlotSpace space(cfg);
  const int nb = space.battery_pairs();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(nb, nb);
  for (int l = 0; l < omega_o.size(); ++l) {
    if (omega_o(l) <= 0) continue;
    for (int i = 0; i <= cfg.scale.tx_capacity; ++i)
      for (int j = 0; j <= cfg.scale.rx_capacity; ++j)
        for (const auto& t : slot_transitions(cfg, {i, j, Feedback::ack().index(), 1}, pep(l)))
          psi(space.pair_index(i, j), space.pair_index(t.target.i, t.target.j)) += omega_o(l) * t.prob;
  }
  return psi;
}

Eigen::VectorXd stationary_psi(const Eigen::MatrixXd& kernel) { return stationary_distribution(kernel); }

double attempt_success_bound(const ChainConfig& cfg, int i, int j, double pep) {
  const auto& s = cfg.scale;
  const double rt = cfg.weights.rho_tx(), rr = cfg.weights.rho_rx();
  const double phi_tx = i >= cfg.fixed_action ? 1 : 0;
  const double phi_rx = j >= s.rx_full_receive() ? 1 : 0;
  const double phi_dec = j >= s.rx_decode ? 1 : 0;
  // exactly one x with x/beta E_C,Rx <= j E_min < (x+1)/beta E_C,Rx, if x <= beta
  const double phi_rx_x = j < (s.beta + 1) * s.rx_sample_part ? 1 : 0;
  const double bracket = rt * rr * pep + (1 - rt) * rr * phi_tx * pep +
                         rt * (1 - rr) * (pep * (phi_rx + phi_dec) + phi_rx_x) +
                         (1 - rt) * (1 - rr) * (phi_tx * pep * (phi_rx + phi_dec) + phi_rx_x);
  return std::clamp(1 - bracket, 0.0, 1.0);
}

double p_suc_k(int k, double attempt_success) {
  if (k < 1) return 0;
  return attempt_success * std::pow(1 - attempt_success, k - 1);
}

double drop_from_attempt(int K, double attempt_success) {
  double delivered = 0;
  for (int k = 1; k <= K; ++k) delivered += attempt_success * (1 - delivered);
  return std::clamp(1 - delivered, 0.0, 1.0);
}

PdpResult bound_pdp(const ChainConfig& cfg, const Eigen::VectorXd& omega_o, const Eigen::VectorXd& pep) {
  PdpResult res;
  res.psi = stationary_psi(battery_kernel(cfg, omega_o, pep));
  const SlotSpace space(cfg);
  for (int i = 0; i <= cfg.scale.tx_capacity; ++i)
    for (int j = 0; j <= cfg.scale.rx_capacity; ++j) {
      double d = 0;
      for (int g = 0; g < omega_o.size(); ++g)
        d += omega_o(g) * drop_from_attempt(cfg.max_attempts, attempt_success_bound(cfg, i, j, pep(g)));
      res.pdp += res.psi(space.pair_index(i, j)) * d;
    }
  res.pdp = std::clamp(res.pdp, 0.0, 1.0);
  return res;
}

}  // namespace ehlink::analysis
