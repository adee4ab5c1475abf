#pragma once

#include <Eigen/Dense>

#include "ehlink/pep.hpp"
#include "ehlink/protocol.hpp"

namespace ehlink::policy {

using Belief = Eigen::VectorXd;

/// p(Z | a, g) for every channel state. NAK: rho_Rx P_err, ACK: rho_Rx (1 - P_err),
/// NAKx: 1 - rho_Rx. With a = 0 the previous likelihood is returned.
Eigen::VectorXd observation_likelihood(const protocol::Feedback& feedback, int action, const pep::PepTable& pep,
                                       double rho_rx, const Eigen::VectorXd& previous);

/// Bayes correction; throws DegenerateObservationError when the likelihood
/// assigns zero mass to every state with positive prior.
Belief correct(const Belief& prior, const Eigen::VectorXd& likelihood);

/// Markov prediction through the channel matrix.
inline Belief predict(const Belief& posterior, const Eigen::MatrixXd& omega) {
  return (posterior.transpose() * omega).transpose();
}

/// Correct then predict.
Belief belief_update(const Belief& prior, const Eigen::VectorXd& likelihood, const Eigen::MatrixXd& omega);

/// Per-trial belief over the hidden channel state.
class BeliefTracker {
 public:
  BeliefTracker(const Eigen::VectorXd& steady_state, const Eigen::MatrixXd& omega);

  const Belief& belief() const { return belief_; }

  /// Feeds one slot's observation. `predict_step` is false when the channel
  /// does not move after this slot (frame timescale, frame still open).
  /// An observation impossible under every state leaves the prior uncorrected
  /// and is counted in degenerate_observations().
  void observe(const protocol::Feedback& feedback, int action, const pep::PepTable& pep, double rho_rx,
               bool predict_step = true);

  long degenerate_observations() const { return degenerate_; }

 private:
  Belief steady_;
  const Eigen::MatrixXd* omega_;
  Belief belief_;
  Eigen::VectorXd likelihood_;
  long updates_ = 0;
  long degenerate_ = 0;
};

}  // namespace ehlink::policy
