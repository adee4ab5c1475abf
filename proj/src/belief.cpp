#include "ehlink/belief.hpp"

#include <cmath>

#include "ehlink/errors.hpp"

namespace ehlink::policy {

Eigen::VectorXd observation_likelihood(const protocol::Feedback& feedback, int action, const pep::PepTable& pep,
                                       double rho_rx, const Eigen::VectorXd& previous) {
  if (action == 0) return previous;
  const int n = pep.num_states();
  Eigen::VectorXd lik(n);
  for (int g = 0; g < n; ++g) {
    const double p = pep(g, std::min(action, pep.max_action()));
    switch (feedback.kind) {
      case protocol::FeedbackKind::Nak: lik(g) = rho_rx * p; break;
      case protocol::FeedbackKind::Ack: lik(g) = rho_rx * (1 - p); break;
      case protocol::FeedbackKind::NakX: lik(g) = 1 - rho_rx; break;
    }
  }
  return lik;
}

Belief correct(const Belief& prior, const Eigen::VectorXd& likelihood) {
  Belief post = prior.cwiseProduct(likelihood);
  const double mass = post.sum();
  if (!(mass > 0)) throw DegenerateObservationError("observation has zero likelihood under the current belief");
  post /= mass;
  return post;
}

Belief belief_update(const Belief& prior, const Eigen::VectorXd& likelihood, const Eigen::MatrixXd& omega) {
  Belief b = predict(correct(prior, likelihood), omega);
  b /= b.sum();
  return b;
}

BeliefTracker::BeliefTracker(const Eigen::VectorXd& steady_state, const Eigen::MatrixXd& omega)
    : steady_(steady_state),
      omega_(&omega),
      belief_(steady_state),
      likelihood_(Eigen::VectorXd::Ones(steady_state.size())) {}

void BeliefTracker::observe(const protocol::Feedback& feedback, int action, const pep::PepTable& pep,
                            double rho_rx, bool predict_step) {
  likelihood_ = observation_likelihood(feedback, action, pep, rho_rx, likelihood_);
  ++updates_;
  // The first two decisions use the steady state.
  if (updates_ < 2) {
    belief_ = steady_;
    return;
  }
  Belief post;
  try {
    post = correct(belief_, likelihood_);
  } catch (const DegenerateObservationError&) {
    ++degenerate_;
    post = belief_;
  }
  if (predict_step) post = predict(post, *omega_);
  belief_ = post / post.sum();
}

}  // namespace ehlink::policy
