#include "ehlink/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "ehlink/errors.hpp"

namespace ehlink::protocol {

int Feedback::index() const {
  switch (kind) {
    case FeedbackKind::Ack: return 0;
    case FeedbackKind::Nak: return 1;
    case FeedbackKind::NakX: return 2 + x;
  }
  return -1;
}

Feedback Feedback::from_index(int index, int beta) {
  if (index < 0 || index >= alphabet_size(beta)) throw std::out_of_range("feedback index out of range");
  if (index == 0) return ack();
  if (index == 1) return nak();
  return nakx(index - 2);
}

std::string Feedback::to_string() const {
  switch (kind) {
    case FeedbackKind::Ack: return "ACK";
    case FeedbackKind::Nak: return "NAK";
    case FeedbackKind::NakX: return "NAK" + std::to_string(x);
  }
  return "?";
}

Feedback silent_feedback(const Feedback& z) { return z.kind == FeedbackKind::Ack ? Feedback::nak() : z; }

int advance_retrans_index(int k, int K, const Feedback& feedback) {
  if (k < 1 || k > K) throw std::out_of_range("retransmission index out of range");
  return feedback.kind == FeedbackKind::Ack ? 1 : (k % K) + 1;
}

IndexUpdate next_index(int k, int K, const Feedback& feedback) {
  const int next = advance_retrans_index(k, K, feedback);
  return {next, feedback.kind != FeedbackKind::Ack && k == K};
}

int transmit_cost(int action, int pending, int beta) {
  if (action <= 0 || pending <= 0) return 0;
  return (action * pending + beta - 1) / beta;
}

TransmitterPlan plan_transmitter(int pending, int action, int available, int beta) {
  if (pending < 0 || pending > beta) throw ProtocolError("transmitter: pending parts out of range");
  if (action < 0) throw std::invalid_argument("transmitter: negative action");
  if (pending == 0) return {true, 0, 0};
  if (action == 0) return {};
  const int spend = transmit_cost(action, pending, beta);
  if (spend > available)
    throw CausalityError("transmitter: action costs " + std::to_string(spend) + " units with " +
                         std::to_string(available) + " available");
  return {true, pending, spend};
}

int affordable_fixed_action(int fixed, int pending, int available, int beta) {
  return transmit_cost(fixed, pending, beta) <= available ? fixed : 0;
}

ReceiverPlan plan_receiver(int stored, int incoming, int available, const energy::UnitScale& scale,
                           bool conventional) {
  const int beta = scale.beta;
  if (stored < 0 || incoming < 0 || stored + incoming != beta)
    throw ProtocolError("receiver: stored " + std::to_string(stored) + " + incoming " + std::to_string(incoming) +
                        " parts does not make a packet of " + std::to_string(beta));
  ReceiverPlan plan;
  const int sampling = incoming * scale.rx_sample_part;
  if (available >= sampling + scale.rx_decode) {
    plan.decode = true;
    plan.spend = sampling + scale.rx_decode;
    return plan;
  }
  if (conventional) {
    plan.spend = std::min(available, sampling);
    plan.on_no_decode = Feedback::nak();
    plan.stored_after = 0;
    return plan;
  }
  const int parts = std::min(incoming, available / scale.rx_sample_part);
  plan.spend = parts * scale.rx_sample_part;
  plan.stored_after = stored + parts;
  plan.on_no_decode = Feedback::nakx(plan.stored_after);
  return plan;
}

ReceiverResult receiver_step(RxSampleStore& store, int incoming, double incoming_pep, int available,
                             const energy::UnitScale& scale, bool conventional, Rng& decode_rng) {
  const ReceiverPlan plan = plan_receiver(store.parts, incoming, available, scale, conventional);
  if (plan.decode) {
    const double pep = incoming > 0 ? std::max(store.worst_pep, incoming_pep) : store.worst_pep;
    const bool ok = uniform01(decode_rng) >= pep;
    store.clear();
    return {ok ? Feedback::ack() : Feedback::nak(), plan.spend};
  }
  if (plan.stored_after > store.parts) store.worst_pep = std::max(store.worst_pep, incoming_pep);
  store.parts = plan.stored_after;
  if (store.parts == 0) store.worst_pep = 0;
  return {plan.on_no_decode, plan.spend};
}

TransmitterResult transmitter_step(const TxFrameState& state, int action, int available, int beta) {
  const TransmitterPlan p = plan_transmitter(state.pending(beta), action, available, beta);
  return {p.sent_parts, p.spend, p.active};
}

}  // namespace ehlink::protocol
