#pragma once

#include <string>

#include "ehlink/energy.hpp"
#include "ehlink/rng.hpp"

namespace ehlink::protocol {

enum class FeedbackKind { Ack, Nak, NakX };

/// ARQ feedback message. NakX with x = 0 is NAK0, distinct from NAK.
struct Feedback {
  FeedbackKind kind = FeedbackKind::Ack;
  int x = 0;

  static Feedback ack() { return {FeedbackKind::Ack, 0}; }
  static Feedback nak() { return {FeedbackKind::Nak, 0}; }
  static Feedback nakx(int x) { return {FeedbackKind::NakX, x}; }

  /// ACK = 0, NAK = 1, NAKx = 2 + x. Alphabet size is beta + 3.
  int index() const;
  static Feedback from_index(int index, int beta);
  static int alphabet_size(int beta) { return beta + 3; }

  /// Parts of the current packet the receiver holds.
  int stored_parts() const { return kind == FeedbackKind::NakX ? x : 0; }
  std::string to_string() const;

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

/// Parts still to send: beta - x after NAKx, the full packet otherwise.
inline int pending_parts(const Feedback& z, int beta) { return beta - z.stored_parts(); }

/// Feedback state kept when the transmitter stays silent. A fresh packet
/// that was not sent still counts as an attempt, so ACK becomes NAK.
Feedback silent_feedback(const Feedback& z);

/// k+ = (k mod K) 1{Z != ACK} + 1
int advance_retrans_index(int k, int K, const Feedback& feedback);

/// Retransmission index after the slot and whether the packet was dropped.
struct IndexUpdate {
  int k;
  bool dropped;
};
IndexUpdate next_index(int k, int K, const Feedback& feedback);

struct TxFrameState {
  int retrans_index = 1;
  Feedback last_feedback = Feedback::ack();
  int pending(int beta) const { return pending_parts(last_feedback, beta); }
};

/// Samples held by the receiver, with the worst per-part packet error
/// probability among them.
struct RxSampleStore {
  int parts = 0;
  double worst_pep = 0;

  void clear() { *this = RxSampleStore{}; }
};

// Transmitter.

/// Units spent to send `pending` of `beta` parts with full-packet action `a`.
int transmit_cost(int action, int pending, int beta);

struct TransmitterPlan {
  bool active = false;  // the receiver gets a slot to sample or decode
  int sent_parts = 0;
  int spend = 0;
};

/// action = 0 keeps the transmitter silent unless nothing is pending (all
/// parts stored at the receiver), in which case the receiver may decode.
/// Throws CausalityError when the action costs more than `available`.
TransmitterPlan plan_transmitter(int pending, int action, int available, int beta);

/// Largest fixed action the transmitter can afford this slot: `fixed` when
/// its cost fits in `available`, else 0.
int affordable_fixed_action(int fixed, int pending, int available, int beta);

// Receiver.

struct ReceiverPlan {
  bool decode = false;
  int spend = 0;
  Feedback on_no_decode = Feedback::nakx(0);  // meaningful when !decode
  int stored_after = 0;                       // parts held after a non-decoding slot
};

/// Deterministic part of the receiver's slot. `conventional` selects plain
/// ACK/NAK behaviour (no selective sampling); used for beta = 1.
/// Throws ProtocolError when stored + incoming != beta.
ReceiverPlan plan_receiver(int stored, int incoming, int available, const energy::UnitScale& scale,
                           bool conventional);

struct ReceiverResult {
  Feedback feedback;
  int spend = 0;
};

/// Executes a slot at the receiver: draws the decode outcome with
/// 1 - max(stored worst, incoming part PEP) and updates the store.
ReceiverResult receiver_step(RxSampleStore& store, int incoming, double incoming_pep, int available,
                             const energy::UnitScale& scale, bool conventional, Rng& decode_rng);

struct TransmitterResult {
  int sent_parts = 0;
  int spend = 0;
  bool active = false;
};

TransmitterResult transmitter_step(const TxFrameState& state, int action, int available, int beta);

}  // namespace ehlink::protocol
