#include <doctest.h>

#include "ehlink/energy.hpp"
#include "ehlink/errors.hpp"
#include "ehlink/protocol.hpp"

using namespace ehlink;
using namespace ehlink::protocol;

namespace {

energy::UnitScale default_scale() { return energy::make_unit_scale(energy::LinkEnergyConfig{}, energy::BatterySizing{}); }

}  // namespace

TEST_CASE("feedback alphabet") {
  for (int beta : {1, 2, 4, 8}) {
    CHECK(Feedback::alphabet_size(beta) == beta + 3);
    for (int i = 0; i < Feedback::alphabet_size(beta); ++i) CHECK(Feedback::from_index(i, beta).index() == i);
  }
  CHECK(Feedback::nakx(0) != Feedback::nak());
  CHECK(Feedback::nakx(3).to_string() == "NAK3");
  CHECK(pending_parts(Feedback::nakx(3), 4) == 1);
  CHECK(pending_parts(Feedback::nak(), 4) == 4);
  CHECK(pending_parts(Feedback::ack(), 4) == 4);
  CHECK_THROWS_AS(Feedback::from_index(7, 4), std::out_of_range);
}

TEST_CASE("receiver stores three parts then asks for the last") {
  const auto s = default_scale();  // sample part 1, decode 28
  // 3 units cover three parts but not the decode
  const auto p = plan_receiver(0, 4, 3, s, false);
  CHECK_FALSE(p.decode);
  CHECK(p.spend == 3);
  CHECK(p.on_no_decode == Feedback::nakx(3));
  CHECK(p.stored_after == 3);

  // next slot: one incoming part, energy for part plus decode
  const auto q = plan_receiver(3, 1, 29, s, false);
  CHECK(q.decode);
  CHECK(q.spend == 29);

  const auto full = plan_receiver(0, 4, 32, s, false);
  CHECK(full.decode);
  CHECK(full.spend == 32);

  const auto empty = plan_receiver(0, 4, 0, s, false);
  CHECK_FALSE(empty.decode);
  CHECK(empty.spend == 0);
  CHECK(empty.on_no_decode == Feedback::nakx(0));

  const auto conv = plan_receiver(0, 4, 10, s, true);
  CHECK(conv.on_no_decode == Feedback::nak());
  CHECK(conv.spend == 4);
  CHECK(conv.stored_after == 0);

  CHECK_THROWS_AS(plan_receiver(1, 4, 40, s, false), ProtocolError);
}

TEST_CASE("receiver_step decodes with the worst stored part") {
  const auto s = default_scale();
  Rng rng(1);
  RxSampleStore store;
  auto r = receiver_step(store, 4, 0.3, 2, s, false, rng);
  CHECK(r.feedback == Feedback::nakx(2));
  CHECK(store.parts == 2);
  CHECK(store.worst_pep == 0.3);
  // the remaining parts arrive perfectly but the stored ones fail w.p. 0.3
  long acks = 0;
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    RxSampleStore st{2, 0.3};
    const auto out = receiver_step(st, 2, 0.0, 40, s, false, rng);
    acks += out.feedback == Feedback::ack();
    CHECK(st.parts == 0);
  }
  CHECK(std::abs(acks / double(n) - 0.7) < 0.005);

  RxSampleStore sure;
  CHECK(receiver_step(sure, 4, 0.0, 40, s, false, rng).feedback == Feedback::ack());
  RxSampleStore never;
  CHECK(receiver_step(never, 4, 1.0, 40, s, false, rng).feedback == Feedback::nak());
}

TEST_CASE("transmitter planning") {
  CHECK(transmit_cost(12, 1, 4) == 3);
  CHECK(transmit_cost(13, 1, 4) == 4);
  CHECK(transmit_cost(12, 4, 4) == 12);
  CHECK(transmit_cost(0, 4, 4) == 0);

  const auto one = plan_transmitter(1, 12, 5, 4);  // after NAK3
  CHECK(one.active);
  CHECK(one.sent_parts == 1);
  CHECK(one.spend == 3);

  const auto silent = plan_transmitter(4, 0, 24, 4);
  CHECK_FALSE(silent.active);
  CHECK(silent.spend == 0);

  const auto nothing_left = plan_transmitter(0, 0, 0, 4);
  CHECK(nothing_left.active);
  CHECK(nothing_left.sent_parts == 0);
  CHECK(nothing_left.spend == 0);

  CHECK_THROWS_AS(plan_transmitter(4, 12, 11, 4), CausalityError);
  CHECK(affordable_fixed_action(12, 4, 11, 4) == 0);
  CHECK(affordable_fixed_action(12, 2, 11, 4) == 12);
}

TEST_CASE("retransmission index and silent slots") {
  CHECK(silent_feedback(Feedback::ack()) == Feedback::nak());
  CHECK(silent_feedback(Feedback::nakx(2)) == Feedback::nakx(2));
  CHECK(silent_feedback(Feedback::nak()) == Feedback::nak());

  CHECK(advance_retrans_index(1, 4, Feedback::nak()) == 2);
  CHECK(advance_retrans_index(3, 4, Feedback::ack()) == 1);
  CHECK(advance_retrans_index(4, 4, Feedback::nakx(1)) == 1);
  CHECK(advance_retrans_index(1, 1, Feedback::nak()) == 1);
  CHECK_THROWS_AS(advance_retrans_index(5, 4, Feedback::nak()), std::out_of_range);

  CHECK(next_index(4, 4, Feedback::nak()).dropped);
  CHECK_FALSE(next_index(4, 4, Feedback::ack()).dropped);
  CHECK_FALSE(next_index(3, 4, Feedback::nak()).dropped);
}

TEST_CASE("stored plus pending always makes one packet") {
  const auto s = default_scale();
  Rng rng(5);
  const int beta = s.beta;
  RxSampleStore store;
  TxFrameState tx;
  for (int slot = 0; slot < 100000; ++slot) {
    const int avail_t = static_cast<int>(rng() % 30);
    const int avail_r = static_cast<int>(rng() % 40);
    const int pending = tx.pending(beta);
    const int action = affordable_fixed_action(12, pending, avail_t, beta);
    const auto t = transmitter_step(tx, action, avail_t, beta);
    CHECK(t.spend <= avail_t);
    Feedback fb;
    if (t.active) {
      const auto r = receiver_step(store, t.sent_parts, 0.2, avail_r, s, false, rng);
      CHECK(r.spend <= avail_r);
      fb = r.feedback;
    } else {
      fb = silent_feedback(tx.last_feedback);
    }
    tx.retrans_index = advance_retrans_index(tx.retrans_index, 4, fb);
    tx.last_feedback = fb;
    if (fb.kind != FeedbackKind::NakX) store.clear();
    if (fb.kind == FeedbackKind::NakX) CHECK(store.parts == fb.x);
    REQUIRE(store.parts + tx.pending(beta) == beta);
  }
}
