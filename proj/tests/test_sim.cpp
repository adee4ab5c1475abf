#include <doctest.h>

#include <cmath>

#include "ehlink/sim.hpp"

using namespace ehlink;
using namespace ehlink::sim;

TEST_CASE("abundant energy delivers every packet in one slot") {
  SimConfig cfg = with_rho(SimConfig{}, 1.0);
  cfg.policy = PolicySpec::parse("equal:100");
  cfg.frames = 20000;
  const PreparedModel model(cfg);
  const auto m = run_trial(model, 1);
  CHECK(m.pdp == 0);
  CHECK(m.avg_packet_time < 1.001);
  CHECK(m.frame_count == 20000);
}

TEST_CASE("no harvest and empty batteries deliver nothing") {
  for (const char* pol : {"equal:5", "greedy"}) {
    SimConfig cfg = with_rho(SimConfig{}, 0.0);
    cfg.initial_battery = InitialBattery::Empty;
    cfg.policy = PolicySpec::parse(pol);
    cfg.frames = 2000;
    const auto m = run_trial(PreparedModel(cfg), 3);
    CHECK(m.pdp == 1);
    CHECK(m.spectral_efficiency == 0);
    CHECK(m.successes == 0);
    CHECK(std::isinf(m.avg_packet_time));
  }
}

TEST_CASE("same seed, same trial") {
  for (const char* pol : {"equal:15", "greedy", "mlph"}) {
    SimConfig cfg = with_rho(SimConfig{}, 0.4);
    cfg.policy = PolicySpec::parse(pol);
    cfg.frames = 3000;
    const PreparedModel model(cfg);
    CHECK(run_trial(model, 99) == run_trial(model, 99));
    CHECK_FALSE(run_trial(model, 99) == run_trial(model, 100));
  }
}

TEST_CASE("standard error shrinks like one over root n") {
  SimConfig cfg = with_rho(SimConfig{}, 0.5);
  cfg.policy = PolicySpec::parse("equal:5");
  cfg.frames = 500;
  const PreparedModel model(cfg);
  std::vector<double> v;
  double scaled[3];
  int idx = 0;
  for (int n : {4, 16, 64}) {
    while (static_cast<int>(v.size()) < n) v.push_back(run_trial(model, 1000 + v.size()).pdp);
    const auto s = summarize(v);
    CHECK(s.n == n);
    scaled[idx++] = s.stderr_ * std::sqrt(static_cast<double>(n));
  }
  CHECK(scaled[2] / scaled[1] > 0.5);
  CHECK(scaled[2] / scaled[1] < 2.0);
  CHECK(scaled[1] / scaled[0] > 0.33);
  CHECK(scaled[1] / scaled[0] < 3.0);
}

TEST_CASE("summary of a 0/1 sample") {
  const auto s = summarize({0.0, 1.0});
  CHECK(s.mean == 0.5);
  CHECK(s.stderr_ == doctest::Approx(0.5));
  const auto one = summarize({0.3});
  CHECK(one.mean == 0.3);
  CHECK(one.stderr_ == 0);
}

TEST_CASE("trace respects energy causality") {
  SimConfig cfg = with_rho(SimConfig{}, 0.3);
  cfg.frames = 2000;
  const PreparedModel model(cfg);
  long rows = 0;
  run_trial(model, 5, [&](const TraceRow& r) {
    ++rows;
    CHECK(r.sent_parts >= 0);
    CHECK(r.action <= r.available_tx);
    CHECK(r.tx_battery <= model.scale().tx_capacity);
    CHECK(r.rx_battery <= model.scale().rx_capacity);
    CHECK(r.tx_battery >= 0);
    REQUIRE(r.belief != nullptr);
    CHECK(std::abs(r.belief->sum() - 1) < 1e-12);
  });
  CHECK(rows > 0);
}

TEST_CASE("policy labels") {
  CHECK(PolicySpec::parse("equal:15").equal_mw == 15);
  CHECK(PolicySpec::parse("mlph").kind == PolicyKind::Mlph);
  CHECK_THROWS_AS(PolicySpec::parse("random"), std::invalid_argument);
  CHECK_THROWS_AS(PolicySpec::parse("equal:-1"), std::invalid_argument);
}
