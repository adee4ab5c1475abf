#include <doctest.h>

#include "ehlink/energy.hpp"
#include "ehlink/errors.hpp"

using namespace ehlink;
using namespace ehlink::energy;

TEST_CASE("node powers") {
  LinkEnergyConfig c;
  auto p = node_powers(c);
  CHECK(p.tx_w == doctest::Approx(0.11));
  CHECK(p.rx_w == doctest::Approx(0.8));
  c.p_out_w = 0;
  c.alpha = 3.7;
  CHECK(node_powers(c).tx_w == doctest::Approx(0.1));
}

TEST_CASE("battery_step follows the clamped recursion") {
  Battery b{3, 6, 3};
  CHECK(battery_step(b, 1, true).level == 5);
  CHECK(battery_step(Battery{6, 6, 3}, 0, true).level == 6);
  CHECK(battery_step(Battery{2, 6, 3}, 2, false).level == 0);
  CHECK(battery_step(Battery{0, 6, 3}, 3, true).level == 0);
  CHECK_THROWS_AS(battery_step(Battery{2, 6, 3}, 3, false), CausalityError);
  CHECK_THROWS_AS(battery_step(Battery{2, 6, 3}, 6, true), CausalityError);
}

TEST_CASE("unit scale for the default and reduced configurations") {
  LinkEnergyConfig c;
  const auto s = make_unit_scale(c, BatterySizing{});
  CHECK(s.tx_capacity == 24);
  CHECK(s.tx_harvest == 12);
  CHECK(s.rx_capacity == 96);
  CHECK(s.rx_harvest == 48);
  CHECK(s.rx_sample_part == 1);
  CHECK(s.rx_decode == 28);
  CHECK(s.rx_full_receive() == 32);

  c.p_dec_w = 0.5;
  const auto r = make_unit_scale(c, BatterySizing{3, 2, 2, 1.2});
  CHECK(r.tx_capacity == 12);
  CHECK(r.tx_harvest == 8);
  CHECK(r.rx_capacity == 48);
  CHECK(r.rx_harvest == 28);
  CHECK(r.rx_decode == 20);

  LinkEnergyConfig one;
  one.beta = 1;
  const auto u = make_unit_scale(one, BatterySizing{});
  CHECK(u.tx_capacity == 6);
  CHECK(u.rx_capacity == 24);
  CHECK(u.rx_decode == 7);
  CHECK(u.rx_harvest == 12);
}

TEST_CASE("full-packet action reproduces the reference power") {
  LinkEnergyConfig c;
  c.p_out_w = 0.015;
  const auto s = make_unit_scale(c, BatterySizing{});
  CHECK(tx_power_for_action(c, s, c.beta) == doctest::Approx(0.015).epsilon(1e-12));
  CHECK(tx_power_for_action(c, s, 0) == 0);
  CHECK(tx_power_for_action(c, s, 1) == 0);  // below circuit power
}

TEST_CASE("config invariants") {
  LinkEnergyConfig c;
  c.beta = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.beta = 512;  // more parts than the 256 symbols of a packet
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.beta = 256;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("harvest processes") {
  Rng rng(3);
  const HarvestProcess always = Bernoulli{1, 1, 0.33, 1.2};
  for (int i = 0; i < 100; ++i) {
    const auto a = sample_arrivals(always, rng, 1);
    CHECK(a.tx_j == 0.33);
    CHECK(a.rx_j == 1.2);
  }
  const HarvestProcess both = CorrelatedBernoulli{0, 0, 0, 1, 1, 2};
  for (int i = 0; i < 100; ++i) CHECK(sample_arrivals(both, rng, 1).rx_j == 2);
  const HarvestProcess none = CompoundPoisson{0, 1, 1};
  for (int i = 0; i < 100; ++i) {
    const auto a = sample_arrivals(none, rng, 1);
    CHECK(a.tx_j == 0);
    CHECK(a.rx_j == 0);
  }

  const long n = 1'000'000;
  long tx = 0, rx = 0;
  const HarvestProcess bern = Bernoulli{0.3, 0.7, 1, 1};
  for (long i = 0; i < n; ++i) {
    const auto a = sample_arrivals(bern, rng, 1);
    tx += a.tx_j > 0;
    rx += a.rx_j > 0;
  }
  CHECK(std::abs(static_cast<double>(tx) / n - 0.3) < 0.003);
  CHECK(std::abs(static_cast<double>(rx) / n - 0.7) < 0.003);

  const CorrelatedBernoulli cb{0.1, 0.2, 0.3, 0.4, 1, 1};
  long hist[2][2] = {{0, 0}, {0, 0}};
  for (long i = 0; i < n; ++i) {
    const auto a = sample_arrivals(cb, rng, 1);
    ++hist[a.tx_j > 0][a.rx_j > 0];
  }
  CHECK(std::abs(hist[0][0] / double(n) - 0.1) < 0.005);
  CHECK(std::abs(hist[0][1] / double(n) - 0.2) < 0.005);
  CHECK(std::abs(hist[1][0] / double(n) - 0.3) < 0.005);
  CHECK(std::abs(hist[1][1] / double(n) - 0.4) < 0.005);

  const HarvestProcess tied = CorrelatedBernoulli{0.5, 0, 0, 0.5, 1, 1};
  bool identical = true;
  for (long i = 0; i < 100000; ++i) {
    const auto a = sample_arrivals(tied, rng, 1);
    identical = identical && ((a.tx_j > 0) == (a.rx_j > 0));
  }
  CHECK(identical);

  const HarvestProcess poisson = CompoundPoisson{0.8, 2.0, 1.0};
  double sum_tx = 0;
  for (long i = 0; i < n; ++i) sum_tx += sample_arrivals(poisson, rng, 1).tx_j;
  CHECK(sum_tx / n == doctest::Approx(1.6).epsilon(0.01));

  CHECK_THROWS_AS(validate(HarvestProcess{CorrelatedBernoulli{0.5, 0.5, 0.5, 0, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(HarvestProcess{Bernoulli{1.2, 0.5, 1, 1}}), std::invalid_argument);
}

TEST_CASE("harvest weights") {
  const auto w = harvest_weights(Bernoulli{0.3, 0.6, 1, 1}, 1);
  CHECK(w.both == doctest::Approx(0.18));
  CHECK(w.tx_only == doctest::Approx(0.12));
  CHECK(w.rx_only == doctest::Approx(0.42));
  CHECK(w.neither == doctest::Approx(0.28));
  CHECK(w.rho_tx() == doctest::Approx(0.3));
}
