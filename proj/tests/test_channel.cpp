#include <doctest.h>

#include <cmath>
#include <functional>

#include "ehlink/channel.hpp"
#include "ehlink/errors.hpp"
#include "ehlink/markov.hpp"

using namespace ehlink;
using namespace ehlink::channel;

namespace {

// Bisection on the exponential CDF, independent of the closed-form inverse.
double cdf_root(double target, double mean) {
  double lo = 0, hi = 1;
  while (1 - std::exp(-hi / mean) < target) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1 - std::exp(-mid / mean) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson rule.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST_CASE("partition_rayleigh matches CDF root finding") {
  const auto one = partition_rayleigh(1, 1.0);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == 0);
  CHECK(std::isinf(one[1]));

  const auto three = partition_rayleigh(3, 1.0);
  CHECK(three[1] == doctest::Approx(0.405465108108).epsilon(1e-10));
  CHECK(three[2] == doctest::Approx(1.098612288668).epsilon(1e-10));
  for (int k = 1; k <= 2; ++k) CHECK(three[k] == doctest::Approx(cdf_root(k / 3.0, 1.0)).epsilon(1e-12));

  const auto two = partition_rayleigh(2, 2.0);
  CHECK(two[1] == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));

  for (int n : {2, 3, 5, 8}) {
    const auto b = partition_rayleigh(n, 1.7);
    const auto mass = interval_masses(b, 1.7);
    for (int k = 0; k < n; ++k) CHECK(std::abs(mass(k) - 1.0 / n) < 1e-12);
  }
  CHECK_THROWS_AS(partition_rayleigh(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(partition_rayleigh(2, -1.0), std::invalid_argument);
}

TEST_CASE("mean_power_gain against numerical integration") {
  const std::vector<double> whole{0, kInfinity};
  CHECK(mean_power_gain(whole, 0, 1.0) == doctest::Approx(1.0));
  CHECK(mean_power_gain(whole, 0, 2.0) == doctest::Approx(2.0));

  const std::vector<double> tail{0, 1, kInfinity};
  CHECK(mean_power_gain(tail, 1, 1.0) == doctest::Approx(2.0));
  // truncate the tail far out for the numerical oracle
  const double num = simpson([](double g) { return g * std::exp(-g); }, 1, 60) /
                     simpson([](double g) { return std::exp(-g); }, 1, 60);
  CHECK(mean_power_gain(tail, 1, 1.0) == doctest::Approx(num).epsilon(1e-9));

  const auto b = partition_rayleigh(3, 1.3);
  for (int k = 0; k < 2; ++k) {
    const double lo = b[k], hi = b[k + 1];
    const double oracle = simpson([](double g) { return g * std::exp(-g / 1.3); }, lo, hi) /
                          simpson([](double g) { return std::exp(-g / 1.3); }, lo, hi);
    const double v = mean_power_gain(b, k, 1.3);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(v > lo);
    CHECK(v < hi);
  }
  CHECK(mean_power_gain(b, 2, 1.3) > b[2]);
  const std::vector<double> empty{0, 1, 1, kInfinity};
  CHECK_THROWS_AS(mean_power_gain(empty, 1, 1.0), std::invalid_argument);
}

TEST_CASE("steady_state examples") {
  Eigen::MatrixXd half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  const auto w = steady_state(half);
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(steady_state(Eigen::MatrixXd::Identity(2, 2)), AmbiguityError);

  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  const auto v = steady_state(p);
  CHECK(v(0) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("level-crossing model is a valid FSMC") {
  for (int n : {1, 2, 3, 6}) {
    const auto m = ChannelModel::rayleigh(n, 1.0, 0.05);
    for (int i = 0; i < n; ++i) CHECK(std::abs(m.transition().row(i).sum() - 1) < 1e-12);
    CHECK((m.transition().array() >= 0).all());
    CHECK(stationary_residual(m.steady_state(), m.transition()) < 1e-10);
    CHECK(std::abs(m.steady_state().sum() - 1) < 1e-12);
    // equal-probability partition: the tridiagonal matrix keeps it stationary
    for (int i = 0; i < n; ++i) CHECK(m.steady_state()(i) == doctest::Approx(1.0 / n).epsilon(1e-9));
    for (int i = 1; i < n; ++i) CHECK(m.mean_gains()(i) > m.mean_gains()(i - 1));
  }
}

TEST_CASE("step sampling") {
  Rng rng(7);
  Eigen::MatrixXd stay(2, 2), move(2, 2), fair(2, 2);
  stay << 1, 0, 0.5, 0.5;
  move << 0, 1, 0.5, 0.5;
  fair << 0.5, 0.5, 0.5, 0.5;
  const auto b = partition_rayleigh(2, 1.0);
  Eigen::MatrixXd ergodic_stay(2, 2);
  ergodic_stay << 1, 0, 0.5, 0.5;
  const ChannelModel m_move(b, move, 1.0), m_fair(b, fair, 1.0);
  const ChannelModel m_stay(b, ergodic_stay, 1.0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(m_stay.step(0, rng) == 0);
    CHECK(m_move.step(0, rng) == 1);
  }
  long zeros = 0;
  const long n = 1'000'000;
  for (long i = 0; i < n; ++i) zeros += m_fair.step(0, rng) == 0;
  const double f = static_cast<double>(zeros) / n;
  CHECK(f >= 0.498);
  CHECK(f <= 0.502);
}

TEST_CASE("empirical occupancy matches the steady state") {
  const auto m = ChannelModel::rayleigh(3, 1.0, 0.05);
  Eigen::MatrixXd p(3, 3);
  p << 0.7, 0.2, 0.1, 0.3, 0.5, 0.2, 0.1, 0.3, 0.6;
  const ChannelModel custom(partition_rayleigh(3, 1.0), p, 1.0);
  for (const ChannelModel* model : {&m, &custom}) {
    Rng rng(11);
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(3);
    int s = model->sample_steady_state(rng);
    const long n = 1'000'000;
    for (long i = 0; i < n; ++i) {
      s = model->step(s, rng);
      hist(s) += 1;
    }
    hist /= static_cast<double>(n);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(hist(i) - model->steady_state()(i)) < 0.005);
  }
}

TEST_CASE("ChannelModel rejects malformed input") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(ChannelModel(partition_rayleigh(2, 1.0), bad, 1.0), std::invalid_argument);
  Eigen::MatrixXd ok(2, 2);
  ok << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(ChannelModel({0, 2, 1}, ok, 1.0), std::invalid_argument);
}
