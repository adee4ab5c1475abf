#include <doctest.h>

#include <cmath>

#include "ehlink/channel.hpp"
#include "ehlink/errors.hpp"
#include "ehlink/pep.hpp"

using namespace ehlink;
using namespace ehlink::pep;

TEST_CASE("bep_bpsk") {
  CHECK(bep_bpsk(10, 1.0, 0.0, 0.005) == 0.5);
  // d g P / sigma^2 = 25 -> 0.5 erfc(5)
  CHECK(bep_bpsk(5, 1.0, 0.025, 0.005) == doctest::Approx(7.6860e-13).epsilon(1e-4));
  double prev = 0.5;
  for (int d = 1; d <= 30; ++d) {
    const double v = bep_bpsk(d, 0.3, 0.005, 0.005);
    CHECK(v < prev);
    CHECK(v > 0);
    prev = v;
  }
}

TEST_CASE("packet_error_prob") {
  CodeSpec c = CodeSpec::standard(128, 0.5, 0.005, 2);
  CHECK(c.coded_bits == 256);
  CHECK(c.d_free == 10);
  CHECK(c.truncation == 24);

  CodeSpec zero = c;
  zero.set_spectrum({{10, 0}, {12, 0}});
  CHECK(packet_error_prob(zero, 1.0, 0.005) == 0);

  // very low SNR: the union sum exceeds one
  double sum = 0;
  for (auto [d, a] : c.weight_spectrum) sum += a * bep_bpsk(d, 0.01, 0.001, 0.005);
  CHECK(sum > 1);
  CHECK(packet_error_prob(c, 0.01, 0.001) == 1);

  // single term with P_2 = 1e-6: 1 - (1 - 1e-6)^256 by binomial expansion
  CodeSpec single = c;
  single.set_spectrum({{10, 1}});
  // choose P_out so that 0.5 erfc(sqrt(10 g P / s2)) = 1e-6: solve by bisection
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bep_bpsk(10, 1.0, mid, 0.005) > 1e-6 ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  const double q = 1e-6;
  const double binomial = 256 * q - 256.0 * 255 / 2 * q * q + 256.0 * 255 * 254 / 6 * q * q * q;
  CHECK(packet_error_prob(single, 1.0, p) == doctest::Approx(binomial).epsilon(1e-9));
  CHECK(packet_error_prob(single, 1.0, p) == doctest::Approx(2.56e-4).epsilon(1e-3));
}

TEST_CASE("pep_adaptive") {
  const std::vector<double> a{0.1, 0.3};
  CHECK(pep_adaptive(a) == 0.3);
  const std::vector<double> one{0.42};
  CHECK(pep_adaptive(one) == 0.42);
  const std::vector<double> zeros{0, 0, 0};
  CHECK(pep_adaptive(zeros) == 0);
  CHECK_THROWS_AS(pep_adaptive(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("PepTable monotonicity grid") {
  const CodeSpec c = CodeSpec::standard(128, 0.5, 0.005, 2);
  for (int n : {1, 3, 5}) {
    const auto ch = channel::ChannelModel::rayleigh(n, 1.0, 0.05);
    const auto t = PepTable::build(c, ch.mean_gains(), 40, [](int a) { return a * 0.002; });
    for (int g = 0; g < n; ++g) {
      CHECK(t(g, 0) == 1);
      for (int a = 1; a <= 40; ++a) {
        CHECK(t(g, a) <= t(g, a - 1));
        CHECK(t(g, a) >= 0);
        if (g > 0) CHECK(t(g, a) <= t(g - 1, a));
      }
    }
  }
  Eigen::MatrixXd bad(1, 3);
  bad << 1, 0.2, 0.3;
  CHECK_THROWS_AS(PepTable{bad}, ConsistencyError);
  Eigen::MatrixXd bad0(1, 2);
  bad0 << 0.5, 0.2;
  CHECK_THROWS_AS(PepTable{bad0}, ConsistencyError);
  const auto k = PepTable::constant(2, 3, 0.25);
  CHECK(k(1, 0) == 1);
  CHECK(k(1, 3) == 0.25);
}

TEST_CASE("weight spectrum file") {
  const auto s = parse_weight_spectrum("# comment\n10 11\n\n12 38  # trailing\n");
  REQUIRE(s.size() == 2);
  CHECK(s[1].first == 12);
  CHECK(s[1].second == 38);
  CHECK_THROWS_AS(parse_weight_spectrum("10\n"), ConfigError);
  const auto file = load_weight_spectrum(std::string(EHLINK_DATA_DIR) + "/k7_r12_spectrum.txt");
  CHECK(file == CodeSpec::standard(128, 0.5, 0.005, 2).weight_spectrum);
}
