#include "ehlink/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ehlink/errors.hpp"

namespace ehlink::energy {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_probability(double p) { return p >= 0 && p <= 1; }

constexpr double kUnitSlack = 1e-9;

}  // namespace

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void LinkEnergyConfig::validate() const {
  require(p_out_w >= 0 && p_circuit_tx_w >= 0 && p_circuit_rx_w >= 0 && p_dec_w >= 0 && p_fb_w >= 0,
          "energy config: powers must be non-negative");
  require(alpha >= 0, "energy config: alpha must be non-negative");
  require(slot_s > 0, "energy config: slot duration must be positive");
  require(is_power_of_two(modulation_order), "energy config: modulation order must be a power of two");
  require(coded_bits > 0, "energy config: coded bits must be positive");
  require(is_power_of_two(beta), "energy config: beta must be a power of two");
  require(beta <= static_cast<int>(std::ceil(packet_symbols())), "energy config: beta exceeds packet length in symbols");
  require(e_tx_j() > 0, "energy config: transmit energy must be positive");
  require(e_min_rx_j() > 0, "energy config: receiver energy quantum must be positive");
  require(e_min_rx_override_j >= 0, "energy config: e_min_rx override must be non-negative");
}

double LinkEnergyConfig::e_tx_j() const { return node_powers(*this).tx_w * slot_s; }
double LinkEnergyConfig::e_rx_j() const { return node_powers(*this).rx_w * slot_s; }

double LinkEnergyConfig::e_min_rx_j() const {
  if (e_min_rx_override_j > 0) return e_min_rx_override_j;
  return p_circuit_rx_w * slot_s / beta;
}

double LinkEnergyConfig::packet_symbols() const {
  return static_cast<double>(coded_bits) / std::log2(static_cast<double>(modulation_order));
}

NodePowers node_powers(const LinkEnergyConfig& cfg) {
  return {(1 + cfg.alpha) * cfg.p_out_w + cfg.p_circuit_tx_w, cfg.p_dec_w + cfg.p_circuit_rx_w + cfg.p_fb_w};
}

void validate(const HarvestProcess& process) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          require(is_probability(p.rho_tx) && is_probability(p.rho_rx), "harvest: rho outside [0,1]");
          require(p.amount_tx_j >= 0 && p.amount_rx_j >= 0, "harvest: negative amount");
        } else if constexpr (std::is_same_v<T, CorrelatedBernoulli>) {
          require(is_probability(p.p00) && is_probability(p.p01) && is_probability(p.p10) && is_probability(p.p11),
                  "harvest: joint probability outside [0,1]");
          require(std::abs(p.p00 + p.p01 + p.p10 + p.p11 - 1.0) <= 1e-12, "harvest: joint probabilities must sum to 1");
          require(p.amount_tx_j >= 0 && p.amount_rx_j >= 0, "harvest: negative amount");
        } else {
          require(p.rate_per_s >= 0, "harvest: negative Poisson intensity");
          require(p.mean_tx_j >= 0 && p.mean_rx_j >= 0, "harvest: negative mean amount");
        }
      },
      process);
}

namespace {

double compound_amount(Rng& rng, double mean_arrivals, double mean_amount) {
  if (mean_arrivals <= 0) return 0;
  const int count = std::poisson_distribution<int>(mean_arrivals)(rng);
  double total = 0;
  for (int i = 0; i < count; ++i) total -= mean_amount * std::log1p(-uniform01(rng));
  return total;
}

}  // namespace

Arrivals sample_arrivals(const HarvestProcess& process, Rng& rng, double slot_s) {
  return std::visit(
      [&](const auto& p) -> Arrivals {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          const double u_tx = uniform01(rng);
          const double u_rx = uniform01(rng);
          return {u_tx < p.rho_tx ? p.amount_tx_j : 0.0, u_rx < p.rho_rx ? p.amount_rx_j : 0.0};
        } else if constexpr (std::is_same_v<T, CorrelatedBernoulli>) {
          const double u = uniform01(rng);
          if (u < p.p00) return {0.0, 0.0};
          if (u < p.p00 + p.p01) return {0.0, p.amount_rx_j};
          if (u < p.p00 + p.p01 + p.p10) return {p.amount_tx_j, 0.0};
          return {p.amount_tx_j, p.amount_rx_j};
        } else {
          const double lambda_t = p.rate_per_s * slot_s;
          const double tx = compound_amount(rng, lambda_t, p.mean_tx_j);
          const double rx = compound_amount(rng, lambda_t, p.mean_rx_j);
          return {tx, rx};
        }
      },
      process);
}

HarvestWeights harvest_weights(const HarvestProcess& process, double slot_s) {
  return std::visit(
      [&](const auto& p) -> HarvestWeights {
        using T = std::decay_t<decltype(p)>;
        double rt = 0, rr = 0;
        if constexpr (std::is_same_v<T, CorrelatedBernoulli>) {
          return {p.p11, p.p10, p.p01, p.p00};
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          rt = p.rho_tx;
          rr = p.rho_rx;
        } else {
          rt = -std::expm1(-p.rate_per_s * slot_s);
          rr = rt;
        }
        return {rt * rr, rt * (1 - rr), (1 - rt) * rr, (1 - rt) * (1 - rr)};
      },
      process);
}

Battery battery_step(Battery battery, int spent, int harvested_units) {
  if (spent < 0 || harvested_units < 0) throw std::invalid_argument("battery_step: negative energy");
  const int available = battery.level + harvested_units;
  if (spent > available)
    throw CausalityError("battery_step: spending " + std::to_string(spent) + " units with " +
                         std::to_string(available) + " available");
  battery.level = std::min(available - spent, battery.capacity);
  return battery;
}

Battery battery_step(Battery battery, int spent, bool harvested) {
  return battery_step(battery, spent, harvested ? battery.harvest_quantum : 0);
}

int UnitScale::tx_units(double joules) const {
  return static_cast<int>(std::floor(joules / tx_unit_j + kUnitSlack));
}

int UnitScale::rx_units(double joules) const {
  return static_cast<int>(std::floor(joules / rx_unit_j + kUnitSlack));
}

UnitScale make_unit_scale(const LinkEnergyConfig& cfg, const BatterySizing& sizing) {
  cfg.validate();
  require(sizing.b_max_tx >= 0 && sizing.b_max_rx >= 0 && sizing.e_h_tx >= 0 && sizing.e_h_rx >= 0,
          "battery sizing must be non-negative");
  UnitScale s;
  s.beta = cfg.beta;
  s.tx_unit_j = cfg.e_min_tx_j();
  s.rx_unit_j = cfg.e_min_rx_j();
  const double e_tx = cfg.e_tx_j();
  const double e_rx = cfg.e_rx_j();
  s.tx_capacity = s.tx_units(sizing.b_max_tx * e_tx);
  s.rx_capacity = s.rx_units(sizing.b_max_rx * e_rx);
  s.tx_harvest = s.tx_units(sizing.e_h_tx * e_tx);
  s.rx_harvest = s.rx_units(sizing.e_h_rx * e_rx);
  auto ceil_units = [&](double joules) {
    return static_cast<int>(std::ceil(joules / s.rx_unit_j - kUnitSlack));
  };
  s.rx_sample_part = std::max(1, ceil_units(cfg.p_circuit_rx_w * cfg.slot_s / cfg.beta));
  s.rx_decode = ceil_units((cfg.p_dec_w + cfg.p_fb_w) * cfg.slot_s);
  return s;
}

double tx_power_for_action(const LinkEnergyConfig& cfg, const UnitScale& scale, int units) {
  if (units <= 0) return 0.0;
  const double p_tx = units * scale.tx_unit_j / cfg.slot_s;
  return std::max(0.0, (p_tx - cfg.p_circuit_tx_w) / (1 + cfg.alpha));
}

}  // namespace ehlink::energy
