#pragma once

#include <variant>

#include "ehlink/rng.hpp"

namespace ehlink::energy {

/// Power and energy parameters of the two nodes. Powers in W, times in s.
struct LinkEnergyConfig {
  double p_out_w = 0.005;          // reference transmit power
  double alpha = 1.0;              // amplifier overhead xi/eta - 1
  double p_circuit_tx_w = 0.1;
  double p_circuit_rx_w = 0.1;
  double p_dec_w = 0.7;
  double p_fb_w = 0.0;
  double slot_s = 1.0;
  int beta = 4;                    // packet divisions
  int coded_bits = 256;
  int modulation_order = 2;
  double e_min_rx_override_j = 0;  // 0: sampling energy of one packet part

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  double e_tx_j() const;
  double e_rx_j() const;
  double e_min_tx_j() const { return e_tx_j() / beta; }
  double e_min_rx_j() const;
  double packet_symbols() const;
};

struct NodePowers {
  double tx_w;
  double rx_w;
};

/// P_Tx = (1 + alpha) P_out + P_C,Tx and P_Rx = P_dec + P_C,Rx + P_fb.
NodePowers node_powers(const LinkEnergyConfig& cfg);

bool is_power_of_two(int v);

// Harvest processes. Amounts in J.
struct Bernoulli {
  double rho_tx = 0.5;
  double rho_rx = 0.5;
  double amount_tx_j = 0;
  double amount_rx_j = 0;
};

/// Joint arrival indicators: (0,0) w.p. p00, (0,1) p01, (1,0) p10, (1,1) p11.
struct CorrelatedBernoulli {
  double p00 = 0.25, p01 = 0.25, p10 = 0.25, p11 = 0.25;
  double amount_tx_j = 0;
  double amount_rx_j = 0;
};

/// Poisson(rate * slot) arrivals per slot, exponential amounts with the given means.
struct CompoundPoisson {
  double rate_per_s = 1.0;
  double mean_tx_j = 0;
  double mean_rx_j = 0;
};

using HarvestProcess = std::variant<Bernoulli, CorrelatedBernoulli, CompoundPoisson>;

void validate(const HarvestProcess& process);

struct Arrivals {
  double tx_j = 0;
  double rx_j = 0;
};

Arrivals sample_arrivals(const HarvestProcess& process, Rng& rng, double slot_s);

/// Probabilities of the four joint harvest outcomes, indexed [tx][rx].
struct HarvestWeights {
  double both = 0;     // tx and rx harvest
  double tx_only = 0;
  double rx_only = 0;
  double neither = 1;

  double rho_tx() const { return both + tx_only; }
  double rho_rx() const { return both + rx_only; }
};

/// Joint outcome weights of a Bernoulli-type process. For compound Poisson the
/// weights of "at least one arrival" are returned (independent nodes).
HarvestWeights harvest_weights(const HarvestProcess& process, double slot_s);

/// Battery in integer multiples of the node's energy quantum.
struct Battery {
  int level = 0;
  int capacity = 0;
  int harvest_quantum = 0;
};

/// level' = min(level + L - spent, capacity) after a harvest, else
/// level - spent. The harvest is usable in the slot it arrives.
/// Throws CausalityError when spent exceeds the available energy.
Battery battery_step(Battery battery, int spent, bool harvested);

/// Same with an explicit harvested amount in units (compound arrivals).
Battery battery_step(Battery battery, int spent, int harvested_units);

/// Node sizing in multiples of P_Tx T_s (transmitter) and P_Rx T_s (receiver).
struct BatterySizing {
  double b_max_tx = 6;
  double b_max_rx = 3;
  double e_h_tx = 3;
  double e_h_rx = 1.5;
};

/// Integer energy bookkeeping of one link.
struct UnitScale {
  double tx_unit_j = 0;
  double rx_unit_j = 0;
  int tx_capacity = 0;
  int rx_capacity = 0;
  int tx_harvest = 0;   // L_Tx
  int rx_harvest = 0;   // L_Rx
  int rx_sample_part = 0;  // sampling 1/beta of a packet
  int rx_decode = 0;       // decoding plus feedback
  int beta = 1;

  int rx_full_receive() const { return beta * rx_sample_part + rx_decode; }
  int tx_units(double joules) const;
  int rx_units(double joules) const;
};

UnitScale make_unit_scale(const LinkEnergyConfig& cfg, const BatterySizing& sizing);

/// Transmit power delivered by a full packet sent with `units` of transmitter
/// energy: ((units * E_min_Tx / T_s) - P_C,Tx) / (1 + alpha), floored at 0.
double tx_power_for_action(const LinkEnergyConfig& cfg, const UnitScale& scale, int units);

}  // namespace ehlink::energy
