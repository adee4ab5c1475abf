#include "ehlink/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ehlink/belief.hpp"
#include "ehlink/errors.hpp"
#include "ehlink/rng.hpp"

namespace ehlink::sim {

PolicySpec PolicySpec::parse(const std::string& text) {
  if (text == "greedy") return {PolicyKind::Greedy, 0};
  if (text == "mlph") return {PolicyKind::Mlph, 0};
  if (text.rfind("equal:", 0) == 0) {
    std::size_t used = 0;
    const std::string num = text.substr(6);
    double mw = 0;
    try {
      mw = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !(mw > 0)) throw std::invalid_argument("bad equal power in '" + text + "'");
    return {PolicyKind::Equal, mw};
  }
  throw std::invalid_argument("unknown policy '" + text + "' (greedy, mlph, equal:<mW>)");
}

std::string PolicySpec::label() const {
  switch (kind) {
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Mlph: return "mlph";
    case PolicyKind::Equal: return "equal:" + format_number(equal_mw);
  }
  return "?";
}

void SimConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(channel_states >= 1, "channel_states must be >= 1");
  require(mean_gain > 0, "mean_gain must be positive");
  require(doppler_fdts > 0, "doppler_fdts must be positive");
  require(channel_matrix.size() == 0 ||
              (channel_matrix.rows() == channel_states && channel_matrix.cols() == channel_states),
          "channel_matrix must be channel_states x channel_states");
  require(info_bits > 0 && code_rate > 0 && code_rate <= 1, "code parameters out of range");
  require(max_attempts >= 1, "max_attempts must be >= 1");
  require(energy::is_power_of_two(beta), "beta must be a power of two");
  require(horizon_slots >= 1 && frames >= 1, "horizon_slots and frames must be positive");
  require(replications >= 1, "replications must be >= 1");
  require(kappa >= 1, "kappa must be >= 1");
  require(vi_tolerance > 0 && vi_max_iterations >= 1 && mdp_state_cap >= 1, "value iteration limits out of range");
  for (double r : rho_grid) require(r >= 0 && r <= 1, "rho_grid values must lie in [0,1]");
  require(poisson_rate_per_slot >= 0, "poisson_rate_per_slot must be non-negative");
  energy_config().validate();
  energy::validate(harvest_process());
}

double SimConfig::reference_p_out_w() const {
  return (policy.kind == PolicyKind::Equal ? policy.equal_mw : p_out_mw) * 1e-3;
}

energy::LinkEnergyConfig SimConfig::energy_config() const {
  energy::LinkEnergyConfig e;
  e.p_out_w = reference_p_out_w();
  e.alpha = alpha;
  e.p_circuit_tx_w = p_circuit_tx_w;
  e.p_circuit_rx_w = p_circuit_rx_w;
  e.p_dec_w = p_dec_w;
  e.p_fb_w = p_fb_w;
  e.slot_s = slot_s;
  e.beta = beta;
  e.coded_bits = static_cast<int>(std::lround(info_bits / code_rate));
  e.modulation_order = modulation_order;
  e.e_min_rx_override_j = e_min_rx_j;
  return e;
}

energy::HarvestProcess SimConfig::harvest_process() const {
  const auto e = energy_config();
  const double tx_j = sizing.e_h_tx * e.e_tx_j();
  const double rx_j = sizing.e_h_rx * e.e_rx_j();
  switch (harvest_model) {
    case HarvestModel::Bernoulli: return energy::Bernoulli{rho_tx, rho_rx, tx_j, rx_j};
    case HarvestModel::Correlated: return energy::CorrelatedBernoulli{p00, p01, p10, p11, tx_j, rx_j};
    case HarvestModel::Poisson:
      return energy::CompoundPoisson{poisson_rate_per_slot / slot_s, e_mean_tx_ptxts * e.e_tx_j(),
                                     e_mean_rx_prxts * e.e_rx_j()};
  }
  throw std::logic_error("unknown harvest model");
}

double SimConfig::policy_rho_rx() const { return energy::harvest_weights(harvest_process(), slot_s).rho_rx(); }
double SimConfig::policy_rho_tx() const { return energy::harvest_weights(harvest_process(), slot_s).rho_tx(); }

SimConfig with_rho(SimConfig cfg, double rho) {
  if (!(rho >= 0 && rho <= 1)) throw std::invalid_argument("rho must lie in [0,1]");
  cfg.rho_tx = cfg.rho_rx = rho;
  cfg.p11 = rho * rho;
  cfg.p10 = cfg.p01 = rho * (1 - rho);
  cfg.p00 = (1 - rho) * (1 - rho);
  cfg.poisson_rate_per_slot = 2 * rho;
  return cfg;
}

namespace {

channel::ChannelModel make_channel(const SimConfig& cfg) {
  if (cfg.channel_matrix.size() == 0) return channel::ChannelModel::rayleigh(cfg.channel_states, cfg.mean_gain, cfg.doppler_fdts);
  return channel::ChannelModel(channel::partition_rayleigh(cfg.channel_states, cfg.mean_gain), cfg.channel_matrix,
                               cfg.mean_gain);
}

pep::CodeSpec make_code(const SimConfig& cfg) {
  auto code = pep::CodeSpec::standard(cfg.info_bits, cfg.code_rate, cfg.noise_mw * 1e-3, cfg.modulation_order);
  if (!cfg.weight_spectrum_file.empty()) {
    code.set_spectrum(pep::load_weight_spectrum(cfg.weight_spectrum_file));
    code.validate();
  }
  return code;
}

int max_available_tx(const SimConfig& cfg, const energy::UnitScale& s) {
  if (cfg.harvest_model == HarvestModel::Poisson) return 2 * s.tx_capacity;
  return s.tx_capacity + s.tx_harvest;
}

}  // namespace

PreparedModel::PreparedModel(SimConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      energy_(cfg_.energy_config()),
      scale_(energy::make_unit_scale(energy_, cfg_.sizing)),
      channel_(make_channel(cfg_)),
      code_(make_code(cfg_)),
      pep_(pep::PepTable::build(code_, channel_.mean_gains(), std::max(max_available_tx(cfg_, scale_), cfg_.beta),
                                [this](int a) { return energy::tx_power_for_action(energy_, scale_, a); })),
      harvest_(cfg_.harvest_process()) {
  if (scale_.tx_harvest + scale_.tx_capacity == 0) throw std::invalid_argument("transmitter can never hold energy");
  if (cfg_.policy.kind == PolicyKind::Mlph) {
    policy::MdpParams p;
    p.battery_capacity = scale_.tx_capacity;
    p.harvest_units = scale_.tx_harvest;
    p.max_attempts = cfg_.max_attempts;
    p.rho_tx = cfg_.policy_rho_tx();
    p.rho_rx = cfg_.policy_rho_rx();
    p.cost = cfg_.cost_model;
    p.state_cap = static_cast<std::size_t>(cfg_.mdp_state_cap);
    mdp_.emplace(p, channel_.transition(), pep_);
    policy::ValueIterationOptions o;
    o.tolerance = cfg_.vi_tolerance;
    o.max_iterations = cfg_.vi_max_iterations;
    vi_ = policy::relative_value_iteration(*mdp_, o);
  }
}

Eigen::VectorXd PreparedModel::fixed_action_pep() const {
  Eigen::VectorXd v(channel_.num_states());
  for (int g = 0; g < channel_.num_states(); ++g) v(g) = pep_(g, equal_action());
  return v;
}

namespace {

struct HarvestUnits {
  int tx, rx;
};

class HarvestDraw {
 public:
  explicit HarvestDraw(const PreparedModel& m)
      : m_(m),
        slot_s_(m.config().slot_s),
        bernoulli_(!std::holds_alternative<energy::CompoundPoisson>(m.harvest())) {}

  HarvestUnits operator()(Rng& rng) const {
    const auto a = energy::sample_arrivals(m_.harvest(), rng, slot_s_);
    const auto& s = m_.scale();
    if (bernoulli_) return {a.tx_j > 0 ? s.tx_harvest : 0, a.rx_j > 0 ? s.rx_harvest : 0};
    return {std::min(s.tx_units(a.tx_j), s.tx_capacity), std::min(s.rx_units(a.rx_j), s.rx_capacity)};
  }

 private:
  const PreparedModel& m_;
  double slot_s_;
  bool bernoulli_;
};

class SpectralWindows {
 public:
  explicit SpectralWindows(long horizon) : T_(horizon) {}

  void frame_done(long start_slot, long end_slot, bool success) {
    const long w = end_slot / T_;
    advance_to(w);
    if (start_slot / T_ != w) return;
    ++frames_;
    if (success) ++succ_;
  }

  double finish(long total_slots) {
    const long complete = total_slots / T_;
    advance_to(complete);
    return windows_ ? sum_ / static_cast<double>(windows_) : 0.0;
  }

 private:
  void advance_to(long w) {
    while (current_ < w) {
      sum_ += frames_ ? static_cast<double>(succ_) / static_cast<double>(frames_) : 0.0;
      ++windows_;
      frames_ = succ_ = 0;
      ++current_;
    }
  }

  long T_;
  long current_ = 0;
  long frames_ = 0, succ_ = 0;
  long windows_ = 0;
  double sum_ = 0;
};

}  // namespace

Metrics run_trial(const PreparedModel& model, std::uint64_t seed, const TraceSink& trace) {
  const SimConfig& cfg = model.config();
  const auto& scale = model.scale();
  const auto& ch = model.channel();
  const auto& pep = model.pep();
  const int beta = cfg.beta;
  const int K = cfg.max_attempts;
  const bool conventional = cfg.conventional();
  const bool frame_channel = cfg.channel_timescale == ChannelTimescale::Frame;
  const PolicyKind kind = cfg.policy.kind;
  const double rho_rx = cfg.policy_rho_rx();

  Rng ch_rng = make_stream(seed, Stream::Channel);
  Rng h_rng = make_stream(seed, Stream::Harvest);
  Rng d_rng = make_stream(seed, Stream::Decode);
  const HarvestDraw draw_harvest(model);

  const bool full = cfg.initial_battery == InitialBattery::Full;
  int bt = full ? scale.tx_capacity : 0;
  int br = full ? scale.rx_capacity : 0;
  int g = ch.sample_steady_state(ch_rng);
  protocol::TxFrameState tx;
  protocol::RxSampleStore store;
  std::optional<policy::BeliefTracker> belief;
  if (kind != PolicyKind::Equal) belief.emplace(ch.steady_state(), ch.transition());

  Metrics m;
  SpectralWindows windows(cfg.horizon_slots);
  long slots_in_frames = 0;
  long frame_start = 0;
  double cost_sum = 0;
  long slot = 0;
  for (; m.frame_count < cfg.frames; ++slot) {
    const HarvestUnits h = draw_harvest(h_rng);
    const int avail_t = bt + h.tx;
    const int avail_r = br + h.rx;
    const int pending = tx.pending(beta);

    int action = 0;
    switch (kind) {
      case PolicyKind::Equal: action = protocol::affordable_fixed_action(model.equal_action(), pending, avail_t, beta); break;
      case PolicyKind::Greedy: action = policy::greedy_action(belief->belief(), avail_t, pep); break;
      case PolicyKind::Mlph:
        action = policy::mlph_action(belief->belief(), avail_t, tx.retrans_index, *model.mdp(), *model.value_iteration());
        break;
    }

    const auto plan = protocol::plan_transmitter(pending, action, avail_t, beta);
    protocol::Feedback fb;
    int spend_r = 0;
    if (plan.active) {
      const double part_pep = pep(g, std::min(action, pep.max_action()));
      const auto rx = protocol::receiver_step(store, plan.sent_parts, part_pep, avail_r, scale, conventional, d_rng);
      fb = rx.feedback;
      spend_r = rx.spend;
    } else {
      fb = protocol::silent_feedback(tx.last_feedback);
    }
    if (plan.spend > avail_t || spend_r > avail_r)
      throw CausalityError("slot " + std::to_string(slot) + ": energy causality violated");
    bt = std::min(avail_t - plan.spend, scale.tx_capacity);
    br = std::min(avail_r - spend_r, scale.rx_capacity);
    cost_sum += pep(g, std::min(action, pep.max_action()));

    const auto upd = protocol::next_index(tx.retrans_index, K, fb);
    if (trace)
      trace({slot, tx.retrans_index, avail_t, avail_r, belief ? &belief->belief() : nullptr, action, plan.sent_parts, fb, bt,
             br, g});
    const bool success = fb.kind == protocol::FeedbackKind::Ack;
    const bool frame_end = success || upd.dropped;
    tx.retrans_index = upd.k;
    tx.last_feedback = upd.dropped ? protocol::Feedback::ack() : fb;
    if (belief) belief->observe(fb, action, pep, rho_rx, !frame_channel || frame_end);
    if (frame_end) {
      ++m.frame_count;
      slots_in_frames += slot - frame_start + 1;
      windows.frame_done(frame_start, slot, success);
      if (success) ++m.successes;
      else ++m.drops;
      if (upd.dropped) store.clear();
      frame_start = slot + 1;
    }
    if (!frame_channel || frame_end) g = ch.step(g, ch_rng);
  }
  m.slot_count = slot;
  m.pdp = static_cast<double>(m.drops) / static_cast<double>(m.frame_count);
  m.avg_packet_time = m.successes ? static_cast<double>(slots_in_frames) / static_cast<double>(m.successes)
                                  : std::numeric_limits<double>::infinity();
  m.spectral_efficiency = windows.finish(slot);
  m.avg_cost = cost_sum / static_cast<double>(slot);
  if (belief) m.degenerate_observations = belief->degenerate_observations();
  return m;
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::AvgPacketTime: return "avg_packet_time";
    case Metric::Pdp: return "pdp";
    case Metric::SpectralEfficiency: return "spectral_efficiency";
    case Metric::AvgCost: return "avg_cost";
  }
  return "?";
}

double metric_value(const Metrics& m, Metric which) {
  switch (which) {
    case Metric::AvgPacketTime: return m.avg_packet_time;
    case Metric::Pdp: return m.pdp;
    case Metric::SpectralEfficiency: return m.spectral_efficiency;
    case Metric::AvgCost: return m.avg_cost;
  }
  return 0;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n < 2 || !std::isfinite(s.mean)) {
    s.stderr_ = s.n < 2 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stderr_ = std::sqrt(ss / (s.n - 1) / s.n);
  return s;
}

std::vector<double> SampleSet::values(Metric m) const {
  std::vector<double> v;
  v.reserve(runs.size());
  for (const auto& r : runs) v.push_back(metric_value(r, m));
  return v;
}

std::vector<SampleSet> sweep(const SimConfig& base, const std::vector<double>& rho_values, int replications,
                             const std::vector<Scheme>& schemes) {
  if (replications < 1) throw std::invalid_argument("sweep: replications must be >= 1");
  std::vector<SampleSet> out;
  for (double rho : rho_values) {
    for (const auto& scheme : schemes) {
      SimConfig cfg = with_rho(base, rho);
      cfg.beta = scheme.beta;
      cfg.policy = scheme.policy;
      const PreparedModel model(cfg);
      SampleSet set{rho, scheme, cfg.max_attempts, {}};
      for (int r = 0; r < replications; ++r) set.runs.push_back(run_trial(model, base.seed + static_cast<std::uint64_t>(r)));
      out.push_back(std::move(set));
    }
  }
  return out;
}

Summary paired_difference(const SampleSet& a, const SampleSet& b, Metric m) {
  if (a.runs.size() != b.runs.size()) throw std::invalid_argument("paired_difference: replication counts differ");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.runs.size(); ++i) d.push_back(metric_value(a.runs[i], m) - metric_value(b.runs[i], m));
  return summarize(d);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<SampleSet>& sets) {
  out << "rho,scheme,policy,beta,K,metric,mean,stderr,n\n";
  for (const auto& s : sets)
    for (Metric m : kAllMetrics) {
      const Summary sum = s.summary(m);
      out << format_number(s.rho) << ',' << s.scheme.label() << ',' << s.scheme.policy.label() << ','
          << s.scheme.beta << ',' << s.max_attempts << ',' << metric_name(m) << ',' << format_number(sum.mean) << ','
          << format_number(sum.stderr_) << ',' << sum.n << '\n';
    }
}

}  // namespace ehlink::sim
