#include "ehlink/policy_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ehlink/errors.hpp"

namespace ehlink::policy {

std::vector<int> quantize_belief(const Belief& belief, int kappa) {
  if (kappa < 1) throw std::invalid_argument("quantize_belief: kappa must be positive");
  const auto n = static_cast<std::size_t>(belief.size());
  std::vector<int> counts(n);
  std::vector<std::pair<double, std::size_t>> rem(n);
  int total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = belief(static_cast<Eigen::Index>(i)) * kappa;
    counts[i] = static_cast<int>(std::floor(scaled + 1e-12));
    rem[i] = {scaled - counts[i], i};
    total += counts[i];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; total < kappa && r < n; ++r, ++total) ++counts[rem[r].second];
  for (std::size_t i = n; total > kappa && i-- > 0;) {
    const int take = std::min(counts[i], total - kappa);
    counts[i] -= take;
    total -= take;
  }
  return counts;
}

PolicyTable::PolicyTable(int kappa, int num_channel_states, int battery_capacity, int max_attempts,
                         std::vector<double> rho_grid)
    : kappa_(kappa), G_(num_channel_states), B_(battery_capacity), K_(max_attempts), rho_grid_(std::move(rho_grid)) {
  if (kappa_ < 1 || G_ < 1 || B_ < 0 || K_ < 1 || rho_grid_.empty())
    throw std::invalid_argument("PolicyTable: invalid shape");
  enumerate_buckets();
  actions_.assign(rho_grid_.size() * buckets_.size() * static_cast<std::size_t>((B_ + 1) * K_), -1);
}

void PolicyTable::enumerate_buckets() {
  buckets_.clear();
  bucket_lookup_.clear();
  std::vector<int> c(static_cast<std::size_t>(G_), 0);
  // compositions of kappa into G parts, lexicographic
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == c.size()) {
      c[pos] = left;
      bucket_lookup_.emplace(c, buckets_.size());
      buckets_.push_back(c);
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, kappa_);
}

std::size_t PolicyTable::bucket_index(const std::vector<int>& bucket) const {
  auto it = bucket_lookup_.find(bucket);
  if (it == bucket_lookup_.end()) throw std::out_of_range("PolicyTable: unknown belief bucket");
  return it->second;
}

std::size_t PolicyTable::flat(std::size_t rho, std::size_t bucket, int b, int k) const {
  return ((rho * buckets_.size() + bucket) * static_cast<std::size_t>(B_ + 1) + static_cast<std::size_t>(b)) *
             static_cast<std::size_t>(K_) +
         static_cast<std::size_t>(k - 1);
}

void PolicyTable::tabulate(std::size_t rho_index, const MdpModel& mdp, const ValueIterationResult& vi) {
  if (rho_index >= rho_grid_.size()) throw std::out_of_range("PolicyTable: rho index");
  if (mdp.battery_capacity() != B_ || mdp.num_channel_states() != G_ || mdp.max_attempts() != K_)
    throw std::invalid_argument("PolicyTable: MDP shape does not match the table");
  for (std::size_t q = 0; q < buckets_.size(); ++q) {
    Belief centre(G_);
    for (int g = 0; g < G_; ++g) centre(g) = static_cast<double>(buckets_[q][static_cast<std::size_t>(g)]) / kappa_;
    for (int b = 0; b <= B_; ++b)
      for (int k = 1; k <= K_; ++k) actions_[flat(rho_index, q, b, k)] = mlph_action(centre, b, k, mdp, vi);
  }
}

int PolicyTable::lookup(double rho, const Belief& belief, int available, int k) const {
  if (available <= 0) return 0;
  std::size_t r = 0;
  for (std::size_t i = 1; i < rho_grid_.size(); ++i)
    if (std::abs(rho_grid_[i] - rho) < std::abs(rho_grid_[r] - rho)) r = i;
  const int b = std::min(available, B_);
  const int a = actions_[flat(r, bucket_index(quantize_belief(belief, kappa_)), b, k)];
  if (a < 0) throw std::logic_error("PolicyTable: entry was never tabulated");
  return std::min(a, available);
}

double PolicyTable::memory_formula_bits() const {
  const double states = static_cast<double>(B_ + 1) * G_ * K_;
  return kappa_ * static_cast<double>(B_ + 1) * states * states;
}

void PolicyTable::save(std::ostream& out) const {
  out << "ehlink-policy-table " << kFormatVersion << '\n';
  out << kappa_ << ' ' << G_ << ' ' << B_ << ' ' << K_ << ' ' << rho_grid_.size() << '\n';
  out.precision(17);
  for (double r : rho_grid_) out << r << ' ';
  out << '\n';
  for (std::size_t i = 0; i < actions_.size(); ++i) out << actions_[i] << ((i + 1) % 64 == 0 ? '\n' : ' ');
  out << '\n';
}

PolicyTable PolicyTable::load(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ehlink-policy-table") throw ConfigError("policy table: bad header");
  if (version != kFormatVersion) throw ConfigError("policy table: unsupported version " + std::to_string(version));
  int kappa, G, B, K;
  std::size_t nr;
  if (!(in >> kappa >> G >> B >> K >> nr)) throw ConfigError("policy table: bad shape line");
  std::vector<double> grid(nr);
  for (auto& r : grid)
    if (!(in >> r)) throw ConfigError("policy table: bad rho grid");
  PolicyTable t(kappa, G, B, K, std::move(grid));
  for (auto& a : t.actions_)
    if (!(in >> a)) throw ConfigError("policy table: truncated action list");
  return t;
}

void PolicyTable::save_file(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  save(f);
}

PolicyTable PolicyTable::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open policy table " + path);
  return load(f);
}

}  // namespace ehlink::policy
