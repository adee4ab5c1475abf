#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ehlink/mdp.hpp"

namespace ehlink::policy {

/// Belief rounded onto the simplex grid with step 1/kappa (largest-remainder
/// rounding, so the counts sum to kappa).
std::vector<int> quantize_belief(const Belief& belief, int kappa);

/// Precomputed MLPH actions keyed by (rho grid index, belief bucket, b, k).
class PolicyTable {
 public:
  static constexpr int kFormatVersion = 1;

  PolicyTable() = default;
  PolicyTable(int kappa, int num_channel_states, int battery_capacity, int max_attempts, std::vector<double> rho_grid);

  /// Adds the MLPH actions of one rho grid point for every bucket, b and k.
  void tabulate(std::size_t rho_index, const MdpModel& mdp, const ValueIterationResult& vi);

  /// Action for an arbitrary belief; the rho grid point nearest to `rho`.
  int lookup(double rho, const Belief& belief, int available, int k) const;

  int kappa() const { return kappa_; }
  const std::vector<double>& rho_grid() const { return rho_grid_; }
  std::size_t num_buckets() const { return buckets_.size(); }
  std::size_t num_entries() const { return actions_.size(); }
  /// kappa |U| |S|^2 bits, the storage estimate for a table of this shape.
  double memory_formula_bits() const;

  void save(std::ostream& out) const;
  static PolicyTable load(std::istream& in);
  void save_file(const std::string& path) const;
  static PolicyTable load_file(const std::string& path);

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;

 private:
  std::size_t bucket_index(const std::vector<int>& bucket) const;
  std::size_t flat(std::size_t rho, std::size_t bucket, int b, int k) const;
  void enumerate_buckets();

  int kappa_ = 10;
  int G_ = 1;
  int B_ = 0;
  int K_ = 1;
  std::vector<double> rho_grid_;
  std::vector<std::vector<int>> buckets_;
  std::map<std::vector<int>, std::size_t> bucket_lookup_;
  std::vector<int> actions_;  // -1 until tabulated
};

}  // namespace ehlink::policy
