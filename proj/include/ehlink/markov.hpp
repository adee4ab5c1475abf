#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehlink/errors.hpp"

namespace ehlink {

using Adjacency = std::vector<std::vector<int>>;

/// Closed communicating classes of a directed graph (SCCs with no edge leaving
/// them). A finite chain has a unique stationary distribution iff exactly one
/// such class exists.
std::vector<std::vector<int>> closed_classes(const Adjacency& graph);

std::string describe_classes(const std::vector<std::vector<int>>& classes);

template <typename Derived>
Adjacency support_graph(const Eigen::MatrixBase<Derived>& P) {
  Adjacency g(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j)
      if (P(i, j) > 0) g[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
  return g;
}

template <typename Scalar, int Options>
Adjacency support_graph(const Eigen::SparseMatrix<Scalar, Options>& P) {
  Adjacency g(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index o = 0; o < P.outerSize(); ++o)
    for (typename Eigen::SparseMatrix<Scalar, Options>::InnerIterator it(P, o); it; ++it)
      if (it.value() > 0) g[static_cast<std::size_t>(it.row())].push_back(static_cast<int>(it.col()));
  return g;
}

template <typename Derived>
void require_row_stochastic(const Eigen::MatrixBase<Derived>& P, double tol) {
  if (P.rows() != P.cols() || P.rows() == 0)
    throw std::invalid_argument("transition matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if ((P.row(i).array() < 0).any() || (P.row(i).array() > 1 + tol).any())
      throw std::invalid_argument("transition matrix row " + std::to_string(i) + " has entries outside [0,1]");
    const double s = static_cast<double>(P.row(i).sum());
    if (std::abs(s - 1.0) > tol)
      throw std::invalid_argument("transition matrix row " + std::to_string(i) + " sums to " + std::to_string(s));
  }
}

namespace detail {

inline void require_unique(const Adjacency& g) {
  auto classes = closed_classes(g);
  if (classes.size() != 1)
    throw AmbiguityError("stationary distribution is not unique: chain has " +
                         std::to_string(classes.size()) + " closed classes " + describe_classes(classes));
}

template <typename Vec>
void clean_distribution(Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < 0) x(i) = 0;
  x /= x.sum();
}

}  // namespace detail

/// Left eigenvector for eigenvalue 1 of a dense row-stochastic matrix, by a
/// direct solve of (P^T - I) x = 0 with one balance equation replaced by
/// sum(x) = 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> stationary_distribution(
    const Eigen::MatrixBase<Derived>& P) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  require_row_stochastic(P, 1e-9);
  detail::require_unique(support_graph(P));
  const Eigen::Index n = P.rows();
  Matrix A = P.transpose() - Matrix::Identity(n, n);
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b(n - 1) = 1;
  Vector x = A.fullPivLu().solve(b);
  detail::clean_distribution(x);
  return x;
}

template <typename Scalar, int Options>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stationary_distribution(const Eigen::SparseMatrix<Scalar, Options>& P) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (P.rows() != P.cols() || P.rows() == 0)
    throw std::invalid_argument("transition matrix must be square and non-empty");
  detail::require_unique(support_graph(P));
  const Eigen::Index n = P.rows();
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<std::size_t>(P.nonZeros() + 2 * n));
  for (Eigen::Index o = 0; o < P.outerSize(); ++o)
    for (typename Eigen::SparseMatrix<Scalar, Options>::InnerIterator it(P, o); it; ++it)
      if (it.col() != n - 1) trips.emplace_back(it.col(), it.row(), it.value());
  for (Eigen::Index i = 0; i < n - 1; ++i) trips.emplace_back(i, i, Scalar(-1));
  for (Eigen::Index j = 0; j < n; ++j) trips.emplace_back(n - 1, j, Scalar(1));
  Eigen::SparseMatrix<Scalar, Eigen::ColMajor> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar, Eigen::ColMajor>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("stationary solve: factorization failed");
  Vector b = Vector::Zero(n);
  b(n - 1) = 1;
  Vector x = lu.solve(b);
  detail::clean_distribution(x);
  return x;
}

/// max_j |(x P - x)_j|
template <typename VecDerived, typename MatDerived>
double stationary_residual(const Eigen::MatrixBase<VecDerived>& x, const Eigen::MatrixBase<MatDerived>& P) {
  return static_cast<double>((x.transpose() * P - x.transpose()).cwiseAbs().maxCoeff());
}

template <typename VecDerived, typename Scalar, int Options>
double stationary_residual(const Eigen::MatrixBase<VecDerived>& x, const Eigen::SparseMatrix<Scalar, Options>& P) {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> y = x.transpose() * P;
  return static_cast<double>((y - x.transpose()).cwiseAbs().maxCoeff());
}

}  // namespace ehlink
