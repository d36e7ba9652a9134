#ifndef CTBN_TESTS_TEST_UTIL_HPP
#define CTBN_TESTS_TEST_UTIL_HPP

#include <ctbn/linalg.hpp>
#include <ctbn/state_indexer.hpp>

#include <random>
#include <string>
#include <vector>

namespace ctbn::testutil {

inline std::string data_path(const std::string& name) {
  return std::string(CTBN_DATA_DIR) + "/" + name;
}

/// Truncated-series matrix exponential: an oracle independent of the
/// library's implementation. Accurate to roundoff for the small, mildly
/// scaled matrices used in tests.
inline Matrix taylor_exp(const Matrix& a, double t, int terms = 60) {
  const Eigen::Index n = a.rows();
  Matrix at = a * t;
  // scaling and squaring keeps the series well conditioned
  int squarings = 0;
  while (at.cwiseAbs().maxCoeff() > 0.5) {
    at *= 0.5;
    ++squarings;
  }
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    term = term * at / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Random intensity matrix with off-diagonal rates in (lo, hi).
inline Matrix random_intensity(std::mt19937& rng, int n, double lo = 0.05, double hi = 5.0) {
  std::uniform_real_distribution<double> rate(lo, hi);
  Matrix q = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double total = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      q(i, j) = rate(rng);
      total += q(i, j);
    }
    q(i, i) = -total;
  }
  return q;
}

inline RowVector random_distribution(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RowVector p(n);
  for (int i = 0; i < n; ++i) p(i) = u(rng);
  return p / p.sum();
}

inline double total_variation(const RowVector& a, const RowVector& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

inline bool valid_intensity_entries(const Matrix& q, double tol = 1e-9) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    double sum = 0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (i != j && q(i, j) < -tol) return false;
      sum += q(i, j);
    }
    if (q(i, i) > tol) return false;
    if (std::abs(sum) > 1e-7 * std::max(1.0, q.cwiseAbs().maxCoeff())) return false;
  }
  return true;
}

} // namespace ctbn::testutil

#endif
