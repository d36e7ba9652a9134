#include "ctbn/linalg.hpp"
#include "ctbn/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <vector>

namespace ctbn {

namespace {

bool looks_like_intensity(const Matrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) < -1e-12) return false;
      row += a(i, j);
    }
    if (std::abs(row) > 1e-9) return false;
  }
  return true;
}

// Recurrent classes of the jump digraph (edges where q_ij > 0), via Kosaraju.
int count_recurrent_classes(const Matrix& q) {
  const int n = static_cast<int>(q.rows());
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && q(i, j) > 0.0) {
        fwd[i].push_back(j);
        bwd[j].push_back(i);
      }

  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    // iterative post-order
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k < fwd[v].size()) {
        int w = fwd[v][k++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> stack{*it};
    comp[*it] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : bwd[v])
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }

  // a class is recurrent iff it has no edge leaving it
  std::vector<char> leaves(ncomp, 0);
  for (int i = 0; i < n; ++i)
    for (int j : fwd[i])
      if (comp[i] != comp[j]) leaves[comp[i]] = 1;
  int recurrent = 0;
  for (int c = 0; c < ncomp; ++c)
    if (!leaves[c]) ++recurrent;
  return recurrent;
}

} // namespace

Matrix matrix_exp(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw ValidationError("matrix_exp: matrix is not square");
  if (!a.allFinite()) throw ValidationError("matrix_exp: non-finite entries");
  if (t < 0.0) throw ValidationError("matrix_exp: negative time");

  Matrix result = (a * t).exp();

  if (looks_like_intensity(a)) {
    for (Eigen::Index i = 0; i < result.rows(); ++i) {
      for (Eigen::Index j = 0; j < result.cols(); ++j)
        if (result(i, j) < 0.0) result(i, j) = 0.0;
      double s = result.row(i).sum();
      if (s > 0.0) result.row(i) /= s;
    }
  }
  return result;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw ValidationError("solve_linear: matrix is not square");
  if (a.rows() != b.size()) throw ValidationError("solve_linear: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw NumericError("solve_linear: singular matrix");
  return lu.solve(b);
}

RowVector stationary_distribution(const Matrix& q) {
  const int n = static_cast<int>(q.rows());
  if (q.rows() != q.cols()) throw ValidationError("stationary_distribution: matrix is not square");

  if (count_recurrent_classes(q) != 1)
    throw NumericError(
        "stationary_distribution: multiple recurrent classes, stationary "
        "distribution is not unique");

  // pi Q = 0 with one equation replaced by the normalization sum(pi) = 1
  Matrix a = q.transpose();
  a.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b(n - 1) = 1.0;
  Vector pi = solve_linear(a, b);

  for (int i = 0; i < n; ++i)
    if (pi(i) < 0.0) pi(i) = 0.0;
  pi /= pi.sum();
  return pi.transpose();
}

double kl_divergence(const RowVector& p, const RowVector& q) {
  if (p.size() != q.size()) throw ValidationError("kl_divergence: dimension mismatch");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p(i) * std::log(p(i) / q(i));
  }
  return kl < 0.0 ? 0.0 : kl;
}

void check_prob_vector(const RowVector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) < 0.0)
      throw ValidationError(std::string(what) + ": negative entry at index " +
                            std::to_string(i));
  if (std::abs(v.sum() - 1.0) > 1e-9)
    throw ValidationError(std::string(what) + ": entries sum to " +
                          std::to_string(v.sum()) + ", expected 1");
}

} // namespace ctbn
