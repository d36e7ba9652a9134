#include "ctbn/markov.hpp"
#include "ctbn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctbn {

IntensityMatrix validate_intensity(const Matrix& entries, const StateIndexer& indexer) {
  const auto n = static_cast<Eigen::Index>(indexer.size());
  if (entries.rows() != entries.cols())
    throw ValidationError("intensity matrix is not square");
  if (entries.rows() != n)
    throw ValidationError("intensity matrix is " + std::to_string(entries.rows()) +
                          "x" + std::to_string(entries.cols()) + " but the state space has " +
                          std::to_string(n) + " states");
  if (!entries.allFinite())
    throw ValidationError("intensity matrix has non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && entries(i, j) < 0.0)
        throw ValidationError("negative off-diagonal intensity at (" + std::to_string(i) +
                              ", " + std::to_string(j) + "): " + std::to_string(entries(i, j)));
    }
    if (entries(i, i) > 0.0)
      throw ValidationError("positive diagonal intensity at state " + std::to_string(i));
    double row = entries.row(i).sum();
    if (std::abs(row) > 1e-9)
      throw ValidationError("row " + std::to_string(i) + " sums to " + std::to_string(row) +
                            ", expected 0");
  }
  return IntensityMatrix{indexer, entries};
}

RowVector transient_distribution(const RowVector& p0, const IntensityMatrix& q, double t) {
  if (p0.size() != static_cast<Eigen::Index>(q.size()))
    throw ValidationError("transient_distribution: dimension mismatch");
  RowVector p = p0 * matrix_exp(q.q, t);
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) < 0.0) p(i) = 0.0;
  p /= p.sum();
  return p;
}

Matrix joint_two_time(const RowVector& p0, const IntensityMatrix& q, double s, double t) {
  if (s < 0.0 || s >= t)
    throw ValidationError("joint_two_time: need 0 <= s < t");
  RowVector ps = transient_distribution(p0, q, s);
  Matrix kernel = matrix_exp(q.q, t - s);
  return ps.transpose().asDiagonal() * kernel;
}

EmbeddedDecomposition embedded_decomposition(const IntensityMatrix& q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Matrix holding = Matrix::Zero(n, n);
  Matrix jumps = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double rate = -q.q(i, i);
    if (rate <= 0.0)
      throw ValidationError("state " + q.indexer.label(static_cast<std::size_t>(i)) +
                            " is absorbing, embedded chain undefined");
    holding(i, i) = rate;
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) jumps(i, j) = q.q(i, j) / rate;
  }
  return {holding, jumps};
}

SubIntensityMatrix extract_subsystem(const IntensityMatrix& q,
                                     const std::vector<std::size_t>& retained) {
  if (retained.empty())
    throw ValidationError("extract_subsystem: empty state subset");
  for (std::size_t s : retained)
    if (s >= q.size())
      throw ValidationError("extract_subsystem: state index " + std::to_string(s) +
                            " out of range");
  const auto m = static_cast<Eigen::Index>(retained.size());
  Matrix u(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      u(i, j) = q.q(static_cast<Eigen::Index>(retained[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(retained[static_cast<std::size_t>(j)]));
  return {q.indexer, retained, u};
}

double phase_cdf(const RowVector& entrance, const SubIntensityMatrix& u, double t) {
  if (entrance.size() != u.u.rows())
    throw ValidationError("phase_cdf: entrance dimension mismatch");
  if (t < 0.0) throw ValidationError("phase_cdf: negative time");
  double survive = (entrance * matrix_exp(u.u, t)).sum();
  double f = 1.0 - survive;
  return std::clamp(f, 0.0, 1.0);
}

double expected_holding_time(const RowVector& entrance, const SubIntensityMatrix& u) {
  if (entrance.size() != u.u.rows())
    throw ValidationError("expected_holding_time: entrance dimension mismatch");
  Vector ones = Vector::Ones(u.u.rows());
  Vector x;
  try {
    x = solve_linear(-u.u, ones);
  } catch (const NumericError&) {
    throw NumericError("expected_holding_time: subsystem is closed (-U singular)");
  }
  return entrance * x;
}

std::vector<std::size_t> complement_states(const StateIndexer& indexer,
                                           const std::vector<std::size_t>& retained) {
  std::vector<char> in(indexer.size(), 0);
  for (std::size_t s : retained) in[s] = 1;
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < indexer.size(); ++s)
    if (!in[s]) out.push_back(s);
  return out;
}

RowVector exit_distribution(const RowVector& entrance, const IntensityMatrix& q,
                            const std::vector<std::size_t>& retained) {
  SubIntensityMatrix sub = extract_subsystem(q, retained);
  std::vector<std::size_t> comp = complement_states(q.indexer, retained);
  if (comp.empty())
    throw ValidationError("exit_distribution: subsystem covers the whole space");

  const auto m = static_cast<Eigen::Index>(retained.size());
  const auto k = static_cast<Eigen::Index>(comp.size());

  // R holds intensities from retained to complement states; absorption
  // probabilities are (-U)^-1 R, reached with entrance weights P0.
  Matrix r(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      r(i, j) = q.q(static_cast<Eigen::Index>(retained[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(comp[static_cast<std::size_t>(j)]));

  Eigen::FullPivLU<Matrix> lu(-sub.u);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible())
    throw NumericError("exit_distribution: subsystem is closed, no exit reachable");
  Matrix absorb = lu.solve(r);

  RowVector out = entrance * absorb;
  double total = out.sum();
  if (total <= 0.0)
    throw NumericError("exit_distribution: no exit mass (closed subsystem)");
  out /= total;
  return out;
}

} // namespace ctbn
