#ifndef CTBN_LINALG_HPP
#define CTBN_LINALG_HPP

#include <Eigen/Dense>

namespace ctbn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// exp(A*t) for a square matrix A and t >= 0.
///
/// When A looks like an intensity matrix (nonnegative off-diagonals, rows
/// summing to zero) the result is cleaned up into a proper transition
/// kernel: entries in [-1e-12, 0) are clamped to zero and rows renormalized.
Matrix matrix_exp(const Matrix& a, double t);

/// Solves A x = b for nonsingular A. Throws NumericError on a singular system.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Stationary distribution pi of an intensity matrix: pi Q = 0, sum(pi) = 1.
///
/// Requires a single recurrent class; with several the stationary distribution
/// is not unique and a NumericError is thrown.
RowVector stationary_distribution(const Matrix& q);

/// Sum_i p(i) ln(p(i)/q(i)), with 0 ln(0/x) = 0. Returns +infinity when q
/// has a zero where p does not.
double kl_divergence(const RowVector& p, const RowVector& q);

/// Throws ValidationError unless v is a probability vector: entries >= 0
/// summing to 1 within 1e-9. `what` names the offending quantity.
void check_prob_vector(const RowVector& v, const char* what);

} // namespace ctbn

#endif
