#ifndef CTBN_MARKOV_HPP
#define CTBN_MARKOV_HPP

#include "ctbn/linalg.hpp"
#include "ctbn/state_indexer.hpp"

#include <vector>

namespace ctbn {

/// Generator of a homogeneous continuous-time Markov process: nonnegative
/// off-diagonal rates, rows summing to zero.
struct IntensityMatrix {
  StateIndexer indexer;
  Matrix q;

  std::size_t size() const { return indexer.size(); }
};

/// Restriction of an intensity matrix to a retained state subset. Rows may
/// leak (sum below zero) since transitions can leave the subsystem.
struct SubIntensityMatrix {
  StateIndexer parent;
  std::vector<std::size_t> retained; // parent-space indices, order preserved
  Matrix u;
};

/// Q = M (P_E - I): diagonal holding-rate matrix M and the embedded jump
/// chain P_E (row-stochastic, zero diagonal).
struct EmbeddedDecomposition {
  Matrix holding;
  Matrix jumps;
};

/// Checks entries for intensity-matrix validity and wraps them.
IntensityMatrix validate_intensity(const Matrix& entries, const StateIndexer& indexer);

/// p0 exp(Q t), renormalized.
RowVector transient_distribution(const RowVector& p0, const IntensityMatrix& q, double t);

/// Joint distribution over (X(s), X(t)): entry (i,j) = P(X(s)=i) P(X(t)=j | X(s)=i).
Matrix joint_two_time(const RowVector& p0, const IntensityMatrix& q, double s, double t);

/// Splits Q into holding rates and the embedded jump chain. Rejects
/// absorbing states (zero diagonal), for which the jump row is undefined.
EmbeddedDecomposition embedded_decomposition(const IntensityMatrix& q);

/// U_S: the rows/columns of Q at the retained states, order preserved.
SubIntensityMatrix extract_subsystem(const IntensityMatrix& q,
                                     const std::vector<std::size_t>& retained);

/// Phase distribution F(t) = 1 - P0 exp(U t) e: probability of having left
/// the subsystem by time t.
double phase_cdf(const RowVector& entrance, const SubIntensityMatrix& u, double t);

/// Expected time within the subsystem, P0 (-U)^-1 e.
double expected_holding_time(const RowVector& entrance, const SubIntensityMatrix& u);

/// Distribution over the first state outside the retained subset reached on
/// exit, given an entrance distribution over the retained states. Indexed by
/// the complement states in parent order.
RowVector exit_distribution(const RowVector& entrance, const IntensityMatrix& q,
                            const std::vector<std::size_t>& retained);

/// Complement of a retained subset, in parent-space order.
std::vector<std::size_t> complement_states(const StateIndexer& indexer,
                                           const std::vector<std::size_t>& retained);

} // namespace ctbn

#endif
