#ifndef CTBN_MODEL_HPP
#define CTBN_MODEL_HPP

#include "ctbn/cim.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace ctbn {

inline constexpr std::size_t kDefaultStateCap = 1u << 16;

/// Acyclic Bayesian network over the model's variables, giving the
/// distribution of the state at time zero. Parent lists index into the
/// model's variable list; each CPT row is a distribution over the
/// variable's domain, rows keyed by the canonical parent instantiation.
struct InitialBn {
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<RowVector>> cpts;
};

/// A continuous time Bayesian network: a directed (possibly cyclic) graph
/// over finite-domain variables, one CIM per variable conditioned on its
/// graph parents, and an initial-distribution Bayesian network.
struct Ctbn {
  std::vector<VariableSpec> variables;
  std::vector<std::vector<int>> parents; // dynamics graph, may be cyclic
  std::vector<Cim> cims;                 // cims[i] has subject {variables[i]}
  InitialBn initial;

  int variable_index(const std::string& name) const; // -1 when absent
  StateIndexer joint_indexer() const;                // declared variable order
  StateIndexer parent_indexer(int variable) const;
};

/// Verifies all structural invariants; throws ValidationError otherwise.
/// Cycles in the dynamics graph are fine; cycles in the initial network are not.
const Ctbn& validate_network(const Ctbn& model);

/// Amalgamates every per-variable CIM into the joint intensity matrix, with
/// states ordered by the declared variable order.
IntensityMatrix joint_intensity(const Ctbn& model, std::size_t cap = kDefaultStateCap);

/// All variables reachable from X by a directed path of length >= 1
/// (a variable on a cycle is its own descendant).
std::set<std::string> descendants(const Ctbn& model, const std::string& variable);

/// Exact initial distribution over the joint space.
RowVector initial_joint(const Ctbn& model, std::size_t cap = kDefaultStateCap);

/// Marginal of the initial distribution over the named variables, in the
/// given order.
RowVector initial_marginal(const Ctbn& model, const std::vector<std::string>& vars,
                           std::size_t cap = kDefaultStateCap);

} // namespace ctbn

#endif
