#ifndef CTBN_CLIQUETREE_HPP
#define CTBN_CLIQUETREE_HPP

#include "ctbn/exact.hpp"
#include "ctbn/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace ctbn {

struct ApproxConfig {
  MargMethod method = MargMethod::subsystem;
  double tstar = 0.0;   // reference distribution taken at this offset
  double recalc = 0.0;  // recalculation interval; 0 = never
  int root = 0;         // default root clique
  bool uniform_fallback = false;
  std::size_t cap = kDefaultStateCap;
};

struct Clique {
  std::vector<std::string> vars; // model declaration order
  StateIndexer indexer;
  std::vector<std::string> assigned; // variables whose CIM lives here
  Cim potential;                     // initial intensity potential f_i
  RowVector dist;                    // P_i over Val(C_i)
  Matrix dynamics;                   // calibrated intensity matrix over Val(C_i)
  bool calibrated = false;
};

/// Clique tree over the moralized, triangulated CTBN graph. Satisfies family
/// preservation and the running intersection property.
struct CliqueTree {
  Ctbn model;
  std::vector<Clique> cliques;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<std::string>> sepsets; // parallel to edges
  std::vector<std::vector<int>> neighbors;

  std::map<std::pair<int, int>, Cim> messages;

  // time advanced since the dynamics were last calibrated; lets the
  // recalculation interval span several propagate() calls
  double since_recalc = 0.0;

  int clique_containing(const std::string& variable) const; // first by index, -1 if none
};

/// Moralizes (parents connected, directions dropped), triangulates with the
/// minimum-fill heuristic, extracts maximal cliques, and assembles a
/// maximum-sepset-weight spanning tree. Potentials and initial clique
/// distributions are filled in; dynamics are not yet calibrated.
CliqueTree build_clique_tree(const Ctbn& model, std::size_t cap = kDefaultStateCap);

/// Two-phase message passing (leaves in, then out) with approximate
/// marginalization onto each sepset; leaves every clique with a calibrated
/// intensity matrix over its scope.
void calibrate_dynamics(CliqueTree& tree, const ApproxConfig& cfg);

/// Advances every clique distribution by d under its calibrated dynamics;
/// with cfg.recalc > 0 the dynamics are recomputed from the running
/// distributions every recalc time units.
void propagate(CliqueTree& tree, double d, const ApproxConfig& cfg);

/// Downward pass from `root`: rescales each clique so adjacent sepset
/// marginals agree, yielding one coherent joint distribution.
void calibrate_distributions(CliqueTree& tree, int root);

/// Conditions the tree on variable = value at the current time, after a
/// root-directed calibration pass, and spreads the update back out.
void incorporate_evidence(CliqueTree& tree, const std::string& variable,
                          const std::string& value, const ApproxConfig& cfg);

/// Joint distribution reconstructed from the clique-tree product form
/// (prod of clique distributions over prod of sepset marginals).
RowVector approx_joint(const CliqueTree& tree, std::size_t cap = kDefaultStateCap);

/// Marginal of a single variable read from the first clique containing it.
RowVector clique_marginal(const CliqueTree& tree, const std::vector<std::string>& vars);

/// Runs the full evidence sequence to t_query: alternating propagation and
/// evidence incorporation, with later-than-query evidence folded in as
/// backward likelihood weights per clique.
void run_sequence(CliqueTree& tree, const Evidence& ev, double t_query,
                  const ApproxConfig& cfg);

} // namespace ctbn

#endif
