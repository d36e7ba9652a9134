#include <doctest.h>

#include <ctbn/cliquetree.hpp>
#include <ctbn/io.hpp>

#include "test_util.hpp"

#include <algorithm>
#include <set>

using namespace ctbn;
using namespace ctbn::testutil;

namespace {

bool family_preserved(const Ctbn& model, const CliqueTree& tree) {
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    std::set<std::string> family{model.variables[v].name};
    for (int p : model.parents[v]) family.insert(model.variables[static_cast<std::size_t>(p)].name);
    bool found = false;
    for (const auto& c : tree.cliques) {
      std::set<std::string> scope(c.vars.begin(), c.vars.end());
      if (std::includes(scope.begin(), scope.end(), family.begin(), family.end())) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

} // namespace

TEST_CASE("chain clique tree has the expected structure") {
  Ctbn chain = parse_network(data_path("chain3.ctbn"));
  CliqueTree tree = build_clique_tree(chain);
  REQUIRE(tree.cliques.size() == 2);
  CHECK(tree.cliques[0].vars == std::vector<std::string>{"X", "Y"});
  CHECK(tree.cliques[1].vars == std::vector<std::string>{"Y", "Z"});
  REQUIRE(tree.edges.size() == 1);
  CHECK(tree.sepsets[0] == std::vector<std::string>{"Y"});
  CHECK(family_preserved(chain, tree));
}

TEST_CASE("drug clique tree preserves every family") {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  CliqueTree tree = build_clique_tree(drug);
  CHECK(family_preserved(drug, tree));
  CHECK(tree.edges.size() == tree.cliques.size() - 1);
  // running intersection: for each variable, the cliques containing it form a subtree;
  // spot check via the edge-sepset characterization over every pair of adjacent cliques
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    auto [i, j] = tree.edges[e];
    std::set<std::string> a(tree.cliques[static_cast<std::size_t>(i)].vars.begin(),
                            tree.cliques[static_cast<std::size_t>(i)].vars.end());
    std::set<std::string> b(tree.cliques[static_cast<std::size_t>(j)].vars.begin(),
                            tree.cliques[static_cast<std::size_t>(j)].vars.end());
    for (const auto& s : tree.sepsets[e]) {
      CHECK(a.count(s) == 1);
      CHECK(b.count(s) == 1);
    }
  }
  // clique potentials amalgamate to valid intensity components
  for (const auto& c : tree.cliques)
    for (const auto& comp : c.potential.components) CHECK(valid_intensity_entries(comp));
}

TEST_CASE("single-clique trees reproduce exact marginals for both methods") {
  Ctbn yz = parse_network(data_path("yz.ctbn"));
  IntensityMatrix q = joint_intensity(yz);
  RowVector p0 = initial_joint(yz);
  for (MargMethod method : {MargMethod::linear, MargMethod::subsystem}) {
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      CliqueTree tree = build_clique_tree(yz);
      REQUIRE(tree.cliques.size() == 1);
      ApproxConfig cfg;
      cfg.method = method;
      calibrate_dynamics(tree, cfg);
      propagate(tree, t, cfg);
      RowVector exact = transient_distribution(p0, q, t);
      RowVector approx = clique_marginal(tree, {"Z", "Y"});
      CHECK((approx - exact).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("calibrated distributions agree on sepsets") {
  Ctbn chain = parse_network(data_path("chain3.ctbn"));
  CliqueTree tree = build_clique_tree(chain);
  ApproxConfig cfg;
  cfg.recalc = 0.25;
  calibrate_dynamics(tree, cfg);
  propagate(tree, 1.5, cfg);
  calibrate_distributions(tree, 0);
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    auto [i, j] = tree.edges[e];
    const Clique& a = tree.cliques[static_cast<std::size_t>(i)];
    const Clique& b = tree.cliques[static_cast<std::size_t>(j)];
    RowVector ma = marginalize(a.dist, a.indexer, tree.sepsets[e]);
    RowVector mb = marginalize(b.dist, b.indexer, tree.sepsets[e]);
    CHECK((ma - mb).cwiseAbs().maxCoeff() < 1e-9);
  }
  RowVector joint = approx_joint(tree);
  CHECK(joint.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("frequent recalculation tracks the exact joint on the chain") {
  Ctbn chain = parse_network(data_path("chain3.ctbn"));
  IntensityMatrix q = joint_intensity(chain);
  RowVector exact = transient_distribution(initial_joint(chain), q, 2.0);
  CliqueTree tree = build_clique_tree(chain);
  ApproxConfig cfg;
  cfg.method = MargMethod::subsystem;
  cfg.recalc = 0.05;
  calibrate_dynamics(tree, cfg);
  propagate(tree, 2.0, cfg);
  calibrate_distributions(tree, 0);
  RowVector approx = approx_joint(tree);
  CHECK(total_variation(exact, approx) < 0.05);
}

TEST_CASE("evidence incorporation on a single clique equals exact conditioning") {
  Ctbn yz = parse_network(data_path("yz.ctbn"));
  Evidence ev(yz, {{1.0, "Y", "y1"}});
  RowVector exact = filter(yz, ev, 1.0);
  CliqueTree tree = build_clique_tree(yz);
  ApproxConfig cfg;
  calibrate_dynamics(tree, cfg);
  propagate(tree, 1.0, cfg);
  incorporate_evidence(tree, "Y", "y1", cfg);
  RowVector approx = clique_marginal(tree, {"Z", "Y"});
  CHECK((approx - exact).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("run_sequence handles future evidence and stays normalized") {
  Ctbn chain = parse_network(data_path("chain3.ctbn"));
  Evidence ev(chain, {{0.5, "X", "x2"}, {2.5, "Z", "z1"}});
  CliqueTree tree = build_clique_tree(chain);
  ApproxConfig cfg;
  cfg.recalc = 0.25;
  calibrate_dynamics(tree, cfg);
  run_sequence(tree, ev, 1.5, cfg);
  RowVector z = clique_marginal(tree, {"Z"});
  CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(z.minCoeff() >= 0.0);
  // the smoothed marginal should be pulled toward the later z1 observation
  // relative to the same engine run without the future observation
  Evidence forward_only(chain, {{0.5, "X", "x2"}});
  CliqueTree tree2 = build_clique_tree(chain);
  calibrate_dynamics(tree2, cfg);
  run_sequence(tree2, forward_only, 1.5, cfg);
  RowVector z_nofuture = clique_marginal(tree2, {"Z"});
  CHECK(z(0) > z_nofuture(0));
}

TEST_CASE("drug network end-to-end stays close to exact") {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  Evidence ev(drug, {{1.0, "Hungry", "not-hungry"}, {3.0, "Drowsy", "drowsy"}});
  RowVector exact_pain =
      marginalize(posterior_at(drug, ev, 6.0), drug.joint_indexer(), {"JointPain"});
  CliqueTree tree = build_clique_tree(drug);
  ApproxConfig cfg;
  cfg.method = MargMethod::subsystem;
  cfg.recalc = 0.5;
  calibrate_dynamics(tree, cfg);
  run_sequence(tree, ev, 6.0, cfg);
  RowVector approx_pain = clique_marginal(tree, {"JointPain"});
  CHECK(approx_pain.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(total_variation(exact_pain, approx_pain) < 0.25);
}
