#include "ctbn/cliquetree.hpp"
#include "ctbn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace ctbn {

namespace {

// min-fill elimination; returns the elimination cliques as sorted index sets
std::vector<std::vector<int>> triangulate(std::vector<std::vector<char>> adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<std::vector<int>> cliques;

  for (int round = 0; round < n; ++round) {
    int best = -1;
    long best_fill = -1;
    for (int v = 0; v < n; ++v) {
      if (!active[static_cast<std::size_t>(v)]) continue;
      std::vector<int> nb;
      for (int u = 0; u < n; ++u)
        if (u != v && active[static_cast<std::size_t>(u)] &&
            adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)])
          nb.push_back(u);
      long fill = 0;
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b)
          if (!adj[static_cast<std::size_t>(nb[a])][static_cast<std::size_t>(nb[b])]) ++fill;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }

    std::vector<int> clique{best};
    for (int u = 0; u < n; ++u)
      if (u != best && active[static_cast<std::size_t>(u)] &&
          adj[static_cast<std::size_t>(best)][static_cast<std::size_t>(u)])
        clique.push_back(u);
    std::sort(clique.begin(), clique.end());
    cliques.push_back(clique);

    for (std::size_t a = 0; a < clique.size(); ++a)
      for (std::size_t b = a + 1; b < clique.size(); ++b) {
        adj[static_cast<std::size_t>(clique[a])][static_cast<std::size_t>(clique[b])] = 1;
        adj[static_cast<std::size_t>(clique[b])][static_cast<std::size_t>(clique[a])] = 1;
      }
    active[static_cast<std::size_t>(best)] = 0;
  }
  return cliques;
}

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

RowVector project_dist(const RowVector& dist, const StateIndexer& from, const StateIndexer& to) {
  RowVector out = RowVector::Zero(static_cast<Eigen::Index>(to.size()));
  for (std::size_t x = 0; x < from.size(); ++x)
    out(static_cast<Eigen::Index>(from.project(x, to))) += dist(static_cast<Eigen::Index>(x));
  return out;
}

StateIndexer sub_indexer(const Ctbn& model, const std::vector<std::string>& names) {
  std::vector<VariableSpec> vars;
  for (const auto& name : names)
    vars.push_back(model.variables[static_cast<std::size_t>(model.variable_index(name))]);
  return StateIndexer(vars);
}

// BFS order and parent pointers rooted at `root`
void bfs(const CliqueTree& tree, int root, std::vector<int>& order, std::vector<int>& parent) {
  const int n = static_cast<int>(tree.cliques.size());
  order.clear();
  parent.assign(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(root);
  seen[static_cast<std::size_t>(root)] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    order.push_back(v);
    for (int u : tree.neighbors[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        parent[static_cast<std::size_t>(u)] = v;
        q.push(u);
      }
  }
  if (order.size() != tree.cliques.size())
    throw ValidationError("clique tree is not connected");
}

const std::vector<std::string>& sepset_between(const CliqueTree& tree, int a, int b) {
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    auto [u, v] = tree.edges[e];
    if ((u == a && v == b) || (u == b && v == a)) return tree.sepsets[e];
  }
  throw ValidationError("no tree edge between cliques " + std::to_string(a) + " and " +
                        std::to_string(b));
}

void compute_message(CliqueTree& tree, int i, int j, const ApproxConfig& cfg) {
  const Clique& ci = tree.cliques[static_cast<std::size_t>(i)];

  Cim operand = ci.potential;
  for (int k : tree.neighbors[static_cast<std::size_t>(i)]) {
    if (k == j) continue;
    auto it = tree.messages.find({k, i});
    if (it == tree.messages.end())
      throw ValidationError("message schedule error: " + std::to_string(k) + "->" +
                            std::to_string(i) + " not yet available");
    operand = amalgamate(operand, it->second);
  }

  const auto& sepset = sepset_between(tree, i, j);
  std::vector<std::string> eliminate;
  for (const auto& v : operand.subjects.variables())
    if (std::find(sepset.begin(), sepset.end(), v.name) == sepset.end())
      eliminate.push_back(v.name);

  if (eliminate.empty()) {
    tree.messages[{i, j}] = operand;
    return;
  }

  // reference distribution: the clique's current estimate, optionally evolved
  // to t* under its previous dynamics, projected onto the operand scope
  RowVector ref = ci.dist;
  if (cfg.tstar > 0.0 && ci.calibrated)
    ref = transient_distribution(ref, IntensityMatrix{ci.indexer, ci.dynamics}, cfg.tstar);
  RowVector ref_scope = project_dist(ref, ci.indexer, operand.subjects);

  try {
    tree.messages[{i, j}] = marginalize_cim(operand, eliminate, {ref_scope}, cfg.method,
                                            cfg.uniform_fallback);
  } catch (const Error& e) {
    throw NumericError("message " + std::to_string(i) + "->" + std::to_string(j) + ": " +
                       e.what());
  }
}

} // namespace

int CliqueTree::clique_containing(const std::string& variable) const {
  for (std::size_t i = 0; i < cliques.size(); ++i)
    if (std::find(cliques[i].vars.begin(), cliques[i].vars.end(), variable) !=
        cliques[i].vars.end())
      return static_cast<int>(i);
  return -1;
}

CliqueTree build_clique_tree(const Ctbn& model, std::size_t cap) {
  validate_network(model);
  const int n = static_cast<int>(model.variables.size());

  // moral graph: child-parent and parent-parent edges, directions dropped
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n),
                                     std::vector<char>(static_cast<std::size_t>(n), 0));
  auto connect = [&](int a, int b) {
    if (a == b) return;
    adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
    adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
  };
  for (int c = 0; c < n; ++c) {
    const auto& ps = model.parents[static_cast<std::size_t>(c)];
    for (std::size_t a = 0; a < ps.size(); ++a) {
      connect(c, ps[a]);
      for (std::size_t b = a + 1; b < ps.size(); ++b) connect(ps[a], ps[b]);
    }
  }

  auto elim_cliques = triangulate(adj);

  // keep maximal cliques only, preserving first-occurrence order
  std::vector<std::vector<int>> maximal;
  for (const auto& c : elim_cliques) {
    bool contained = false;
    for (const auto& other : elim_cliques)
      if (&other != &c && c.size() < other.size() && subset_of(c, other)) {
        contained = true;
        break;
      }
    if (contained) continue;
    if (std::find(maximal.begin(), maximal.end(), c) == maximal.end()) maximal.push_back(c);
  }

  CliqueTree tree;
  tree.model = model;

  for (const auto& members : maximal) {
    Clique clique;
    for (int v : members) clique.vars.push_back(model.variables[static_cast<std::size_t>(v)].name);
    clique.indexer = sub_indexer(model, clique.vars);
    if (clique.indexer.size() > cap)
      throw CapExceededError("clique over " + std::to_string(clique.vars.size()) +
                             " variables has " + std::to_string(clique.indexer.size()) +
                             " states, cap is " + std::to_string(cap));
    tree.cliques.push_back(std::move(clique));
  }

  // maximum-sepset-weight spanning tree; ties by clique index pair
  struct Cand {
    int w, i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < static_cast<int>(maximal.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(maximal.size()); ++j) {
      std::vector<int> inter;
      std::set_intersection(maximal[static_cast<std::size_t>(i)].begin(),
                            maximal[static_cast<std::size_t>(i)].end(),
                            maximal[static_cast<std::size_t>(j)].begin(),
                            maximal[static_cast<std::size_t>(j)].end(),
                            std::back_inserter(inter));
      cands.push_back({static_cast<int>(inter.size()), i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  DisjointSets dsu(static_cast<int>(maximal.size()));
  tree.neighbors.assign(maximal.size(), {});
  for (const auto& c : cands) {
    if (!dsu.unite(c.i, c.j)) continue;
    tree.edges.push_back({c.i, c.j});
    std::vector<std::string> sep;
    for (const auto& name : tree.cliques[static_cast<std::size_t>(c.i)].vars)
      if (std::find(tree.cliques[static_cast<std::size_t>(c.j)].vars.begin(),
                    tree.cliques[static_cast<std::size_t>(c.j)].vars.end(),
                    name) != tree.cliques[static_cast<std::size_t>(c.j)].vars.end())
        sep.push_back(name);
    tree.sepsets.push_back(std::move(sep));
    tree.neighbors[static_cast<std::size_t>(c.i)].push_back(c.j);
    tree.neighbors[static_cast<std::size_t>(c.j)].push_back(c.i);
  }
  for (auto& nb : tree.neighbors) std::sort(nb.begin(), nb.end());

  // assign each variable to the first clique holding its whole family
  for (int v = 0; v < n; ++v) {
    const std::string& name = model.variables[static_cast<std::size_t>(v)].name;
    int home = -1;
    for (std::size_t c = 0; c < tree.cliques.size(); ++c) {
      const auto& vars = tree.cliques[c].vars;
      bool ok = std::find(vars.begin(), vars.end(), name) != vars.end();
      for (int p : model.parents[static_cast<std::size_t>(v)])
        ok = ok && std::find(vars.begin(), vars.end(),
                             model.variables[static_cast<std::size_t>(p)].name) != vars.end();
      if (ok) {
        home = static_cast<int>(c);
        break;
      }
    }
    if (home < 0)
      throw ValidationError("no clique contains the family of '" + name + "'");
    tree.cliques[static_cast<std::size_t>(home)].assigned.push_back(name);
  }

  for (auto& clique : tree.cliques) {
    Cim f = trivial_cim();
    for (const auto& name : clique.assigned)
      f = amalgamate(f, model.cims[static_cast<std::size_t>(model.variable_index(name))]);
    clique.potential = std::move(f);
    clique.dist = initial_marginal(model, clique.vars, cap);
  }
  return tree;
}

void calibrate_dynamics(CliqueTree& tree, const ApproxConfig& cfg) {
  std::vector<int> order, parent;
  bfs(tree, cfg.root, order, parent);

  tree.messages.clear();
  // inward: leaves toward the root
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (parent[static_cast<std::size_t>(*it)] >= 0)
      compute_message(tree, *it, parent[static_cast<std::size_t>(*it)], cfg);
  // outward: root toward the leaves
  for (int v : order)
    for (int u : tree.neighbors[static_cast<std::size_t>(v)])
      if (parent[static_cast<std::size_t>(u)] == v) compute_message(tree, v, u, cfg);

  for (std::size_t i = 0; i < tree.cliques.size(); ++i) {
    Clique& clique = tree.cliques[i];
    Cim acc = clique.potential;
    for (int k : tree.neighbors[i]) acc = amalgamate(acc, tree.messages.at({k, static_cast<int>(i)}));
    if (acc.conditions.num_variables() != 0)
      throw ValidationError("clique " + std::to_string(i) +
                            " dynamics still conditioned after message passing");
    if (acc.subjects.num_variables() != clique.vars.size())
      throw ValidationError("clique " + std::to_string(i) +
                            " dynamics do not cover the clique scope");
    acc = reorder_subjects(acc, clique.vars);
    clique.dynamics = acc.components[0];
    clique.calibrated = true;
  }
  tree.since_recalc = 0.0;
}

void propagate(CliqueTree& tree, double d, const ApproxConfig& cfg) {
  if (d < 0.0) throw ValidationError("propagate: negative duration");
  if (d == 0.0) return;
  for (const auto& c : tree.cliques)
    if (!c.calibrated) throw ValidationError("propagate: dynamics not calibrated");

  auto advance = [&](double step) {
    for (auto& clique : tree.cliques)
      clique.dist = transient_distribution(clique.dist,
                                           IntensityMatrix{clique.indexer, clique.dynamics}, step);
  };

  if (cfg.recalc <= 0.0) {
    advance(d);
    tree.since_recalc += d;
    return;
  }
  double remaining = d;
  while (remaining > 1e-12) {
    double step = std::min(cfg.recalc - tree.since_recalc, remaining);
    advance(step);
    remaining -= step;
    tree.since_recalc += step;
    if (tree.since_recalc >= cfg.recalc - 1e-12) calibrate_dynamics(tree, cfg);
  }
}

void calibrate_distributions(CliqueTree& tree, int root) {
  std::vector<int> order, parent;
  bfs(tree, root, order, parent);
  for (int v : order) {
    int u = parent[static_cast<std::size_t>(v)];
    if (u < 0) continue;
    const auto& sep = sepset_between(tree, u, v);
    if (sep.empty()) continue;
    StateIndexer sidx = sub_indexer(tree.model, sep);
    Clique& cu = tree.cliques[static_cast<std::size_t>(u)];
    Clique& cv = tree.cliques[static_cast<std::size_t>(v)];
    RowVector mu = project_dist(cu.dist, cu.indexer, sidx);
    RowVector mv = project_dist(cv.dist, cv.indexer, sidx);
    for (std::size_t x = 0; x < cv.indexer.size(); ++x) {
      std::size_t s = cv.indexer.project(x, sidx);
      double denom = mv(static_cast<Eigen::Index>(s));
      if (denom <= 0.0) {
        if (mu(static_cast<Eigen::Index>(s)) > 1e-12)
          throw NumericError("calibrate_distributions: sepset support mismatch between cliques " +
                             std::to_string(u) + " and " + std::to_string(v));
        cv.dist(static_cast<Eigen::Index>(x)) = 0.0;
      } else {
        cv.dist(static_cast<Eigen::Index>(x)) *= mu(static_cast<Eigen::Index>(s)) / denom;
      }
    }
    double total = cv.dist.sum();
    if (total <= 0.0)
      throw NumericError("calibrate_distributions: clique " + std::to_string(v) +
                         " lost all mass");
    cv.dist /= total;
  }
}

void incorporate_evidence(CliqueTree& tree, const std::string& variable,
                          const std::string& value, const ApproxConfig& cfg) {
  int home = tree.clique_containing(variable);
  if (home < 0) throw ValidationError("no clique contains variable '" + variable + "'");
  const int vm = tree.model.variable_index(variable);
  const int val = tree.model.variables[static_cast<std::size_t>(vm)].value_index(value);
  if (val < 0)
    throw ValidationError("value '" + value + "' not in the domain of '" + variable + "'");

  calibrate_distributions(tree, cfg.root);

  Clique& ch = tree.cliques[static_cast<std::size_t>(home)];
  int pos = ch.indexer.variable_position(variable);
  for (std::size_t x = 0; x < ch.indexer.size(); ++x)
    if (ch.indexer.digit(x, static_cast<std::size_t>(pos)) != val)
      ch.dist(static_cast<Eigen::Index>(x)) = 0.0;
  double s = ch.dist.sum();
  if (s <= 0.0)
    throw NumericError("evidence has zero probability: " + variable + "=" + value);
  ch.dist /= s;

  calibrate_distributions(tree, home);
}

RowVector approx_joint(const CliqueTree& tree, std::size_t cap) {
  StateIndexer joint = tree.model.joint_indexer();
  if (joint.size() > cap)
    throw CapExceededError("joint space exceeds cap in approx_joint");

  // sepset marginals, checked for consistency between the two sides
  std::vector<StateIndexer> sidx;
  std::vector<RowVector> smarg;
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    if (tree.sepsets[e].empty()) {
      sidx.emplace_back();
      smarg.emplace_back(RowVector::Ones(1));
      continue;
    }
    StateIndexer s = sub_indexer(tree.model, tree.sepsets[e]);
    const Clique& cu = tree.cliques[static_cast<std::size_t>(tree.edges[e].first)];
    const Clique& cv = tree.cliques[static_cast<std::size_t>(tree.edges[e].second)];
    RowVector mu = project_dist(cu.dist, cu.indexer, s);
    RowVector mv = project_dist(cv.dist, cv.indexer, s);
    if ((mu - mv).cwiseAbs().maxCoeff() > 1e-6)
      throw NumericError("approx_joint: sepset marginals inconsistent, run the downward pass");
    sidx.push_back(std::move(s));
    smarg.push_back(std::move(mu));
  }

  RowVector out(static_cast<Eigen::Index>(joint.size()));
  for (std::size_t x = 0; x < joint.size(); ++x) {
    double num = 1.0;
    for (const auto& clique : tree.cliques)
      num *= clique.dist(static_cast<Eigen::Index>(joint.project(x, clique.indexer)));
    double den = 1.0;
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
      if (tree.sepsets[e].empty()) continue;
      den *= smarg[e](static_cast<Eigen::Index>(joint.project(x, sidx[e])));
    }
    out(static_cast<Eigen::Index>(x)) = den > 0.0 ? num / den : 0.0;
  }
  double total = out.sum();
  if (total <= 0.0) throw NumericError("approx_joint: reconstructed joint has no mass");
  return out / total;
}

RowVector clique_marginal(const CliqueTree& tree, const std::vector<std::string>& vars) {
  if (vars.empty()) throw ValidationError("clique_marginal: empty variable subset");
  for (const auto& clique : tree.cliques) {
    bool all = true;
    for (const auto& v : vars)
      all = all && std::find(clique.vars.begin(), clique.vars.end(), v) != clique.vars.end();
    if (all) return project_dist(clique.dist, clique.indexer, sub_indexer(tree.model, vars));
  }
  // the variables span several cliques; fall back to the reconstructed joint
  RowVector joint = approx_joint(tree);
  return marginalize(joint, tree.model.joint_indexer(), vars);
}

void run_sequence(CliqueTree& tree, const Evidence& ev, double t_query,
                  const ApproxConfig& cfg) {
  bool calibrated = true;
  for (const auto& c : tree.cliques) calibrated = calibrated && c.calibrated;
  if (!calibrated) calibrate_dynamics(tree, cfg);

  struct Later {
    double time;
    std::string variable;
    int value;
  };
  std::vector<Later> later;

  double cur = 0.0;
  for (const auto& o : ev.observations()) {
    if (o.time <= t_query) {
      propagate(tree, o.time - cur, cfg);
      incorporate_evidence(tree, o.variable, o.value, cfg);
      cur = o.time;
    } else {
      int vm = tree.model.variable_index(o.variable);
      if (vm < 0) throw ValidationError("evidence on unknown variable '" + o.variable + "'");
      int val = tree.model.variables[static_cast<std::size_t>(vm)].value_index(o.value);
      if (val < 0)
        throw ValidationError("value '" + o.value + "' not in the domain of '" + o.variable + "'");
      later.push_back({o.time, o.variable, val});
    }
  }
  propagate(tree, t_query - cur, cfg);

  if (!later.empty()) {
    // per-clique backward likelihood of the post-query evidence
    std::vector<Vector> w;
    for (const auto& clique : tree.cliques)
      w.push_back(Vector::Ones(static_cast<Eigen::Index>(clique.indexer.size())));

    auto apply_indicator = [&](const Later& o) {
      for (std::size_t i = 0; i < tree.cliques.size(); ++i) {
        const Clique& c = tree.cliques[i];
        int pos = c.indexer.variable_position(o.variable);
        if (pos < 0) continue;
        for (std::size_t x = 0; x < c.indexer.size(); ++x)
          if (c.indexer.digit(x, static_cast<std::size_t>(pos)) != o.value)
            w[i](static_cast<Eigen::Index>(x)) = 0.0;
      }
    };
    auto roll_back = [&](double dt) {
      for (std::size_t i = 0; i < tree.cliques.size(); ++i) {
        const Clique& c = tree.cliques[i];
        w[i] = matrix_exp(c.dynamics, dt) * w[i];
      }
    };

    std::size_t k = later.size();
    double tau = later[k - 1].time;
    while (k > 0 && later[k - 1].time == tau) apply_indicator(later[--k]);
    while (k > 0) {
      double next = later[k - 1].time;
      roll_back(tau - next);
      tau = next;
      while (k > 0 && later[k - 1].time == tau) apply_indicator(later[--k]);
    }
    roll_back(tau - t_query);

    for (std::size_t i = 0; i < tree.cliques.size(); ++i) {
      Clique& c = tree.cliques[i];
      c.dist = c.dist.cwiseProduct(w[i].transpose());
      double s = c.dist.sum();
      if (s <= 0.0)
        throw NumericError("run_sequence: later evidence has zero probability in clique " +
                           std::to_string(i));
      c.dist /= s;
    }
  }
  calibrate_distributions(tree, cfg.root);
}

} // namespace ctbn
