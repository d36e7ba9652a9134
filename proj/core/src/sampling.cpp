#include "ctbn/sampling.hpp"
#include "ctbn/errors.hpp"

#include <cmath>
#include <optional>
#include <queue>
#include <random>

namespace ctbn {

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw in (0, 1]
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

int draw_categorical(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
  double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<int> topological_order(const std::vector<std::vector<int>>& parents) {
  const std::size_t n = parents.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (std::size_t c = 0; c < n; ++c)
    for (int p : parents[c]) {
      children[static_cast<std::size_t>(p)].push_back(static_cast<int>(c));
      ++indegree[c];
    }
  std::queue<int> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (order.size() != n) throw ValidationError("initial network contains a cycle");
  return order;
}

struct Candidate {
  int target;
  double rate;
};

} // namespace

EventSequence sample_trajectory(const Ctbn& model, double t_end, std::uint64_t seed,
                                std::uint64_t stream) {
  if (t_end <= 0.0) throw ValidationError("sample_trajectory: t_end must be positive");
  const std::size_t n = model.variables.size();

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);

  // initial state from the Bayesian network, sampled in topological order
  std::vector<int> state(n, -1);
  for (int v : topological_order(model.initial.parents)) {
    const auto vs = static_cast<std::size_t>(v);
    std::vector<VariableSpec> ps;
    for (int p : model.initial.parents[vs]) ps.push_back(model.variables[static_cast<std::size_t>(p)]);
    StateIndexer pidx{ps};
    std::vector<int> pa(model.initial.parents[vs].size());
    for (std::size_t k = 0; k < pa.size(); ++k)
      pa[k] = state[static_cast<std::size_t>(model.initial.parents[vs][k])];
    const RowVector& row = model.initial.cpts[vs][pidx.index_of(pa)];
    std::vector<double> w(row.data(), row.data() + row.size());
    state[vs] = draw_categorical(rng, w, row.sum());
  }

  std::vector<std::vector<int>> children(n);
  for (std::size_t c = 0; c < n; ++c)
    for (int p : model.parents[c]) children[static_cast<std::size_t>(p)].push_back(static_cast<int>(c));

  EventSequence out;
  out.initial = state;

  std::vector<std::optional<Candidate>> pending(n);
  double now = 0.0;

  while (true) {
    // refresh candidates for variables that lost theirs
    for (std::size_t v = 0; v < n; ++v) {
      if (pending[v]) continue;
      const Cim& cim = model.cims[v];
      std::vector<int> pa(model.parents[v].size());
      for (std::size_t k = 0; k < pa.size(); ++k)
        pa[k] = state[static_cast<std::size_t>(model.parents[v][k])];
      const Matrix& q = cim.components[cim.conditions.index_of(pa)];
      const int cur = state[v];
      const double rate = -q(cur, cur);
      if (rate <= 0.0) continue; // nothing to leave towards
      std::vector<double> w;
      std::vector<int> targets;
      for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (j != cur && q(cur, j) > 0.0) {
          w.push_back(q(cur, j));
          targets.push_back(static_cast<int>(j));
        }
      int pick = draw_categorical(rng, w, rate);
      pending[v] = Candidate{targets[static_cast<std::size_t>(pick)], rate};
    }

    double pooled = 0.0;
    for (const auto& c : pending)
      if (c) pooled += c->rate;
    if (pooled <= 0.0) break; // no variable can ever transition again

    now += -std::log(uniform01(rng)) / pooled;
    if (now > t_end) break;

    // pick the transitioning variable proportional to its candidate rate
    std::vector<double> w(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      if (pending[v]) w[v] = pending[v]->rate;
    int x = draw_categorical(rng, w, pooled);

    state[static_cast<std::size_t>(x)] = pending[static_cast<std::size_t>(x)]->target;
    out.events.push_back({x, state[static_cast<std::size_t>(x)], now});

    pending[static_cast<std::size_t>(x)].reset();
    for (int c : children[static_cast<std::size_t>(x)])
      pending[static_cast<std::size_t>(c)].reset();
  }
  return out;
}

std::vector<int> state_at(const EventSequence& traj, double t) {
  if (t < 0.0) throw ValidationError("state_at: negative time");
  std::vector<int> state = traj.initial;
  for (const auto& e : traj.events) {
    if (e.time > t) break;
    state[static_cast<std::size_t>(e.variable)] = e.value;
  }
  return state;
}

RowVector empirical_distribution(const Ctbn& model, const std::vector<EventSequence>& trajs,
                                 double t, const std::vector<std::string>& vars) {
  if (trajs.empty()) throw ValidationError("empirical_distribution: no trajectories");
  StateIndexer joint = model.joint_indexer();
  std::vector<VariableSpec> subvars;
  for (const auto& name : vars) {
    int i = model.variable_index(name);
    if (i < 0) throw ValidationError("unknown variable '" + name + "'");
    subvars.push_back(model.variables[static_cast<std::size_t>(i)]);
  }
  StateIndexer sub(subvars);
  RowVector out = RowVector::Zero(static_cast<Eigen::Index>(sub.size()));
  for (const auto& traj : trajs) {
    std::size_t idx = joint.index_of(state_at(traj, t));
    out(static_cast<Eigen::Index>(joint.project(idx, sub))) += 1.0;
  }
  out /= static_cast<double>(trajs.size());
  return out;
}

} // namespace ctbn
