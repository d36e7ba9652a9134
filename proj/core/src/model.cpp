#include "ctbn/model.hpp"
#include "ctbn/errors.hpp"

#include <algorithm>
#include <queue>

namespace ctbn {

int Ctbn::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

StateIndexer Ctbn::joint_indexer() const { return StateIndexer(variables); }

StateIndexer Ctbn::parent_indexer(int variable) const {
  std::vector<VariableSpec> ps;
  for (int p : parents[static_cast<std::size_t>(variable)])
    ps.push_back(variables[static_cast<std::size_t>(p)]);
  return StateIndexer(ps);
}

namespace {

void check_acyclic(const std::vector<std::vector<int>>& parents) {
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
  std::size_t seen = 0;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    ++seen;
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (seen != n)
    throw ValidationError("initial network contains a cycle");
}

} // namespace

const Ctbn& validate_network(const Ctbn& model) {
  const std::size_t n = model.variables.size();
  if (model.parents.size() != n || model.cims.size() != n ||
      model.initial.parents.size() != n || model.initial.cpts.size() != n)
    throw ValidationError("model component counts disagree with the variable count");

  for (std::size_t i = 0; i < n; ++i) {
    const auto& var = model.variables[i];
    const Cim& cim = model.cims[i];
    if (cim.subjects.num_variables() != 1 || !(cim.subjects.variables()[0] == var))
      throw ValidationError("CIM for '" + var.name + "' does not have it as its sole subject");

    // conditioning set must equal the graph parents, in order
    const auto& ps = model.parents[i];
    if (cim.conditions.num_variables() != ps.size())
      throw ValidationError("CIM for '" + var.name + "' conditions on " +
                            std::to_string(cim.conditions.num_variables()) +
                            " variables but the graph gives it " + std::to_string(ps.size()) +
                            " parents");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (ps[k] < 0 || ps[k] >= static_cast<int>(n))
        throw ValidationError("parent index out of range for '" + var.name + "'");
      if (!(cim.conditions.variables()[k] == model.variables[static_cast<std::size_t>(ps[k])]))
        throw ValidationError("CIM for '" + var.name + "' conditions on '" +
                              cim.conditions.variables()[k].name +
                              "' which is not its declared parent in that slot");
    }
    for (const auto& m : cim.components) validate_intensity(m, cim.subjects);
  }

  check_acyclic(model.initial.parents);
  for (std::size_t i = 0; i < n; ++i) {
    StateIndexer pidx([&] {
      std::vector<VariableSpec> ps;
      for (int p : model.initial.parents[i]) {
        if (p < 0 || p >= static_cast<int>(n))
          throw ValidationError("initial-network parent index out of range");
        ps.push_back(model.variables[static_cast<std::size_t>(p)]);
      }
      return ps;
    }());
    if (model.initial.cpts[i].size() != pidx.size())
      throw ValidationError("CPT for '" + model.variables[i].name + "' needs " +
                            std::to_string(pidx.size()) + " rows, has " +
                            std::to_string(model.initial.cpts[i].size()));
    for (const auto& row : model.initial.cpts[i]) {
      if (row.size() != static_cast<Eigen::Index>(model.variables[i].cardinality()))
        throw ValidationError("CPT row width mismatch for '" + model.variables[i].name + "'");
      check_prob_vector(row, ("CPT row for '" + model.variables[i].name + "'").c_str());
    }
  }
  return model;
}

IntensityMatrix joint_intensity(const Ctbn& model, std::size_t cap) {
  StateIndexer joint = model.joint_indexer();
  if (joint.size() > cap)
    throw CapExceededError("joint state space has " + std::to_string(joint.size()) +
                           " states, cap is " + std::to_string(cap));
  Cim acc = trivial_cim();
  for (const auto& cim : model.cims) acc = amalgamate(acc, cim);
  if (acc.conditions.num_variables() != 0)
    throw ValidationError("joint intensity is still conditioned; model parents inconsistent");
  // fold order already yields the declared variable order
  return IntensityMatrix{joint, acc.components[0]};
}

std::set<std::string> descendants(const Ctbn& model, const std::string& variable) {
  int start = model.variable_index(variable);
  if (start < 0) throw ValidationError("unknown variable '" + variable + "'");
  std::vector<std::vector<int>> children(model.variables.size());
  for (std::size_t c = 0; c < model.parents.size(); ++c)
    for (int p : model.parents[c]) children[static_cast<std::size_t>(p)].push_back(static_cast<int>(c));

  std::set<std::string> out;
  std::vector<char> seen(model.variables.size(), 0);
  std::queue<int> frontier;
  for (int c : children[static_cast<std::size_t>(start)]) frontier.push(c);
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = 1;
    out.insert(model.variables[static_cast<std::size_t>(v)].name);
    for (int c : children[static_cast<std::size_t>(v)]) frontier.push(c);
  }
  return out;
}

RowVector initial_joint(const Ctbn& model, std::size_t cap) {
  StateIndexer joint = model.joint_indexer();
  if (joint.size() > cap)
    throw CapExceededError("joint state space has " + std::to_string(joint.size()) +
                           " states, cap is " + std::to_string(cap));
  const std::size_t n = model.variables.size();

  // parent instantiation indexers for the initial network
  std::vector<StateIndexer> pidx(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<VariableSpec> ps;
    for (int p : model.initial.parents[i]) ps.push_back(model.variables[static_cast<std::size_t>(p)]);
    pidx[i] = StateIndexer(ps);
  }

  RowVector out(static_cast<Eigen::Index>(joint.size()));
  for (std::size_t x = 0; x < joint.size(); ++x) {
    auto assignment = joint.assignment_of(x);
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> pa(model.initial.parents[i].size());
      for (std::size_t k = 0; k < pa.size(); ++k)
        pa[k] = assignment[static_cast<std::size_t>(model.initial.parents[i][k])];
      p *= model.initial.cpts[i][pidx[i].index_of(pa)](assignment[i]);
    }
    out(static_cast<Eigen::Index>(x)) = p;
  }
  out /= out.sum();
  return out;
}

RowVector initial_marginal(const Ctbn& model, const std::vector<std::string>& vars,
                           std::size_t cap) {
  if (vars.empty()) throw ValidationError("initial_marginal: empty variable subset");
  StateIndexer joint = model.joint_indexer();
  std::vector<VariableSpec> subvars;
  for (const auto& name : vars) {
    int i = model.variable_index(name);
    if (i < 0) throw ValidationError("unknown variable '" + name + "'");
    subvars.push_back(model.variables[static_cast<std::size_t>(i)]);
  }
  StateIndexer sub(subvars);
  RowVector full = initial_joint(model, cap);
  RowVector out = RowVector::Zero(static_cast<Eigen::Index>(sub.size()));
  for (std::size_t x = 0; x < joint.size(); ++x)
    out(static_cast<Eigen::Index>(joint.project(x, sub))) += full(static_cast<Eigen::Index>(x));
  return out;
}

} // namespace ctbn
