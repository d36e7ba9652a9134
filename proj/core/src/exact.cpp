#include "ctbn/exact.hpp"
#include "ctbn/errors.hpp"

#include <cmath>

namespace ctbn {

namespace {

struct ResolvedObs {
  double time;
  std::size_t var_pos;
  int value;
  std::string text; // for error messages
};

std::vector<ResolvedObs> resolve(const Ctbn& model, const std::vector<Observation>& obs) {
  std::vector<ResolvedObs> out;
  for (const auto& o : obs) {
    int v = model.variable_index(o.variable);
    if (v < 0) throw ValidationError("evidence on unknown variable '" + o.variable + "'");
    int val = model.variables[static_cast<std::size_t>(v)].value_index(o.value);
    if (val < 0)
      throw ValidationError("evidence value '" + o.value + "' not in the domain of '" +
                            o.variable + "'");
    out.push_back({o.time, static_cast<std::size_t>(v), val,
                   o.variable + "=" + o.value + " at t=" + std::to_string(o.time)});
  }
  return out;
}

void condition_on(RowVector& p, const StateIndexer& joint, const ResolvedObs& o) {
  for (std::size_t x = 0; x < joint.size(); ++x)
    if (joint.digit(x, o.var_pos) != o.value) p(static_cast<Eigen::Index>(x)) = 0.0;
  double s = p.sum();
  if (s <= 0.0)
    throw NumericError("evidence has zero probability: " + o.text);
  p /= s;
}

} // namespace

Evidence::Evidence(const Ctbn& model, std::vector<Observation> observations)
    : obs_(std::move(observations)) {
  auto resolved = resolve(model, obs_);
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    if (resolved[i].time < 0.0)
      throw ValidationError("evidence time is negative: " + resolved[i].text);
    if (i > 0 && resolved[i].time < resolved[i - 1].time)
      throw ValidationError("evidence times are not nondecreasing at " + resolved[i].text);
    for (std::size_t j = 0; j < i; ++j) {
      if (resolved[j].time == resolved[i].time && resolved[j].var_pos == resolved[i].var_pos &&
          resolved[j].value != resolved[i].value)
        throw ValidationError("conflicting simultaneous observations on '" +
                              obs_[i].variable + "' at t=" + std::to_string(resolved[i].time));
    }
  }
}

RowVector filter(const Ctbn& model, const Evidence& ev, double t, std::size_t cap) {
  if (!ev.empty() && t < ev.last_time())
    throw ValidationError("filter: query time precedes the last observation");
  IntensityMatrix q = joint_intensity(model, cap);
  RowVector p = initial_joint(model, cap);
  auto resolved = resolve(model, ev.observations());

  double cur = 0.0;
  std::size_t i = 0;
  while (i < resolved.size()) {
    double tau = resolved[i].time;
    if (tau > cur) p = transient_distribution(p, q, tau - cur);
    while (i < resolved.size() && resolved[i].time == tau) condition_on(p, q.indexer, resolved[i++]);
    cur = tau;
  }
  if (t > cur) p = transient_distribution(p, q, t - cur);
  return p;
}

RowVector posterior_at(const Ctbn& model, const Evidence& ev, double t, std::size_t cap) {
  IntensityMatrix q = joint_intensity(model, cap);
  auto resolved = resolve(model, ev.observations());

  // forward: filter through evidence at or before t
  std::vector<Observation> before;
  std::vector<ResolvedObs> after;
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    if (resolved[i].time <= t)
      before.push_back(ev.observations()[i]);
    else
      after.push_back(resolved[i]);
  }
  RowVector p = filter(model, Evidence(model, before), t, cap);
  if (after.empty()) return p;

  // backward: likelihood of the strictly-later evidence given the state at t,
  // carried unnormalized until the final product
  Vector w;
  {
    std::size_t k = after.size();
    // initialize at the last time
    double tau = after[k - 1].time;
    w = Vector::Ones(static_cast<Eigen::Index>(q.size()));
    auto apply_indicator = [&](const ResolvedObs& o) {
      for (std::size_t x = 0; x < q.indexer.size(); ++x)
        if (q.indexer.digit(x, o.var_pos) != o.value) w(static_cast<Eigen::Index>(x)) = 0.0;
    };
    std::size_t i = k;
    while (i > 0 && after[i - 1].time == tau) apply_indicator(after[--i]);
    while (i > 0) {
      double next_tau = after[i - 1].time;
      w = matrix_exp(q.q, tau - next_tau) * w;
      tau = next_tau;
      while (i > 0 && after[i - 1].time == tau) apply_indicator(after[--i]);
    }
    w = matrix_exp(q.q, tau - t) * w;
  }

  RowVector post = p.cwiseProduct(w.transpose());
  double s = post.sum();
  if (s <= 0.0) throw NumericError("posterior_at: later evidence has zero probability");
  return post / s;
}

RowVector marginalize(const RowVector& dist, const StateIndexer& joint,
                      const std::vector<std::string>& vars) {
  if (vars.empty()) throw ValidationError("marginalize: empty variable subset");
  std::vector<VariableSpec> subvars;
  for (const auto& name : vars) {
    int p = joint.variable_position(name);
    if (p < 0) throw ValidationError("unknown variable '" + name + "'");
    subvars.push_back(joint.variables()[static_cast<std::size_t>(p)]);
  }
  StateIndexer sub(subvars);
  RowVector out = RowVector::Zero(static_cast<Eigen::Index>(sub.size()));
  for (std::size_t x = 0; x < joint.size(); ++x)
    out(static_cast<Eigen::Index>(joint.project(x, sub))) += dist(static_cast<Eigen::Index>(x));
  return out;
}

namespace {

struct PassageSetup {
  double inside_mass;
  bool all_inside;
  RowVector entrance;
  SubIntensityMatrix sub;
};

PassageSetup passage_setup(const Ctbn& model, const std::string& variable,
                           const std::string& value, const RowVector& p0, std::size_t cap) {
  IntensityMatrix q = joint_intensity(model, cap);
  if (p0.size() != static_cast<Eigen::Index>(q.size()))
    throw ValidationError("first passage: initial distribution has wrong dimension");
  int v = model.variable_index(variable);
  if (v < 0) throw ValidationError("unknown variable '" + variable + "'");
  int val = model.variables[static_cast<std::size_t>(v)].value_index(value);
  if (val < 0)
    throw ValidationError("value '" + value + "' not in the domain of '" + variable + "'");

  std::vector<std::size_t> outside;
  double inside = 0.0;
  for (std::size_t x = 0; x < q.indexer.size(); ++x) {
    if (q.indexer.digit(x, static_cast<std::size_t>(v)) == val)
      inside += p0(static_cast<Eigen::Index>(x));
    else
      outside.push_back(x);
  }
  PassageSetup out;
  out.inside_mass = inside;
  out.all_inside = inside >= 1.0 - 1e-12 || outside.empty();
  if (!out.all_inside) {
    RowVector entrance(static_cast<Eigen::Index>(outside.size()));
    for (std::size_t i = 0; i < outside.size(); ++i)
      entrance(static_cast<Eigen::Index>(i)) = p0(static_cast<Eigen::Index>(outside[i]));
    entrance /= entrance.sum();
    out.entrance = entrance;
    out.sub = extract_subsystem(q, outside);
  }
  return out;
}

} // namespace

double first_passage_cdf(const Ctbn& model, const std::string& variable,
                         const std::string& value, const RowVector& p0, double t,
                         std::size_t cap) {
  PassageSetup s = passage_setup(model, variable, value, p0, cap);
  if (s.all_inside) return 1.0;
  return s.inside_mass + (1.0 - s.inside_mass) * phase_cdf(s.entrance, s.sub, t);
}

double expected_first_passage(const Ctbn& model, const std::string& variable,
                              const std::string& value, const RowVector& p0,
                              std::size_t cap) {
  PassageSetup s = passage_setup(model, variable, value, p0, cap);
  if (s.all_inside) return 0.0;
  return (1.0 - s.inside_mass) * expected_holding_time(s.entrance, s.sub);
}

} // namespace ctbn
