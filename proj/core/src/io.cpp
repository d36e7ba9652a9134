#include "ctbn/io.hpp"
#include "ctbn/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace ctbn {

using json = nlohmann::ordered_json;

namespace {

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Matrix parse_matrix(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw ValidationError(where + ": expected " + std::to_string(n) + " matrix rows");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != n)
      throw ValidationError(where + ": row " + std::to_string(r) + " has wrong width");
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Ctbn parse_network_json(const json& j) {
  if (!j.contains("format") || j["format"].get<std::string>() != "ctbn/1")
    throw ValidationError("unknown or missing format tag, expected \"ctbn/1\"");

  Ctbn model;
  for (const auto& v : j.at("variables")) {
    VariableSpec spec;
    spec.name = v.at("name").get<std::string>();
    for (const auto& val : v.at("values")) spec.values.push_back(val.get<std::string>());
    if (model.variable_index(spec.name) >= 0)
      throw ValidationError("duplicate variable '" + spec.name + "'");
    model.variables.push_back(std::move(spec));
  }
  const std::size_t n = model.variables.size();
  model.parents.assign(n, {});
  model.cims.resize(n);
  model.initial.parents.assign(n, {});
  model.initial.cpts.resize(n);

  auto resolve_parents = [&](const json& names, const std::string& where) {
    std::vector<int> out;
    for (const auto& name : names) {
      int p = model.variable_index(name.get<std::string>());
      if (p < 0)
        throw ValidationError(where + ": unknown parent '" + name.get<std::string>() + "'");
      out.push_back(p);
    }
    return out;
  };

  if (j.at("dynamics").size() != n)
    throw ValidationError("dynamics section must name every variable exactly once");
  for (const auto& d : j.at("dynamics")) {
    const std::string name = d.at("variable").get<std::string>();
    int v = model.variable_index(name);
    if (v < 0) throw ValidationError("dynamics for unknown variable '" + name + "'");
    auto parents = resolve_parents(d.at("parents"), "dynamics of '" + name + "'");
    model.parents[static_cast<std::size_t>(v)] = parents;

    std::vector<VariableSpec> pvars;
    for (int p : parents) pvars.push_back(model.variables[static_cast<std::size_t>(p)]);
    StateIndexer conditions{pvars};
    StateIndexer subject{{model.variables[static_cast<std::size_t>(v)]}};

    const auto& mats = d.at("cim");
    if (mats.size() != conditions.size())
      throw ValidationError("dynamics of '" + name + "': expected " +
                            std::to_string(conditions.size()) + " matrices, got " +
                            std::to_string(mats.size()));
    std::vector<Matrix> components;
    for (std::size_t k = 0; k < mats.size(); ++k)
      components.push_back(parse_matrix(mats[k], subject.size(),
                                        "dynamics of '" + name + "', context " +
                                            std::to_string(k)));
    try {
      model.cims[static_cast<std::size_t>(v)] = make_cim(subject, conditions, components);
    } catch (const ValidationError& e) {
      throw ValidationError("dynamics of '" + name + "': " + e.what());
    }
  }

  if (j.at("initial").size() != n)
    throw ValidationError("initial section must name every variable exactly once");
  for (const auto& b : j.at("initial")) {
    const std::string name = b.at("variable").get<std::string>();
    int v = model.variable_index(name);
    if (v < 0) throw ValidationError("initial distribution for unknown variable '" + name + "'");
    model.initial.parents[static_cast<std::size_t>(v)] =
        resolve_parents(b.at("parents"), "initial of '" + name + "'");
    const std::size_t width = model.variables[static_cast<std::size_t>(v)].cardinality();
    for (const auto& row : b.at("cpt")) {
      if (!row.is_array() || row.size() != width)
        throw ValidationError("initial of '" + name + "': CPT row has wrong width");
      RowVector r(static_cast<Eigen::Index>(width));
      for (std::size_t c = 0; c < width; ++c) r(static_cast<Eigen::Index>(c)) = row[c].get<double>();
      model.initial.cpts[static_cast<std::size_t>(v)].push_back(std::move(r));
    }
  }

  validate_network(model);
  return model;
}

} // namespace

Ctbn parse_network(const std::string& path) { return parse_network_json(load_file(path)); }

Ctbn parse_network_string(const std::string& text) {
  try {
    return parse_network_json(json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(e.what());
  }
}

std::string serialize_network(const Ctbn& model) {
  json j;
  j["format"] = "ctbn/1";
  j["variables"] = json::array();
  for (const auto& v : model.variables)
    j["variables"].push_back({{"name", v.name}, {"values", v.values}});

  j["dynamics"] = json::array();
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    json d;
    d["variable"] = model.variables[i].name;
    json parents = json::array();
    for (int p : model.parents[i]) parents.push_back(model.variables[static_cast<std::size_t>(p)].name);
    d["parents"] = parents;
    json contexts = json::array();
    const auto& cond = model.cims[i].conditions;
    for (std::size_t k = 0; k < cond.size(); ++k) contexts.push_back(cond.label(k));
    d["contexts"] = contexts;
    json mats = json::array();
    for (const auto& m : model.cims[i].components) mats.push_back(matrix_to_json(m));
    d["cim"] = mats;
    j["dynamics"].push_back(std::move(d));
  }

  j["initial"] = json::array();
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    json b;
    b["variable"] = model.variables[i].name;
    json parents = json::array();
    for (int p : model.initial.parents[i])
      parents.push_back(model.variables[static_cast<std::size_t>(p)].name);
    b["parents"] = parents;
    json cpt = json::array();
    for (const auto& row : model.initial.cpts[i]) {
      json r = json::array();
      for (Eigen::Index c = 0; c < row.size(); ++c) r.push_back(row(c));
      cpt.push_back(std::move(r));
    }
    b["cpt"] = cpt;
    j["initial"].push_back(std::move(b));
  }
  return j.dump(2) + "\n";
}

namespace {

Scenario parse_scenario_json(const json& j, const Ctbn& model) {
  Scenario s;
  if (j.contains("initial")) {
    for (const auto& [name, value] : j["initial"].items()) {
      int v = model.variable_index(name);
      if (v < 0) throw ValidationError("scenario initial override on unknown variable '" + name + "'");
      if (model.variables[static_cast<std::size_t>(v)].value_index(value.get<std::string>()) < 0)
        throw ValidationError("scenario initial override value '" + value.get<std::string>() +
                              "' not in the domain of '" + name + "'");
      s.initial_overrides.push_back({name, value.get<std::string>()});
    }
  }
  if (j.contains("evidence")) {
    for (const auto& e : j["evidence"])
      s.evidence.push_back({e.at("time").get<double>(), e.at("variable").get<std::string>(),
                            e.at("value").get<std::string>()});
    Evidence check(model, s.evidence); // validates names, domains, ordering
    (void)check;
  }
  if (j.contains("queries")) {
    for (const auto& q : j["queries"]) {
      ScenarioQuery query;
      query.time = q.at("time").get<double>();
      for (const auto& v : q.at("variables")) {
        if (model.variable_index(v.get<std::string>()) < 0)
          throw ValidationError("scenario query on unknown variable '" + v.get<std::string>() + "'");
        query.variables.push_back(v.get<std::string>());
      }
      s.queries.push_back(std::move(query));
    }
  }
  if (j.contains("config")) {
    const auto& c = j["config"];
    if (c.contains("method")) s.method = c["method"].get<std::string>();
    if (c.contains("tstar")) s.tstar = c["tstar"].get<double>();
    if (c.contains("recalc")) s.recalc = c["recalc"].get<double>();
    if (c.contains("grid")) s.grid = c["grid"].get<std::string>();
    parse_method(s.method); // reject unknown names early
  }
  return s;
}

} // namespace

Scenario parse_scenario(const std::string& path, const Ctbn& model) {
  return parse_scenario_json(load_file(path), model);
}

Scenario parse_scenario_string(const std::string& text, const Ctbn& model) {
  try {
    return parse_scenario_json(json::parse(text), model);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(e.what());
  }
}

Ctbn apply_initial_overrides(const Ctbn& model,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  Ctbn out = model;
  for (const auto& [name, value] : overrides) {
    int v = out.variable_index(name);
    if (v < 0) throw ValidationError("initial override on unknown variable '" + name + "'");
    const auto& spec = out.variables[static_cast<std::size_t>(v)];
    int val = spec.value_index(value);
    if (val < 0)
      throw ValidationError("initial override value '" + value + "' not in the domain of '" +
                            name + "'");
    RowVector point = RowVector::Zero(static_cast<Eigen::Index>(spec.cardinality()));
    point(val) = 1.0;
    out.initial.parents[static_cast<std::size_t>(v)] = {};
    out.initial.cpts[static_cast<std::size_t>(v)] = {point};
  }
  validate_network(out);
  return out;
}

void write_trajectory_csv(std::ostream& out, const Ctbn& model, const EventSequence& traj) {
  out << "# initial:";
  for (std::size_t i = 0; i < model.variables.size(); ++i)
    out << (i ? ";" : " ") << model.variables[i].name << "="
        << model.variables[i].values[static_cast<std::size_t>(traj.initial[i])];
  out << "\ntime,variable,new_value\n";
  for (const auto& e : traj.events) {
    const auto& var = model.variables[static_cast<std::size_t>(e.variable)];
    out << e.time << "," << var.name << "," << var.values[static_cast<std::size_t>(e.value)]
        << "\n";
  }
}

MargMethod parse_method(const std::string& name) {
  if (name == "linear") return MargMethod::linear;
  if (name == "subsystem") return MargMethod::subsystem;
  throw ValidationError("unknown marginalization method '" + name +
                        "', expected 'linear' or 'subsystem'");
}

} // namespace ctbn
