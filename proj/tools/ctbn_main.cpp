// Command-line front end: queries, first-passage tables, trajectory
// sampling, and the exact-vs-approximate KL experiment runner.

#include <CLI11.hpp>

#include "ctbn/cliquetree.hpp"
#include "ctbn/errors.hpp"
#include "ctbn/exact.hpp"
#include "ctbn/io.hpp"
#include "ctbn/sampling.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using namespace ctbn;

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> points() const {
    std::vector<double> out;
    for (double t = start; t <= stop + 1e-9; t += step) out.push_back(t);
    return out;
  }
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' ||
      g.step <= 0.0 || g.stop < g.start)
    throw ValidationError("bad grid '" + text + "', expected start:stop:step");
  return g;
}

struct RowWriter {
  bool as_json = false;

  void emit(std::initializer_list<std::pair<const char*, std::string>> fields) const {
    bool first = true;
    for (const auto& [key, value] : fields) {
      if (as_json) {
        std::cout << (first ? "{" : ",") << "\"" << key << "\":" << value;
      } else {
        if (!first) std::cout << ",";
        std::cout << value;
      }
      first = false;
    }
    std::cout << (as_json ? "}\n" : "\n");
  }

  static std::string num(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
  }
  static std::string quoted(const std::string& s) { return "\"" + s + "\""; }
  std::string text(const std::string& s) const { return as_json ? quoted(s) : s; }
};

struct EngineFlags {
  std::string engine = "exact";
  std::string method;
  double tstar = -1.0;
  double recalc = -1.0;
  std::size_t cap = kDefaultStateCap;
  bool uniform_fallback = false;
};

ApproxConfig make_config(const EngineFlags& flags, const Scenario& scenario) {
  ApproxConfig cfg;
  cfg.method = parse_method(flags.method.empty() ? scenario.method : flags.method);
  cfg.tstar = flags.tstar >= 0.0 ? flags.tstar : scenario.tstar;
  cfg.recalc = flags.recalc >= 0.0 ? flags.recalc : scenario.recalc;
  cfg.cap = flags.cap;
  cfg.uniform_fallback = flags.uniform_fallback;
  return cfg;
}

int cmd_query(const std::string& network_path, const std::string& scenario_path,
              const EngineFlags& flags, const RowWriter& rows) {
  Ctbn model = parse_network(network_path);
  Scenario scenario = parse_scenario(scenario_path, model);
  model = apply_initial_overrides(model, scenario.initial_overrides);
  Evidence ev(model, scenario.evidence);

  for (const auto& query : scenario.queries) {
    std::vector<std::pair<std::string, RowVector>> marginals;
    if (flags.engine == "exact") {
      RowVector joint = posterior_at(model, ev, query.time, flags.cap);
      for (const auto& var : query.variables)
        marginals.push_back({var, marginalize(joint, model.joint_indexer(), {var})});
    } else if (flags.engine == "approx") {
      ApproxConfig cfg = make_config(flags, scenario);
      CliqueTree tree = build_clique_tree(model, flags.cap);
      calibrate_dynamics(tree, cfg);
      run_sequence(tree, ev, query.time, cfg);
      for (const auto& var : query.variables)
        marginals.push_back({var, clique_marginal(tree, {var})});
    } else {
      throw ValidationError("unknown engine '" + flags.engine + "', expected exact or approx");
    }

    for (const auto& [var, marginal] : marginals) {
      const auto& spec = model.variables[static_cast<std::size_t>(model.variable_index(var))];
      for (Eigen::Index v = 0; v < marginal.size(); ++v)
        rows.emit({{"t", RowWriter::num(query.time)},
                   {"variable", rows.text(var)},
                   {"value", rows.text(spec.values[static_cast<std::size_t>(v)])},
                   {"probability", RowWriter::num(marginal(v))}});
    }
  }
  return 0;
}

int cmd_firstpassage(const std::string& network_path, const std::string& scenario_path,
                     const std::string& variable, const std::string& value,
                     const std::string& grid_text, std::size_t cap, const RowWriter& rows) {
  Ctbn model = parse_network(network_path);
  if (!scenario_path.empty()) {
    Scenario scenario = parse_scenario(scenario_path, model);
    model = apply_initial_overrides(model, scenario.initial_overrides);
  }
  RowVector p0 = initial_joint(model, cap);
  GridSpec grid = parse_grid(grid_text);
  for (double t : grid.points())
    rows.emit({{"t", RowWriter::num(t)},
               {"cdf", RowWriter::num(first_passage_cdf(model, variable, value, p0, t, cap))}});
  rows.emit({{"t", rows.text("mean")},
             {"cdf", RowWriter::num(expected_first_passage(model, variable, value, p0, cap))}});
  return 0;
}

int cmd_sample(const std::string& network_path, const std::string& scenario_path, double t_end,
               std::uint64_t count, std::uint64_t seed) {
  Ctbn model = parse_network(network_path);
  if (!scenario_path.empty()) {
    Scenario scenario = parse_scenario(scenario_path, model);
    model = apply_initial_overrides(model, scenario.initial_overrides);
  }
  std::cout << "# trajectories: " << count << " seed: " << seed << "\n";
  for (std::uint64_t k = 0; k < count; ++k) {
    std::cout << "# trajectory " << k << "\n";
    write_trajectory_csv(std::cout, model, sample_trajectory(model, t_end, seed, k));
  }
  return 0;
}

// conditions a joint distribution on a single observation, avoiding a full
// filter restart per grid point
RowVector condition_joint(const Ctbn& model, const RowVector& dist, const Observation& o) {
  StateIndexer joint = model.joint_indexer();
  int v = model.variable_index(o.variable);
  int val = model.variables[static_cast<std::size_t>(v)].value_index(o.value);
  RowVector out = dist;
  for (std::size_t x = 0; x < joint.size(); ++x)
    if (joint.digit(x, static_cast<std::size_t>(v)) != val) out(static_cast<Eigen::Index>(x)) = 0.0;
  double s = out.sum();
  if (s <= 0.0)
    throw NumericError("evidence has zero probability: " + o.variable + "=" + o.value);
  return out / s;
}

int cmd_experiment(const std::string& network_path, const std::string& scenario_path,
                   const std::string& grid_text, const std::vector<std::string>& methods,
                   const std::vector<double>& recalc_list, double tstar, std::size_t cap,
                   bool uniform_fallback, const RowWriter& rows) {
  Ctbn model = parse_network(network_path);
  Scenario scenario = scenario_path.empty() ? Scenario{} : parse_scenario(scenario_path, model);
  model = apply_initial_overrides(model, scenario.initial_overrides);

  GridSpec grid = parse_grid(grid_text.empty() ? scenario.grid : grid_text);
  auto points = grid.points();

  IntensityMatrix joint_q = joint_intensity(model, cap);
  std::vector<Observation> forward_obs;
  for (const auto& o : scenario.evidence)
    if (o.time <= grid.stop) forward_obs.push_back(o);
  Evidence ev(model, forward_obs);

  for (const auto& method_name : methods) {
    for (double recalc : recalc_list) {
      ApproxConfig cfg;
      cfg.method = parse_method(method_name);
      cfg.tstar = tstar;
      cfg.recalc = recalc;
      cfg.cap = cap;
      cfg.uniform_fallback = uniform_fallback;

      CliqueTree tree = build_clique_tree(model, cap);
      calibrate_dynamics(tree, cfg);

      // exact reference advanced in lockstep with the tree
      RowVector exact = initial_joint(model, cap);
      double cur = 0.0;
      std::size_t next_obs = 0;
      double total_kl = 0.0;
      std::size_t finite_points = 0;

      auto advance_to = [&](double t) {
        while (next_obs < ev.observations().size() && ev.observations()[next_obs].time <= t) {
          const auto& o = ev.observations()[next_obs];
          if (o.time > cur) {
            exact = transient_distribution(exact, joint_q, o.time - cur);
            propagate(tree, o.time - cur, cfg);
            cur = o.time;
          }
          exact = condition_joint(model, exact, o);
          incorporate_evidence(tree, o.variable, o.value, cfg);
          ++next_obs;
        }
        if (t > cur) {
          exact = transient_distribution(exact, joint_q, t - cur);
          propagate(tree, t - cur, cfg);
          cur = t;
        }
      };

      for (double t : points) {
        advance_to(t);
        calibrate_distributions(tree, cfg.root);
        RowVector approx = approx_joint(tree, cap);
        double kl = kl_divergence(exact, approx);
        if (std::isfinite(kl)) {
          total_kl += kl;
          ++finite_points;
        }
        rows.emit({{"method", rows.text(method_name)},
                   {"recalc", RowWriter::num(recalc)},
                   {"t", RowWriter::num(t)},
                   {"kl", RowWriter::num(kl)}});
      }
      double avg = finite_points ? total_kl / static_cast<double>(finite_points)
                                 : std::numeric_limits<double>::infinity();
      rows.emit({{"method", rows.text(method_name)},
                 {"recalc", RowWriter::num(recalc)},
                 {"t", rows.text("average")},
                 {"kl", RowWriter::num(avg)}});
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous time Bayesian network toolkit"};
  app.require_subcommand(1);

  RowWriter rows;
  EngineFlags flags;
  std::string network_path, scenario_path;
  std::string variable, value, grid_text;
  double t_end = 1.0;
  std::uint64_t count = 1, seed = 0;
  std::vector<std::string> methods{"linear", "subsystem"};
  std::vector<double> recalc_list{0.0};
  double tstar = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", rows.as_json, "emit line-delimited JSON instead of CSV");
    sub->add_option("--cap", flags.cap, "joint state-space cap");
  };

  auto* query = app.add_subcommand("query", "evidence-conditioned marginals at query times");
  query->add_option("network", network_path)->required();
  query->add_option("scenario", scenario_path)->required();
  query->add_option("--engine", flags.engine, "exact or approx");
  query->add_option("--method", flags.method, "linear or subsystem");
  query->add_option("--tstar", flags.tstar, "reference-distribution offset");
  query->add_option("--recalc", flags.recalc, "recalculation interval (0 = never)");
  query->add_flag("--uniform-fallback", flags.uniform_fallback,
                  "fall back to uniform weights on zero-mass conditioning states");
  query->add_option("--seed", seed);
  add_common(query);

  auto* fp = app.add_subcommand("firstpassage", "first-passage-time CDF table");
  fp->add_option("network", network_path)->required();
  fp->add_option("--scenario", scenario_path, "scenario file for initial overrides");
  fp->add_option("--variable", variable)->required();
  fp->add_option("--value", value)->required();
  fp->add_option("--grid", grid_text, "start:stop:step")->default_val("0:50:0.5");
  add_common(fp);

  auto* sample = app.add_subcommand("sample", "forward-sample trajectories as CSV");
  sample->add_option("network", network_path)->required();
  sample->add_option("--scenario", scenario_path, "scenario file for initial overrides");
  sample->add_option("--t-end", t_end)->required();
  sample->add_option("--count", count);
  sample->add_option("--seed", seed);
  add_common(sample);

  auto* exp = app.add_subcommand("experiment", "exact-vs-approximate KL table over a time grid");
  exp->add_option("network", network_path)->required();
  exp->add_option("--scenario", scenario_path);
  exp->add_option("--grid", grid_text, "start:stop:step");
  exp->add_option("--methods", methods, "marginalization methods to compare")->delimiter(',');
  exp->add_option("--recalc-list", recalc_list, "recalculation intervals (0 = never)")
      ->delimiter(',');
  exp->add_option("--tstar", tstar);
  exp->add_flag("--uniform-fallback", flags.uniform_fallback);
  add_common(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (query->parsed()) return cmd_query(network_path, scenario_path, flags, rows);
    if (fp->parsed())
      return cmd_firstpassage(network_path, scenario_path, variable, value, grid_text, flags.cap,
                              rows);
    if (sample->parsed()) return cmd_sample(network_path, scenario_path, t_end, count, seed);
    if (exp->parsed())
      return cmd_experiment(network_path, scenario_path, grid_text, methods, recalc_list, tstar,
                            flags.cap, flags.uniform_fallback, rows);
  } catch (const ctbn::CapExceededError& e) {
    std::cerr << "error: cap: " << e.what() << "\n";
    return 3;
  } catch (const ctbn::ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  } catch (const ctbn::Error& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
