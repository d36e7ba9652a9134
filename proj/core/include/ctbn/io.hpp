#ifndef CTBN_IO_HPP
#define CTBN_IO_HPP

#include "ctbn/cliquetree.hpp"
#include "ctbn/model.hpp"
#include "ctbn/sampling.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ctbn {

/// Parses a "ctbn/1" JSON network file into a validated model.
Ctbn parse_network(const std::string& path);
Ctbn parse_network_string(const std::string& text);

/// Canonical serialization: fixed key order, matrices row-major, CIM
/// components in canonical parent-instantiation order with a readable
/// context label alongside. Semantically equal models serialize identically.
std::string serialize_network(const Ctbn& model);

struct ScenarioQuery {
  double time;
  std::vector<std::string> variables;
};

struct Scenario {
  std::vector<std::pair<std::string, std::string>> initial_overrides;
  std::vector<Observation> evidence;
  std::vector<ScenarioQuery> queries;

  std::string method = "subsystem"; // or "linear"
  double tstar = 0.0;
  double recalc = 0.0;
  std::string grid; // "start:stop:step", optional
};

Scenario parse_scenario(const std::string& path, const Ctbn& model);
Scenario parse_scenario_string(const std::string& text, const Ctbn& model);

/// Model with the initial network overridden to a point mass on the given
/// assignments (those variables lose their initial-network parents).
Ctbn apply_initial_overrides(const Ctbn& model,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

/// CSV export: a header naming the initial assignment, a column header, then
/// one `time,variable,new_value` row per event.
void write_trajectory_csv(std::ostream& out, const Ctbn& model, const EventSequence& traj);

MargMethod parse_method(const std::string& name);

} // namespace ctbn

#endif
