#include <doctest.h>

#include <ctbn/errors.hpp>
#include <ctbn/io.hpp>

#include "test_util.hpp"

#include <sstream>

using namespace ctbn;
using namespace ctbn::testutil;

TEST_CASE("serialization round-trips canonically") {
  for (const char* name : {"barometer.ctbn", "wz.ctbn", "yz.ctbn", "chain3.ctbn", "drug.ctbn"}) {
    CAPTURE(name);
    Ctbn model = parse_network(data_path(name));
    std::string once = serialize_network(model);
    std::string twice = serialize_network(parse_network_string(once));
    CHECK(once == twice);
  }
}

TEST_CASE("parser rejects malformed inputs") {
  CHECK_THROWS_AS(parse_network(data_path("missing.ctbn")), ValidationError);
  CHECK_THROWS_AS(parse_network_string("not json"), ValidationError);
  CHECK_THROWS_AS(parse_network_string(R"({"format": "ctbn/2"})"), ValidationError);
  // wrong number of CIM components for the declared parents
  CHECK_THROWS_AS(parse_network_string(R"({
    "format": "ctbn/1",
    "variables": [{"name": "A", "values": ["a1", "a2"]},
                  {"name": "B", "values": ["b1", "b2"]}],
    "dynamics": [
      {"variable": "A", "parents": ["B"], "cim": [[[-1, 1], [1, -1]]]},
      {"variable": "B", "parents": [], "cim": [[[-1, 1], [1, -1]]]}
    ],
    "initial": [
      {"variable": "A", "parents": [], "cpt": [[0.5, 0.5]]},
      {"variable": "B", "parents": [], "cpt": [[0.5, 0.5]]}
    ]
  })"), ValidationError);
  // unknown parent name
  CHECK_THROWS_AS(parse_network_string(R"({
    "format": "ctbn/1",
    "variables": [{"name": "A", "values": ["a1", "a2"]}],
    "dynamics": [{"variable": "A", "parents": ["Ghost"], "cim": [[[-1, 1], [1, -1]]]}],
    "initial": [{"variable": "A", "parents": [], "cpt": [[0.5, 0.5]]}]
  })"), ValidationError);
  // CPT row not a distribution
  CHECK_THROWS_AS(parse_network_string(R"({
    "format": "ctbn/1",
    "variables": [{"name": "A", "values": ["a1", "a2"]}],
    "dynamics": [{"variable": "A", "parents": [], "cim": [[[-1, 1], [1, -1]]]}],
    "initial": [{"variable": "A", "parents": [], "cpt": [[0.9, 0.9]]}]
  })"), ValidationError);
}

TEST_CASE("scenario parsing and validation") {
  Ctbn drug = parse_network(data_path("drug.ctbn"));
  Scenario s = parse_scenario(data_path("drug_scenario.json"), drug);
  REQUIRE(s.evidence.size() == 2);
  CHECK(s.evidence[0].variable == "Hungry");
  CHECK(s.evidence[1].value == "drowsy");
  REQUIRE(s.queries.size() == 1);
  CHECK(s.queries[0].time == 6.0);
  CHECK(s.method == "subsystem");
  CHECK(s.recalc == 0.5);

  CHECK_THROWS_AS(parse_scenario_string(R"({"config": {"method": "magic"}})", drug),
                  ValidationError);
  CHECK_THROWS_AS(parse_scenario_string(
                      R"({"evidence": [{"time": 1, "variable": "Hungry", "value": "starving"}]})",
                      drug),
                  ValidationError);
  CHECK_THROWS_AS(parse_scenario_string(R"({"queries": [{"time": 1, "variables": ["Ghost"]}]})",
                                        drug),
                  ValidationError);
}

TEST_CASE("initial overrides install point masses") {
  Ctbn yz = parse_network(data_path("yz.ctbn"));
  Ctbn pinned = apply_initial_overrides(yz, {{"Y", "y2"}});
  RowVector ymarg = initial_marginal(pinned, {"Y"});
  CHECK(ymarg(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(apply_initial_overrides(yz, {{"Y", "bogus"}}), ValidationError);
  CHECK_THROWS_AS(apply_initial_overrides(yz, {{"Ghost", "y1"}}), ValidationError);
}

TEST_CASE("trajectory CSV layout") {
  Ctbn wz = parse_network(data_path("wz.ctbn"));
  EventSequence traj;
  traj.initial = {0, 1};
  traj.events = {{1, 0, 0.5}, {0, 1, 1.25}};
  std::ostringstream out;
  write_trajectory_csv(out, wz, traj);
  CHECK(out.str() == "# initial: Z=z1;W=w2\ntime,variable,new_value\n0.5,W,w1\n1.25,Z,z2\n");
}

TEST_CASE("method names parse strictly") {
  CHECK(parse_method("linear") == MargMethod::linear);
  CHECK(parse_method("subsystem") == MargMethod::subsystem);
  CHECK_THROWS_AS(parse_method("Linear"), ValidationError);
}
