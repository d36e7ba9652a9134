#include <doctest.h>

#include <ctbn/exact.hpp>
#include <ctbn/io.hpp>
#include <ctbn/sampling.hpp>

#include "test_util.hpp"

#include <cmath>

using namespace ctbn;
using namespace ctbn::testutil;

TEST_CASE("trajectories are deterministic in (seed, stream)") {
  Ctbn wz = parse_network(data_path("wz.ctbn"));
  auto a = sample_trajectory(wz, 5.0, 99, 0);
  auto b = sample_trajectory(wz, 5.0, 99, 0);
  REQUIRE(a.events.size() == b.events.size());
  CHECK(a.initial == b.initial);
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].variable == b.events[i].variable);
    CHECK(a.events[i].value == b.events[i].value);
    CHECK(a.events[i].time == b.events[i].time);
  }
  auto c = sample_trajectory(wz, 5.0, 99, 1);
  bool differs = (a.initial != c.initial) || (a.events.size() != c.events.size());
  for (std::size_t i = 0; !differs && i < a.events.size(); ++i)
    differs = a.events[i].time != c.events[i].time;
  CHECK(differs);
}

TEST_CASE("event times are strictly increasing and in range") {
  Ctbn wz = parse_network(data_path("wz.ctbn"));
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto traj = sample_trajectory(wz, 3.0, 4711, s);
    double prev = 0.0;
    for (const auto& e : traj.events) {
      CHECK(e.time > prev);
      CHECK(e.time <= 3.0);
      prev = e.time;
    }
  }
}

TEST_CASE("every event changes the value of its variable") {
  Ctbn chain = parse_network(data_path("chain3.ctbn"));
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto traj = sample_trajectory(chain, 4.0, 11, s);
    auto state = traj.initial;
    for (const auto& e : traj.events) {
      CHECK(state[static_cast<std::size_t>(e.variable)] != e.value);
      state[static_cast<std::size_t>(e.variable)] = e.value;
    }
  }
}

TEST_CASE("state_at replays the event sequence") {
  EventSequence traj;
  traj.initial = {0, 1};
  traj.events = {{0, 1, 0.5}, {1, 0, 1.25}, {0, 0, 2.0}};
  CHECK(state_at(traj, 0.0) == std::vector<int>{0, 1});
  CHECK(state_at(traj, 0.5) == std::vector<int>{1, 1});
  CHECK(state_at(traj, 1.3) == std::vector<int>{1, 0});
  CHECK(state_at(traj, 10.0) == std::vector<int>{0, 0});
}

TEST_CASE("single-variable sampler matches the exponential holding law") {
  // one two-state variable with rates 2 and 3: holding in x1 ~ Exp(2)
  Ctbn m = parse_network_string(R"({
    "format": "ctbn/1",
    "variables": [{"name": "X", "values": ["x1", "x2"]}],
    "dynamics": [{"variable": "X", "parents": [], "cim": [[[-2, 2], [3, -3]]]}],
    "initial": [{"variable": "X", "parents": [], "cpt": [[1.0, 0.0]]}]
  })");
  const int n = 20000;
  double sum = 0;
  int count = 0;
  for (int s = 0; s < n; ++s) {
    auto traj = sample_trajectory(m, 50.0, 2024, static_cast<std::uint64_t>(s));
    if (!traj.events.empty()) {
      sum += traj.events[0].time;
      ++count;
    }
  }
  REQUIRE(count > n - 5);
  CHECK(sum / count == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("empirical distribution tracks exact propagation at desk scale") {
  Ctbn wz = parse_network(data_path("wz.ctbn"));
  std::vector<EventSequence> trajs;
  const int n = 20000;
  trajs.reserve(n);
  for (int s = 0; s < n; ++s)
    trajs.push_back(sample_trajectory(wz, 1.0, 31337, static_cast<std::uint64_t>(s)));
  IntensityMatrix q = joint_intensity(wz);
  RowVector p0 = initial_joint(wz);
  for (double t : {0.25, 1.0}) {
    RowVector exact = transient_distribution(p0, q, t);
    RowVector emp = empirical_distribution(wz, trajs, t, {"Z", "W"});
    CHECK(total_variation(exact, emp) < 0.02);
  }
}

TEST_CASE("initial states follow the initial network") {
  Ctbn yz = parse_network(data_path("yz.ctbn"));
  std::vector<EventSequence> trajs;
  const int n = 20000;
  for (int s = 0; s < n; ++s)
    trajs.push_back(sample_trajectory(yz, 0.001, 8, static_cast<std::uint64_t>(s)));
  RowVector emp = empirical_distribution(yz, trajs, 0.0, {"Z", "Y"});
  RowVector want = initial_joint(yz);
  CHECK(total_variation(emp, want) < 0.02);
}
