#ifndef CTBN_SAMPLING_HPP
#define CTBN_SAMPLING_HPP

#include "ctbn/model.hpp"

#include <cstdint>
#include <vector>

namespace ctbn {

/// One transition: `variable` takes `value` at `time`.
struct Event {
  int variable;
  int value;
  double time;
};

/// A sampled trajectory: the full assignment at time zero plus the ordered
/// transition list, times strictly increasing.
struct EventSequence {
  std::vector<int> initial;
  std::vector<Event> events;
};

/// Forward-samples one trajectory up to t_end. Each variable keeps at most
/// one pending candidate transition; committing an event on X invalidates
/// the candidates of X and of every variable with X among its parents.
/// Deterministic given (seed, stream); distinct streams give independent
/// trajectories under one seed.
EventSequence sample_trajectory(const Ctbn& model, double t_end, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// The full assignment after applying every event with time <= t.
std::vector<int> state_at(const EventSequence& traj, double t);

/// Normalized histogram of the trajectories' states at time t, projected
/// onto the named variables (in the given order).
RowVector empirical_distribution(const Ctbn& model, const std::vector<EventSequence>& trajs,
                                 double t, const std::vector<std::string>& vars);

} // namespace ctbn

#endif
