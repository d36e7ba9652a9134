#ifndef CTBN_EXACT_HPP
#define CTBN_EXACT_HPP

#include "ctbn/model.hpp"

#include <string>
#include <vector>

namespace ctbn {

struct Observation {
  double time;
  std::string variable;
  std::string value;
};

/// An ordered evidence sequence: times nondecreasing, values in-domain,
/// simultaneous observations only on distinct variables.
class Evidence {
public:
  Evidence() = default;
  Evidence(const Ctbn& model, std::vector<Observation> observations);

  const std::vector<Observation>& observations() const { return obs_; }
  bool empty() const { return obs_.empty(); }
  double last_time() const { return obs_.empty() ? 0.0 : obs_.back().time; }

private:
  std::vector<Observation> obs_;
};

/// Forward filtering: propagate the initial joint through each observation,
/// conditioning as it is reached, then on to time t (t at or beyond the last
/// observation). Returns a distribution over the joint space.
RowVector filter(const Ctbn& model, const Evidence& ev, double t,
                 std::size_t cap = kDefaultStateCap);

/// P(X(t) | all evidence), with evidence allowed before, at, and after t.
/// Later evidence enters as a backward likelihood over X(t).
RowVector posterior_at(const Ctbn& model, const Evidence& ev, double t,
                       std::size_t cap = kDefaultStateCap);

/// Sum of a joint-space distribution over the eliminated variables.
RowVector marginalize(const RowVector& dist, const StateIndexer& joint,
                      const std::vector<std::string>& vars);

/// P(first time `variable` = `value` is <= t) starting from p0 over the joint
/// space; initial mass already at the value counts as passage at time zero.
double first_passage_cdf(const Ctbn& model, const std::string& variable,
                         const std::string& value, const RowVector& p0, double t,
                         std::size_t cap = kDefaultStateCap);

/// Mean of the first-passage distribution above.
double expected_first_passage(const Ctbn& model, const std::string& variable,
                              const std::string& value, const RowVector& p0,
                              std::size_t cap = kDefaultStateCap);

} // namespace ctbn

#endif
