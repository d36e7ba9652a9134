#ifndef CTBN_CIM_HPP
#define CTBN_CIM_HPP

#include "ctbn/markov.hpp"

#include <string>
#include <vector>

namespace ctbn {

/// A family of intensity matrices over subject variables S, one per
/// instantiation of the conditioning variables C. With C empty there is a
/// single component and the CIM is a plain intensity matrix.
struct Cim {
  StateIndexer subjects;
  StateIndexer conditions;
  std::vector<Matrix> components; // indexed by condition instantiation

  bool unconditional() const { return conditions.num_variables() == 0; }
};

/// Validates component shapes and intensity-matrix invariants.
Cim make_cim(StateIndexer subjects, StateIndexer conditions, std::vector<Matrix> components);

/// Wraps a plain intensity matrix as an unconditional CIM.
Cim cim_from_intensity(const IntensityMatrix& q);

/// CIM over no subject variables; identity element of amalgamation.
Cim trivial_cim();

/// Selects the component matrix for a full instantiation of C, given as one
/// value index per conditioning variable in the CIM's conditioning order.
IntensityMatrix condition_cim(const Cim& q, const std::vector<int>& condition_values);

/// Amalgamation: combines CIMs over disjoint subject sets S1, S2 into one
/// over S1 u S2 conditioned on (C1 u C2) - (S1 u S2). Intensities of
/// single-variable transitions are looked up in the owning factor;
/// simultaneous changes get intensity zero; diagonals restore zero row sums.
/// Result subject order: S1's variables then S2's.
Cim amalgamate(const Cim& a, const Cim& b);

/// Same CIM with subject variables permuted into the given order.
Cim reorder_subjects(const Cim& q, const std::vector<std::string>& order);

enum class MargMethod { linear, subsystem };

/// Approximate marginalization: eliminates the variables named in
/// `eliminate` from the subject set, guided by a reference distribution over
/// Val(S) (one shared vector, or one per conditioning instantiation).
///
/// linear: each surviving intensity is the reference-weighted average of the
/// intensities at fixed eliminated values.
///
/// subsystem: states sharing a surviving assignment collapse to one state
/// whose holding rate preserves the expected subsystem holding time and
/// whose outgoing intensities follow the exit distribution.
Cim marginalize_cim(const Cim& q, const std::vector<std::string>& eliminate,
                    const std::vector<RowVector>& reference, MargMethod method,
                    bool uniform_fallback = false);

} // namespace ctbn

#endif
