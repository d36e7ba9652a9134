#include "ctbn/cim.hpp"
#include "ctbn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctbn {

namespace {

// Where a variable's value is read from during amalgamation lookups.
struct Source {
  bool from_subject; // else from the conditioning instantiation
  std::size_t pos;
};

std::vector<Source> locate(const std::vector<VariableSpec>& wanted,
                           const StateIndexer& subjects, const StateIndexer& conditions) {
  std::vector<Source> out;
  out.reserve(wanted.size());
  for (const auto& v : wanted) {
    int p = subjects.variable_position(v.name);
    if (p >= 0) {
      out.push_back({true, static_cast<std::size_t>(p)});
      continue;
    }
    p = conditions.variable_position(v.name);
    if (p < 0)
      throw ValidationError("variable '" + v.name + "' not found in amalgamated scope");
    out.push_back({false, static_cast<std::size_t>(p)});
  }
  return out;
}

std::size_t compose_index(const StateIndexer& target, const std::vector<Source>& sources,
                          const StateIndexer& subjects, std::size_t s_idx,
                          const StateIndexer& conditions, std::size_t c_idx) {
  std::vector<int> assignment(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    assignment[i] = sources[i].from_subject ? subjects.digit(s_idx, sources[i].pos)
                                            : conditions.digit(c_idx, sources[i].pos);
  }
  return target.index_of(assignment);
}

void repair_diagonal(Matrix& q) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }
}

} // namespace

Cim make_cim(StateIndexer subjects, StateIndexer conditions, std::vector<Matrix> components) {
  if (components.size() != conditions.size())
    throw ValidationError("CIM needs " + std::to_string(conditions.size()) +
                          " component matrices, got " + std::to_string(components.size()));
  for (const auto& m : components) validate_intensity(m, subjects);
  return Cim{std::move(subjects), std::move(conditions), std::move(components)};
}

Cim cim_from_intensity(const IntensityMatrix& q) {
  return Cim{q.indexer, StateIndexer{}, {q.q}};
}

Cim trivial_cim() {
  return Cim{StateIndexer{}, StateIndexer{}, {Matrix::Zero(1, 1)}};
}

IntensityMatrix condition_cim(const Cim& q, const std::vector<int>& condition_values) {
  std::size_t k = q.conditions.index_of(condition_values);
  return IntensityMatrix{q.subjects, q.components[k]};
}

Cim amalgamate(const Cim& a, const Cim& b) {
  for (const auto& v : b.subjects.variables())
    if (a.subjects.contains(v.name))
      throw ValidationError("amalgamate: variable '" + v.name +
                            "' is a subject of both factors");

  auto subject_vars = merge_variables(a.subjects.variables(), b.subjects.variables());
  StateIndexer subjects(subject_vars);

  // C = (C1 u C2) - S; merge_variables rejects conflicting domains.
  auto all_cond = merge_variables(a.conditions.variables(), b.conditions.variables());
  std::vector<VariableSpec> cond_vars;
  for (const auto& v : all_cond) {
    int p = subjects.variable_position(v.name);
    if (p >= 0) {
      if (!(subjects.variables()[static_cast<std::size_t>(p)] == v))
        throw ValidationError("variable '" + v.name +
                              "' has conflicting domains between subject and conditioning use");
    } else {
      cond_vars.push_back(v);
    }
  }
  StateIndexer conditions(cond_vars);

  const auto a_cond_src = locate(a.conditions.variables(), subjects, conditions);
  const auto b_cond_src = locate(b.conditions.variables(), subjects, conditions);
  const auto a_subj_src = locate(a.subjects.variables(), subjects, conditions);
  const auto b_subj_src = locate(b.subjects.variables(), subjects, conditions);

  const std::size_t n = subjects.size() ? subjects.size() : 1;
  std::vector<Matrix> components;
  components.reserve(conditions.size());

  for (std::size_t ck = 0; ck < conditions.size(); ++ck) {
    Matrix q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t si = 0; si < n; ++si) {
      // enumerate single-variable changes from si
      for (std::size_t p = 0; p < subjects.num_variables(); ++p) {
        const auto card = subjects.variables()[p].cardinality();
        const int cur = subjects.digit(si, p);
        const bool in_a = a.subjects.contains(subjects.variables()[p].name);
        const Cim& owner = in_a ? a : b;
        const auto& subj_src = in_a ? a_subj_src : b_subj_src;
        const auto& cond_src = in_a ? a_cond_src : b_cond_src;

        std::size_t ok = compose_index(owner.conditions, cond_src, subjects, si, conditions, ck);
        std::size_t row = compose_index(owner.subjects, subj_src, subjects, si, conditions, ck);
        for (int v = 0; v < static_cast<int>(card); ++v) {
          if (v == cur) continue;
          std::size_t sj = subjects.with_digit(si, p, v);
          std::size_t col = compose_index(owner.subjects, subj_src, subjects, sj, conditions, ck);
          q(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(sj)) =
              owner.components[ok](static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        }
      }
    }
    repair_diagonal(q);
    components.push_back(std::move(q));
  }
  return make_cim(std::move(subjects), std::move(conditions), std::move(components));
}

Cim reorder_subjects(const Cim& q, const std::vector<std::string>& order) {
  if (order.size() != q.subjects.num_variables())
    throw ValidationError("reorder_subjects: order names " + std::to_string(order.size()) +
                          " variables, CIM has " + std::to_string(q.subjects.num_variables()));
  std::vector<VariableSpec> vars;
  std::vector<std::size_t> perm; // position in the old ordering
  for (const auto& name : order) {
    int p = q.subjects.variable_position(name);
    if (p < 0) throw ValidationError("reorder_subjects: unknown variable '" + name + "'");
    perm.push_back(static_cast<std::size_t>(p));
    vars.push_back(q.subjects.variables()[static_cast<std::size_t>(p)]);
  }
  StateIndexer subjects(vars);

  std::vector<std::size_t> to_old(subjects.size());
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    std::vector<int> old_assignment(q.subjects.num_variables());
    for (std::size_t i = 0; i < perm.size(); ++i)
      old_assignment[perm[i]] = subjects.digit(s, i);
    to_old[s] = q.subjects.index_of(old_assignment);
  }

  std::vector<Matrix> components;
  components.reserve(q.components.size());
  for (const auto& m : q.components) {
    Matrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < subjects.size(); ++i)
      for (std::size_t j = 0; j < subjects.size(); ++j)
        r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            m(static_cast<Eigen::Index>(to_old[i]), static_cast<Eigen::Index>(to_old[j]));
    components.push_back(std::move(r));
  }
  return Cim{std::move(subjects), q.conditions, std::move(components)};
}

namespace {

struct SplitSpace {
  StateIndexer survivors; // S' = S - Y
  StateIndexer eliminated; // Y, in subject order
  std::vector<Source> full_src; // how to rebuild a full subject index
};

SplitSpace split_subjects(const StateIndexer& subjects, const std::vector<std::string>& eliminate) {
  for (const auto& name : eliminate)
    if (!subjects.contains(name))
      throw ValidationError("marginalize: '" + name + "' is not a subject variable");
  std::vector<VariableSpec> keep, drop;
  for (const auto& v : subjects.variables()) {
    if (std::find(eliminate.begin(), eliminate.end(), v.name) != eliminate.end())
      drop.push_back(v);
    else
      keep.push_back(v);
  }
  SplitSpace out{StateIndexer(keep), StateIndexer(drop), {}};
  out.full_src = locate(subjects.variables(), out.survivors, out.eliminated);
  return out;
}

// Conditional reference weights P(y | s') from a joint reference over Val(S).
RowVector entrance_weights(const RowVector& ref, const SplitSpace& sp,
                           const StateIndexer& subjects, std::size_t s_prime,
                           bool uniform_fallback) {
  const std::size_t ny = sp.eliminated.size();
  RowVector w(static_cast<Eigen::Index>(ny));
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    std::size_t full = compose_index(subjects, sp.full_src, sp.survivors, s_prime,
                                     sp.eliminated, y);
    double m = ref(static_cast<Eigen::Index>(full));
    if (m < 0.0) m = 0.0;
    w(static_cast<Eigen::Index>(y)) = m;
    total += m;
  }
  if (total <= 0.0) {
    if (!uniform_fallback)
      throw NumericError("marginalize: reference distribution assigns zero mass to state " +
                         sp.survivors.label(s_prime));
    w.setConstant(1.0 / static_cast<double>(ny));
    return w;
  }
  return w / total;
}

} // namespace

Cim marginalize_cim(const Cim& q, const std::vector<std::string>& eliminate,
                    const std::vector<RowVector>& reference, MargMethod method,
                    bool uniform_fallback) {
  if (eliminate.empty()) return q;
  SplitSpace sp = split_subjects(q.subjects, eliminate);

  // eliminating every subject leaves no dynamics to represent
  if (sp.survivors.num_variables() == 0) return trivial_cim();

  if (reference.size() != 1 && reference.size() != q.conditions.size())
    throw ValidationError("marginalize: need 1 or " + std::to_string(q.conditions.size()) +
                          " reference distributions, got " + std::to_string(reference.size()));

  const std::size_t ns = sp.survivors.size();
  const std::size_t ny = sp.eliminated.size();

  std::vector<Matrix> components;
  components.reserve(q.components.size());

  for (std::size_t ck = 0; ck < q.components.size(); ++ck) {
    const Matrix& full = q.components[ck];
    const RowVector& ref = reference.size() == 1 ? reference[0] : reference[ck];
    if (ref.size() != static_cast<Eigen::Index>(q.subjects.size()))
      throw ValidationError("marginalize: reference distribution has wrong dimension");

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ns));

    for (std::size_t s1 = 0; s1 < ns; ++s1) {
      RowVector w = entrance_weights(ref, sp, q.subjects, s1, uniform_fallback);

      if (method == MargMethod::linear) {
        for (std::size_t s2 = 0; s2 < ns; ++s2) {
          if (s2 == s1) continue;
          double sum = 0.0;
          for (std::size_t y = 0; y < ny; ++y) {
            std::size_t f1 = compose_index(q.subjects, sp.full_src, sp.survivors, s1,
                                           sp.eliminated, y);
            std::size_t f2 = compose_index(q.subjects, sp.full_src, sp.survivors, s2,
                                           sp.eliminated, y);
            sum += full(static_cast<Eigen::Index>(f1), static_cast<Eigen::Index>(f2)) *
                   w(static_cast<Eigen::Index>(y));
          }
          out(static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(s2)) = sum;
        }
      } else {
        // collapse the states consistent with s1 into one state
        std::vector<std::size_t> retained(ny);
        for (std::size_t y = 0; y < ny; ++y)
          retained[y] = compose_index(q.subjects, sp.full_src, sp.survivors, s1,
                                      sp.eliminated, y);
        IntensityMatrix qk{q.subjects, full};
        SubIntensityMatrix u = extract_subsystem(qk, retained);
        double hold;
        try {
          hold = expected_holding_time(w, u);
        } catch (const NumericError&) {
          throw NumericError("marginalize (subsystem): collapsed state " +
                             sp.survivors.label(s1) + " forms a closed subsystem");
        }
        double rate = 1.0 / hold;
        RowVector exit = exit_distribution(w, qk, retained);
        std::vector<std::size_t> comp = complement_states(q.subjects, retained);
        for (std::size_t j = 0; j < comp.size(); ++j) {
          std::size_t s2 = q.subjects.project(comp[j], sp.survivors);
          out(static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(s2)) +=
              rate * exit(static_cast<Eigen::Index>(j));
        }
      }
    }
    repair_diagonal(out);
    components.push_back(std::move(out));
  }
  return make_cim(sp.survivors, q.conditions, std::move(components));
}

} // namespace ctbn
