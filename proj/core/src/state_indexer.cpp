#include "ctbn/state_indexer.hpp"
#include "ctbn/errors.hpp"

namespace ctbn {

int VariableSpec::value_index(const std::string& value) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == value) return static_cast<int>(i);
  return -1;
}

bool operator==(const VariableSpec& a, const VariableSpec& b) {
  return a.name == b.name && a.values == b.values;
}

StateIndexer::StateIndexer(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
  for (const auto& v : vars_) {
    if (v.values.empty())
      throw ValidationError("variable '" + v.name + "' has an empty domain");
  }
  strides_.assign(vars_.size(), 1);
  for (int i = static_cast<int>(vars_.size()) - 1; i >= 0; --i) {
    strides_[i] = size_;
    size_ *= vars_[i].cardinality();
  }
}

int StateIndexer::variable_position(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::size_t StateIndexer::index_of(const std::vector<int>& assignment) const {
  if (assignment.size() != vars_.size())
    throw ValidationError("assignment covers " + std::to_string(assignment.size()) +
                          " variables, indexer has " + std::to_string(vars_.size()));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= static_cast<int>(vars_[i].cardinality()))
      throw ValidationError("value index " + std::to_string(assignment[i]) +
                            " out of domain for variable '" + vars_[i].name + "'");
    idx += strides_[i] * static_cast<std::size_t>(assignment[i]);
  }
  return idx;
}

std::vector<int> StateIndexer::assignment_of(std::size_t index) const {
  std::vector<int> out(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    out[i] = static_cast<int>((index / strides_[i]) % vars_[i].cardinality());
  }
  return out;
}

int StateIndexer::digit(std::size_t index, std::size_t var_pos) const {
  return static_cast<int>((index / strides_[var_pos]) % vars_[var_pos].cardinality());
}

std::size_t StateIndexer::with_digit(std::size_t index, std::size_t var_pos, int value) const {
  int old = digit(index, var_pos);
  return index + strides_[var_pos] * (static_cast<std::size_t>(value) - static_cast<std::size_t>(old));
}

std::size_t StateIndexer::project(std::size_t index, const StateIndexer& sub) const {
  std::vector<int> assignment(sub.num_variables());
  for (std::size_t i = 0; i < sub.num_variables(); ++i) {
    int pos = variable_position(sub.variables()[i].name);
    if (pos < 0)
      throw ValidationError("projection target variable '" + sub.variables()[i].name +
                            "' not present in source space");
    assignment[i] = digit(index, static_cast<std::size_t>(pos));
  }
  return sub.index_of(assignment);
}

std::string StateIndexer::label(std::size_t index) const {
  std::string out = "(";
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) out += ", ";
    out += vars_[i].values[static_cast<std::size_t>(digit(index, i))];
  }
  return out + ")";
}

bool operator==(const StateIndexer& a, const StateIndexer& b) {
  return a.variables() == b.variables();
}

std::vector<VariableSpec> merge_variables(const std::vector<VariableSpec>& a,
                                          const std::vector<VariableSpec>& b) {
  std::vector<VariableSpec> out = a;
  for (const auto& v : b) {
    bool found = false;
    for (const auto& u : out) {
      if (u.name == v.name) {
        if (!(u == v))
          throw ValidationError("variable '" + v.name + "' declared with conflicting domains");
        found = true;
        break;
      }
    }
    if (!found) out.push_back(v);
  }
  return out;
}

} // namespace ctbn
