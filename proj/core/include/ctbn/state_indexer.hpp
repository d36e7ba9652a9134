#ifndef CTBN_STATE_INDEXER_HPP
#define CTBN_STATE_INDEXER_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace ctbn {

/// A named finite-domain variable.
struct VariableSpec {
  std::string name;
  std::vector<std::string> values;

  std::size_t cardinality() const { return values.size(); }
  int value_index(const std::string& value) const; // -1 when absent
};

bool operator==(const VariableSpec& a, const VariableSpec& b);

/// Bijection between joint assignments over an ordered variable list and
/// flat indices 0..prod(|Val(X_i)|)-1. The first variable in the list is
/// the most significant digit of the mixed-radix index.
class StateIndexer {
public:
  StateIndexer() = default;
  explicit StateIndexer(std::vector<VariableSpec> vars);

  const std::vector<VariableSpec>& variables() const { return vars_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t size() const { return size_; }

  int variable_position(const std::string& name) const; // -1 when absent
  bool contains(const std::string& name) const { return variable_position(name) >= 0; }

  /// Flat index of an assignment given as one value index per variable,
  /// in this indexer's variable order.
  std::size_t index_of(const std::vector<int>& assignment) const;
  std::vector<int> assignment_of(std::size_t index) const;

  /// Value taken by one variable (by position) within a joint index.
  int digit(std::size_t index, std::size_t var_pos) const;

  /// Joint index with one digit replaced.
  std::size_t with_digit(std::size_t index, std::size_t var_pos, int value) const;

  /// Maps joint indices of this space onto `sub`'s space; every variable of
  /// `sub` must be a variable of this indexer.
  std::size_t project(std::size_t index, const StateIndexer& sub) const;

  /// Human-readable "(z1, w2)" style label for a joint index.
  std::string label(std::size_t index) const;

private:
  std::vector<VariableSpec> vars_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

bool operator==(const StateIndexer& a, const StateIndexer& b);

/// Union of two variable lists, first-argument variables first, duplicates
/// (matched by name, domains must agree) dropped.
std::vector<VariableSpec> merge_variables(const std::vector<VariableSpec>& a,
                                          const std::vector<VariableSpec>& b);

} // namespace ctbn

#endif
