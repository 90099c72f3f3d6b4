#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsup/fuzzy/membership.hpp"

namespace fsup::fuzzy {

struct Label {
  std::string name;     // identifier used in rule files
  std::string display;  // wording shown to people
  MembershipFunction mf;
};

/// A named crisp domain [0,1] partitioned into labels ordered worst first
/// (for the output variable: least severe first).
class LinguisticVariable {
 public:
  /// Throws ConfigError on < 2 labels, duplicate names, or when the first
  /// label is not 1 at x=0 or the last label is not 1 at x=1.
  LinguisticVariable(std::string name, std::vector<Label> labels);

  /// Uniform triangular partition: peaks at i/(n-1), neighbours' peaks as feet.
  /// Each entry is (name, display).
  static LinguisticVariable uniform(std::string name, std::vector<std::pair<std::string, std::string>> labels);

  const std::string& name() const { return name_; }
  std::span<const Label> labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const Label& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> index_of(std::string_view label) const;
  double center(std::size_t i) const { return labels_.at(i).mf.center(); }

 private:
  std::string name_;
  std::vector<Label> labels_;
};

/// Per-label degrees aligned with var.labels(). Throws DomainError outside [0,1].
std::vector<double> fuzzify(const LinguisticVariable& var, double x);

/// True when the label degrees sum to 1 within `tolerance` at every grid point.
bool is_ruspini_partition(const LinguisticVariable& var, double step, double tolerance);

/// The four input criteria plus the output variable.
class VariableRegistry {
 public:
  /// Throws ConfigError on duplicate variable names.
  VariableRegistry(std::vector<LinguisticVariable> inputs, LinguisticVariable output);

  std::span<const LinguisticVariable> inputs() const { return inputs_; }
  const LinguisticVariable& output() const { return output_; }
  const LinguisticVariable* find(std::string_view name) const;
  bool is_output(std::string_view name) const { return name == output_.name(); }

 private:
  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_;
};

}  // namespace fsup::fuzzy
