#include "fsup/fuzzy/variable.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fsup/error.hpp"

namespace fsup::fuzzy {

LinguisticVariable::LinguisticVariable(std::string name, std::vector<Label> labels)
    : name_(std::move(name)), labels_(std::move(labels)) {
  if (labels_.size() < 2) throw ConfigError("variable " + name_ + " needs at least two labels");
  std::set<std::string, std::less<>> seen;
  for (const auto& l : labels_) {
    if (l.name.empty()) throw ConfigError("variable " + name_ + " has an unnamed label");
    if (!seen.insert(l.name).second) throw ConfigError("variable " + name_ + " repeats label " + l.name);
  }
  if (labels_.front().mf.degree(0.0) != 1.0 || labels_.back().mf.degree(1.0) != 1.0) {
    throw ConfigError("variable " + name_ + ": worst label must peak at 0 and best label at 1");
  }
}

LinguisticVariable LinguisticVariable::uniform(std::string name,
                                               std::vector<std::pair<std::string, std::string>> labels) {
  const std::size_t n = labels.size();
  if (n < 2) throw ConfigError("variable " + name + " needs at least two labels");
  auto peak = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
  std::vector<Label> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = peak(i);
    const double l = i == 0 ? c : peak(i - 1);
    const double r = i + 1 == n ? c : peak(i + 1);
    out.push_back({std::move(labels[i].first), std::move(labels[i].second), MembershipFunction::triangle(l, c, r)});
  }
  return LinguisticVariable(std::move(name), std::move(out));
}

std::optional<std::size_t> LinguisticVariable::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].name == label) return i;
  }
  return std::nullopt;
}

std::vector<double> fuzzify(const LinguisticVariable& var, double x) {
  std::vector<double> degrees;
  degrees.reserve(var.size());
  for (const auto& l : var.labels()) degrees.push_back(l.mf.degree(x));
  return degrees;
}

bool is_ruspini_partition(const LinguisticVariable& var, double step, double tolerance) {
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long k = 0; k <= n; ++k) {
    const double x = std::min(1.0, static_cast<double>(k) * step);
    double sum = 0.0;
    for (double d : fuzzify(var, x)) sum += d;
    if (std::abs(sum - 1.0) > tolerance) return false;
  }
  return true;
}

VariableRegistry::VariableRegistry(std::vector<LinguisticVariable> inputs, LinguisticVariable output)
    : inputs_(std::move(inputs)), output_(std::move(output)) {
  std::set<std::string, std::less<>> names{output_.name()};
  for (const auto& v : inputs_) {
    if (!names.insert(v.name()).second) throw ConfigError("duplicate variable " + v.name());
  }
}

const LinguisticVariable* VariableRegistry::find(std::string_view name) const {
  if (output_.name() == name) return &output_;
  for (const auto& v : inputs_) {
    if (v.name() == name) return &v;
  }
  return nullptr;
}

}  // namespace fsup::fuzzy
