#include "fsup/fuzzy/membership.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsup/error.hpp"

namespace fsup::fuzzy {

MembershipFunction::MembershipFunction(double left, double peak_lo, double peak_hi, double right)
    : left_(left), peak_lo_(peak_lo), peak_hi_(peak_hi), right_(right) {
  const bool finite = std::isfinite(left) && std::isfinite(peak_lo) && std::isfinite(peak_hi) && std::isfinite(right);
  if (!finite || !(left <= peak_lo && peak_lo <= peak_hi && peak_hi <= right)) {
    throw ConfigError("membership function parameters must satisfy left <= peak <= right");
  }
  if (left < 0.0 || right > 1.0) throw ConfigError("membership function parameters must lie in [0,1]");
}

MembershipFunction MembershipFunction::triangle(double left, double peak, double right) {
  return MembershipFunction(left, peak, peak, right);
}

MembershipFunction MembershipFunction::trapezoid(double left, double peak_lo, double peak_hi, double right) {
  return MembershipFunction(left, peak_lo, peak_hi, right);
}

double MembershipFunction::degree(double x) const {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    throw DomainError("crisp value " + std::to_string(x) + " outside [0,1]");
  }
  if (x >= peak_lo_ && x <= peak_hi_) return 1.0;
  if (x < peak_lo_) {
    if (x <= left_) return 0.0;
    return (x - left_) / (peak_lo_ - left_);
  }
  if (x >= right_) return 0.0;
  return (right_ - x) / (right_ - peak_hi_);
}

MembershipFunction::Interval MembershipFunction::alpha_cut(double height) const {
  const double h = std::clamp(height, 0.0, 1.0);
  const double lo = peak_lo_ == left_ ? left_ : left_ + h * (peak_lo_ - left_);
  const double hi = peak_hi_ == right_ ? right_ : right_ - h * (right_ - peak_hi_);
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

std::vector<Knot> MembershipFunction::knots() const {
  std::vector<double> xs{0.0, left_, peak_lo_, peak_hi_, right_, 1.0};
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Knot> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back({x, degree(x)});
  return out;
}

}  // namespace fsup::fuzzy
