#pragma once

#include <vector>

namespace fsup::fuzzy {

struct Knot {
  double x;
  double y;
};

/// Piecewise-linear membership on [0,1]: zero outside [left, right], one on
/// the peak plateau [peak_lo, peak_hi]. A triangle has peak_lo == peak_hi; a
/// shoulder has left == peak_lo or peak_hi == right.
class MembershipFunction {
 public:
  static MembershipFunction triangle(double left, double peak, double right);
  static MembershipFunction trapezoid(double left, double peak_lo, double peak_hi, double right);

  /// Throws DomainError when x is outside [0,1] or not finite.
  double degree(double x) const;
  double operator()(double x) const { return degree(x); }

  double left() const { return left_; }
  double peak_lo() const { return peak_lo_; }
  double peak_hi() const { return peak_hi_; }
  double right() const { return right_; }
  double center() const { return 0.5 * (peak_lo_ + peak_hi_); }
  bool is_triangle() const { return peak_lo_ == peak_hi_; }

  /// Interval where degree >= height (0 < height <= 1), clamped to [0,1].
  struct Interval {
    double lo;
    double hi;
  };
  Interval alpha_cut(double height) const;

  /// Breakpoints of the function over [0,1], ascending, including both domain ends.
  std::vector<Knot> knots() const;

  bool operator==(const MembershipFunction&) const = default;

 private:
  MembershipFunction(double left, double peak_lo, double peak_hi, double right);

  double left_;
  double peak_lo_;
  double peak_hi_;
  double right_;
};

}  // namespace fsup::fuzzy
