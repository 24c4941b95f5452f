#ifndef SUBLIN_PIECEWISE_LINEAR_HPP
#define SUBLIN_PIECEWISE_LINEAR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"

namespace sublin {

/// Continuous piecewise-linear function on the whole real line.
///
/// Stored as knots (x_i, y_i) with x strictly increasing, plus the slopes of
/// the two unbounded end pieces.  Interior slopes are derived from the knots,
/// so continuity holds by construction rather than by a tolerance check.
/// This is the test-function class used everywhere a bounded Lipschitz
/// function is called for; the Lipschitz constant is the largest |slope|.
class PiecewiseLinearFn {
 public:
  /// Knots must be strictly increasing in x and at least one is required.
  static PiecewiseLinearFn from_knots(double left_slope,
                                      std::vector<std::array<double, 2>> knots,
                                      double right_slope) {
    if (knots.empty()) throw structural_error("piecewise-linear: at least one knot required");
    PiecewiseLinearFn f;
    f.xs_.reserve(knots.size());
    f.ys_.reserve(knots.size());
    for (const auto& k : knots) {
      if (!std::isfinite(k[0]) || !std::isfinite(k[1]))
        throw structural_error("piecewise-linear: non-finite knot");
      if (!f.xs_.empty() && !(k[0] > f.xs_.back()))
        throw structural_error("piecewise-linear: knots must be strictly increasing");
      f.xs_.push_back(k[0]);
      f.ys_.push_back(k[1]);
    }
    if (!std::isfinite(left_slope) || !std::isfinite(right_slope))
      throw structural_error("piecewise-linear: non-finite end slope");
    f.slopes_.resize(knots.size() + 1);
    f.slopes_.front() = left_slope;
    f.slopes_.back() = right_slope;
    for (std::size_t i = 1; i < f.xs_.size(); ++i)
      f.slopes_[i] = (f.ys_[i] - f.ys_[i - 1]) / (f.xs_[i] - f.xs_[i - 1]);
    return f;
  }

  /// x -> a*x + b.
  static PiecewiseLinearFn affine(double a, double b) {
    return from_knots(a, {{0.0, b}}, a);
  }

  static PiecewiseLinearFn constant(double c) { return affine(0.0, c); }

  double operator()(double x) const {
    // Piece i covers (xs_[i-1], xs_[i]]; each bounded piece is anchored at
    // its right knot, the end pieces at the nearest knot.
    const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == xs_.size()) return ys_.back() + slopes_.back() * (x - xs_.back());
    return ys_[i] + slopes_[i] * (x - xs_[i]);
  }

  /// a*f + b as a new function (a < 0 flips monotonicity).
  PiecewiseLinearFn scaled(double a, double b) const {
    std::vector<std::array<double, 2>> knots(xs_.size());
    for (std::size_t i = 0; i < xs_.size(); ++i) knots[i] = {xs_[i], a * ys_[i] + b};
    auto g = from_knots(a * slopes_.front(), std::move(knots), a * slopes_.back());
    if (range_) g.range_ = a >= 0
                               ? std::pair{a * range_->first + b, a * range_->second + b}
                               : std::pair{a * range_->second + b, a * range_->first + b};
    return g;
  }

  double lipschitz() const {
    double m = 0.0;
    for (double s : slopes_) m = std::max(m, std::abs(s));
    return m;
  }

  bool is_nondecreasing() const {
    return std::all_of(slopes_.begin(), slopes_.end(), [](double s) { return s >= 0.0; });
  }

  bool is_nonincreasing() const {
    return std::all_of(slopes_.begin(), slopes_.end(), [](double s) { return s <= 0.0; });
  }

  /// Bounded iff both unbounded pieces are flat.
  bool is_bounded() const { return slopes_.front() == 0.0 && slopes_.back() == 0.0; }

  /// Extremes over the knots; global extremes when the function is bounded.
  double knot_min() const { return *std::min_element(ys_.begin(), ys_.end()); }
  double knot_max() const { return *std::max_element(ys_.begin(), ys_.end()); }

  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& knot_values() const { return ys_; }

  /// Slope of piece i, where piece 0 is (-inf, xs[0]] and piece size() is
  /// (xs[last], +inf).
  double segment_slope(std::size_t piece) const { return slopes_.at(piece); }

  double segment_intercept(std::size_t piece) const {
    const std::size_t anchor = piece == 0 ? 0 : piece - 1;
    return ys_[anchor] - slopes_.at(piece) * xs_[anchor];
  }

  std::size_t segment_count() const { return slopes_.size(); }

  /// Optional declared range bounds [lo, hi]; informative, not enforced.
  void declare_range(double lo, double hi) {
    if (!(lo <= hi)) throw structural_error("piecewise-linear: range bounds out of order");
    range_ = {lo, hi};
  }
  const std::optional<std::pair<double, double>>& declared_range() const { return range_; }

 private:
  PiecewiseLinearFn() = default;

  std::vector<double> xs_;      // knot abscissae, strictly increasing
  std::vector<double> ys_;      // knot values
  std::vector<double> slopes_;  // size knots+1: end piece, interior..., end piece
  std::optional<std::pair<double, double>> range_;
};

}  // namespace sublin

#endif
