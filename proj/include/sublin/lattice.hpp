#ifndef SUBLIN_LATTICE_HPP
#define SUBLIN_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/measure_space.hpp"

namespace sublin {

/// Law of a sum of independent scaled marginals, carried on the integer
/// lattice {(lo_index + k) * delta}.  Each convolution step snaps the scaled
/// support points a_i * v to the nearest lattice point (round half to even)
/// and accumulates the worst actual snap displacement of that step, which is
/// at most delta/2 per step and exactly 0 when delta divides every product.
/// Tail queries are then bracketed by evaluating at threshold +- snap_bound.
class LatticeDistribution {
 public:
  static LatticeDistribution point_mass(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw domain_error("lattice: delta must be positive and finite");
    LatticeDistribution d;
    d.delta_ = delta;
    d.lo_index_ = 0;
    d.weights_ = {1.0};
    return d;
  }

  /// One convolution step with the law of coeff * value_map under `marginal`.
  void add_scaled(const Measure& marginal, const RandomVector& value_map, double coeff) {
    if (!(marginal.space() == value_map.space()))
      throw structural_error("lattice: marginal and value map live on different spaces");
    if (value_map.coords() != 1)
      throw structural_error("lattice: value map must be single-coordinate");
    if (!std::isfinite(coeff)) throw structural_error("lattice: non-finite coefficient");

    const std::int64_t atoms = marginal.space().atom_count;
    std::vector<std::int64_t> offset(static_cast<std::size_t>(atoms));
    double step_snap = 0.0;
    std::int64_t min_off = std::numeric_limits<std::int64_t>::max();
    std::int64_t max_off = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t k = 0; k < atoms; ++k) {
      const double s = coeff * value_map.value(k, 0);
      const double m = std::nearbyint(s / delta_);  // round half to even
      if (std::abs(m) > 9e15) throw size_limit_error("lattice: offset exceeds integer range");
      offset[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(m);
      step_snap = std::max(step_snap, std::abs(s - m * delta_));
      min_off = std::min(min_off, offset[static_cast<std::size_t>(k)]);
      max_off = std::max(max_off, offset[static_cast<std::size_t>(k)]);
    }

    const std::int64_t new_lo = lo_index_ + min_off;
    const std::int64_t new_size =
        static_cast<std::int64_t>(weights_.size()) + (max_off - min_off);
    if (new_size > (std::int64_t{1} << 26))
      throw size_limit_error("lattice: support too large; increase delta");
    std::vector<double> fresh(static_cast<std::size_t>(new_size), 0.0);
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      const double wj = weights_[j];
      if (wj == 0.0) continue;
      const std::int64_t base = lo_index_ + static_cast<std::int64_t>(j) - new_lo;
      for (std::int64_t k = 0; k < atoms; ++k)
        fresh[static_cast<std::size_t>(base + offset[static_cast<std::size_t>(k)])] +=
            wj * marginal.weight(k);
    }
    weights_ = std::move(fresh);
    lo_index_ = new_lo;
    snap_bound_ += step_snap;
    ++steps_;
  }

  double delta() const { return delta_; }
  double snap_bound() const { return snap_bound_; }
  std::int64_t steps() const { return steps_; }
  std::int64_t lo_index() const { return lo_index_; }
  std::size_t size() const { return weights_.size(); }
  double value_at(std::size_t pos) const {
    return (lo_index_ + static_cast<std::int64_t>(pos)) * delta_;
  }
  double weight_at(std::size_t pos) const { return weights_[pos]; }

  double total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  /// P(value > x), exact on the lattice.
  double prob_greater(double x) const {
    double s = 0.0;
    for (std::size_t pos = first_with(x, true); pos < weights_.size(); ++pos)
      s += weights_[pos];
    return s;
  }

  /// P(value < x), exact on the lattice.
  double prob_less(double x) const {
    double s = 0.0;
    const std::size_t end = first_with(x, false);  // first position with value >= x
    for (std::size_t pos = 0; pos < end; ++pos) s += weights_[pos];
    return s;
  }

 private:
  LatticeDistribution() = default;

  // First position whose value is > x (strict) or >= x; size() when none.
  // Values are increasing in position, so an arithmetic guess plus a local
  // fix-up (floating division can be off by an index) lands exactly.
  std::size_t first_with(double x, bool strict) const {
    const auto above = [&](std::size_t pos) {
      const double v = value_at(pos);
      return strict ? v > x : v >= x;
    };
    const std::int64_t n = static_cast<std::int64_t>(weights_.size());
    std::int64_t k = static_cast<std::int64_t>(std::floor(x / delta_)) - lo_index_;
    k = std::clamp<std::int64_t>(k, 0, n);
    while (k > 0 && above(static_cast<std::size_t>(k - 1))) --k;
    while (k < n && !above(static_cast<std::size_t>(k))) ++k;
    return static_cast<std::size_t>(k);
  }

  double delta_ = 1.0;
  std::int64_t lo_index_ = 0;
  std::vector<double> weights_;
  double snap_bound_ = 0.0;
  std::int64_t steps_ = 0;
};

/// Law of sum_i a[i] * X_i with X_i i.i.d. copies of (marginal, value_map).
inline LatticeDistribution weighted_sum_law(const Measure& marginal,
                                            const RandomVector& value_map,
                                            std::span<const double> a, double delta) {
  if (a.empty()) throw structural_error("lattice: at least one summand required");
  LatticeDistribution d = LatticeDistribution::point_mass(delta);
  for (double c : a) d.add_scaled(marginal, value_map, c);
  return d;
}

enum class TailSide { greater, less };

/// Two-sided enclosure of a tail probability or capacity.
struct TailBracket {
  double lo = 0.0;
  double hi = 0.0;
  double snap = 0.0;  // threshold displacement used for the enclosure

  double mid() const { return 0.5 * (lo + hi); }
};

/// Upper-capacity bracket of {sum_i a_i X_i side threshold} over a family of
/// marginals sharing one value map.  Under member j the coordinates are
/// i.i.d. with law (marginals[j], value_map); the capacity is the max over j.
inline TailBracket family_tail_capacity(const std::vector<Measure>& marginals,
                                        const RandomVector& value_map,
                                        std::span<const double> a, double threshold,
                                        TailSide side, double delta) {
  if (marginals.empty()) throw structural_error("lattice: at least one marginal required");
  TailBracket out;
  out.lo = 0.0;
  out.hi = 0.0;
  for (const auto& m : marginals) {
    const LatticeDistribution d = weighted_sum_law(m, value_map, a, delta);
    out.snap = d.snap_bound();
    double lo_j = 0.0, hi_j = 0.0;
    if (side == TailSide::greater) {
      lo_j = d.prob_greater(threshold + d.snap_bound());
      hi_j = d.prob_greater(threshold - d.snap_bound());
    } else {
      lo_j = d.prob_less(threshold - d.snap_bound());
      hi_j = d.prob_less(threshold + d.snap_bound());
    }
    out.lo = std::max(out.lo, std::clamp(lo_j, 0.0, 1.0));
    out.hi = std::max(out.hi, std::clamp(hi_j, 0.0, 1.0));
  }
  return out;
}

/// Largest grid spacing that represents every product a_i * v_k exactly,
/// found by floating-point Euclid (fmod is exact in IEEE arithmetic).
/// Returns nothing when the products are not commensurable in doubles or
/// when the exact spacing is too fine for the lattice size guard, so that
/// callers fall back to an approximate spacing instead of failing later.
inline std::optional<double> exact_fit_delta(const RandomVector& value_map,
                                             std::span<const double> a) {
  if (value_map.coords() != 1)
    throw structural_error("lattice: value map must be single-coordinate");
  std::vector<double> products;
  for (double c : a)
    for (double v : value_map.flat())
      if (c * v != 0.0) products.push_back(std::abs(c * v));
  if (products.empty()) return 1.0;  // everything sits at 0: any spacing fits

  double g = 0.0;
  for (double s : products) {
    double x = g, y = s;
    while (y != 0.0) {
      const double r = std::fmod(x, y);
      x = y;
      y = r;
    }
    g = x;
    if (!(g > 0.0)) return std::nullopt;
  }
  for (double s : products) {
    const double m = std::nearbyint(s / g);
    if (std::abs(m) > 9e15 || m * g != s) return std::nullopt;
  }
  // Every pair of doubles is commensurable on paper (they share a dyadic
  // grid), so also require the spacing to be usable: the lattice a caller
  // would build from it must fit the support guard.  Values like 1 and
  // sqrt(2) yield an exact gcd near 2^-52 and are reported as unfit here.
  double span_cells = 0.0;
  for (double c : a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : value_map.flat()) {
      lo = std::min(lo, c * v);
      hi = std::max(hi, c * v);
    }
    span_cells += (hi - lo) / g;
  }
  if (span_cells > static_cast<double>(std::int64_t{1} << 26)) return std::nullopt;
  return g;
}

/// Default spacing: (value range) * sum|a_i| / 2^20, which keeps the final
/// lattice near 10^6 points.  Falls back to 1 for degenerate ranges.
inline double auto_delta(const RandomVector& value_map, std::span<const double> a) {
  if (value_map.coords() != 1)
    throw structural_error("lattice: value map must be single-coordinate");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : value_map.flat()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double total = 0.0;
  for (double c : a) total += std::abs(c);
  const double span = (hi - lo) * total;
  return span > 0.0 ? span / static_cast<double>(1 << 20) : 1.0;
}

}  // namespace sublin

#endif
