#ifndef SUBLIN_MEASURE_SPACE_HPP
#define SUBLIN_MEASURE_SPACE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/piecewise_linear.hpp"

namespace sublin {

/// Hard ceiling on the atom count of any constructed product space.
inline constexpr std::int64_t kMaxProductAtoms = std::int64_t{1} << 24;

/// Finite sample space: atoms are indices 0..atom_count-1.
struct SampleSpace {
  std::int64_t atom_count = 0;
  std::optional<std::vector<std::string>> atom_labels;  // cosmetic only

  SampleSpace() = default;
  explicit SampleSpace(std::int64_t count,
                       std::optional<std::vector<std::string>> labels = std::nullopt)
      : atom_count(count), atom_labels(std::move(labels)) {
    if (atom_count < 1) throw structural_error("sample space: atom count must be >= 1");
    if (atom_labels && static_cast<std::int64_t>(atom_labels->size()) != atom_count)
      throw structural_error("sample space: label count does not match atom count");
  }

  friend bool operator==(const SampleSpace& a, const SampleSpace& b) {
    return a.atom_count == b.atom_count;  // labels are cosmetic
  }
};

/// Probability measure as an explicit weight vector over the atoms.
/// Weights are stored exactly as given; the constructor only checks them.
class Measure {
 public:
  Measure(SampleSpace space, std::vector<double> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (static_cast<std::int64_t>(weights_.size()) != space_.atom_count)
      throw structural_error("measure: weight count does not match atom count");
    double sum = 0.0;
    for (double w : weights_) {
      if (!std::isfinite(w) || w < 0.0)
        throw structural_error("measure: weights must be finite and nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw structural_error("measure: weights must sum to 1 within 1e-12");
  }

  const SampleSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::int64_t atom) const { return weights_[static_cast<std::size_t>(atom)]; }

 private:
  SampleSpace space_;
  std::vector<double> weights_;
};

/// Real random vector on a finite space, stored atom-major:
/// value(atom, coord) = values[atom*n + coord].
class RandomVector {
 public:
  RandomVector(SampleSpace space, std::int64_t n_coords, std::vector<double> flat)
      : space_(std::move(space)), n_(n_coords), values_(std::move(flat)) {
    if (n_ < 1) throw structural_error("random vector: coordinate count must be >= 1");
    if (static_cast<std::int64_t>(values_.size()) != space_.atom_count * n_)
      throw structural_error("random vector: value count does not match atoms * coords");
    for (double v : values_)
      if (!std::isfinite(v)) throw structural_error("random vector: non-finite value");
  }

  static RandomVector single(SampleSpace space, std::vector<double> values) {
    return RandomVector(std::move(space), 1, std::move(values));
  }

  /// rows[atom] = the n coordinate values at that atom.
  static RandomVector from_rows(SampleSpace space,
                                const std::vector<std::vector<double>>& rows) {
    if (static_cast<std::int64_t>(rows.size()) != space.atom_count)
      throw structural_error("random vector: row count does not match atom count");
    const std::size_t n = rows.empty() ? 0 : rows.front().size();
    if (n == 0) throw structural_error("random vector: empty rows");
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw structural_error("random vector: ragged rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return RandomVector(std::move(space), static_cast<std::int64_t>(n), std::move(flat));
  }

  const SampleSpace& space() const { return space_; }
  std::int64_t coords() const { return n_; }
  double value(std::int64_t atom, std::int64_t coord) const {
    return values_[static_cast<std::size_t>(atom * n_ + coord)];
  }
  const std::vector<double>& flat() const { return values_; }

  RandomVector coordinate(std::int64_t i) const {
    std::vector<double> v(static_cast<std::size_t>(space_.atom_count));
    for (std::int64_t a = 0; a < space_.atom_count; ++a) v[a] = value(a, i);
    return single(space_, std::move(v));
  }

  /// Sum of coordinates, as a single-coordinate vector.
  RandomVector row_sum() const {
    std::vector<double> v(static_cast<std::size_t>(space_.atom_count), 0.0);
    for (std::int64_t a = 0; a < space_.atom_count; ++a)
      for (std::int64_t i = 0; i < n_; ++i) v[a] += value(a, i);
    return single(space_, std::move(v));
  }

  /// Sum of a_i * X_i, as a single-coordinate vector.
  RandomVector weighted_row_sum(std::span<const double> a) const {
    if (static_cast<std::int64_t>(a.size()) != n_)
      throw structural_error("random vector: weight count does not match coords");
    std::vector<double> v(static_cast<std::size_t>(space_.atom_count), 0.0);
    for (std::int64_t at = 0; at < space_.atom_count; ++at)
      for (std::int64_t i = 0; i < n_; ++i) v[at] += a[i] * value(at, i);
    return single(space_, std::move(v));
  }

  /// Pointwise transform of a single-coordinate vector (internal helper for
  /// non-piecewise-linear maps like |x|^p).
  template <class F>
  RandomVector map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
    return RandomVector(space_, n_, std::move(v));
  }

 private:
  SampleSpace space_;
  std::int64_t n_;
  std::vector<double> values_;
};

/// Classical expectation of a single-coordinate vector.
inline double expectation(const Measure& p, const RandomVector& x) {
  if (!(p.space() == x.space()))
    throw structural_error("expectation: measure and vector live on different spaces");
  if (x.coords() != 1)
    throw structural_error("expectation: vector must be single-coordinate");
  double s = 0.0;
  for (std::int64_t a = 0; a < p.space().atom_count; ++a) s += p.weight(a) * x.value(a, 0);
  return s;
}

/// Mixed-radix layout of a product space: atom index is read with the first
/// factor most significant, so atom ordering is lexicographic in the digits.
struct ProductLayout {
  std::vector<std::int64_t> sizes;
  std::int64_t total = 1;

  explicit ProductLayout(std::vector<std::int64_t> s) : sizes(std::move(s)) {
    if (sizes.empty()) throw structural_error("product layout: no factors");
    for (std::int64_t k : sizes) {
      if (k < 1) throw structural_error("product layout: factor size must be >= 1");
      if (total > kMaxProductAtoms / k)
        throw size_limit_error("product layout: atom count would exceed 2^24");
      total *= k;
    }
  }

  std::int64_t digit(std::int64_t atom, std::size_t i) const {
    std::int64_t rest = atom;
    for (std::size_t j = sizes.size(); j-- > i + 1;) rest /= sizes[j];
    return rest % sizes[i];
  }

  std::size_t factors() const { return sizes.size(); }
};

inline SampleSpace product_space(std::span<const SampleSpace> factors) {
  std::vector<std::int64_t> sizes;
  sizes.reserve(factors.size());
  for (const auto& s : factors) sizes.push_back(s.atom_count);
  return SampleSpace(ProductLayout(std::move(sizes)).total);
}

inline Measure product_measure(std::span<const Measure> factors) {
  std::vector<std::int64_t> sizes;
  sizes.reserve(factors.size());
  for (const auto& m : factors) sizes.push_back(m.space().atom_count);
  const ProductLayout layout(std::move(sizes));
  std::vector<double> w(static_cast<std::size_t>(layout.total), 1.0);
  for (std::int64_t a = 0; a < layout.total; ++a)
    for (std::size_t i = 0; i < layout.factors(); ++i)
      w[a] *= factors[i].weight(layout.digit(a, i));
  return Measure(SampleSpace(layout.total), std::move(w));
}

/// Coordinatewise application of a test function.
inline RandomVector apply_fn(const PiecewiseLinearFn& f, const RandomVector& x) {
  return x.map([&f](double v) { return f(v); });
}

}  // namespace sublin

#endif
