#ifndef SUBLIN_DEPENDENCE_HPP
#define SUBLIN_DEPENDENCE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/family.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/piecewise_linear.hpp"

namespace sublin {

enum class EndDirection { upper, lower, both };

inline const char* to_string(EndDirection d) {
  switch (d) {
    case EndDirection::upper:
      return "upper";
    case EndDirection::lower:
      return "lower";
    case EndDirection::both:
      return "both";
  }
  return "?";
}

/// Dominating-constant certificate for negatively dependent coordinates.
/// `certified` is structural (product factorization); `estimated` is a grid
/// search and therefore a LOWER bound on the true minimal constant.
struct ENDCertificate {
  enum class Kind { certified, estimated };

  Kind kind = Kind::estimated;
  double K = 1.0;
  EndDirection direction = EndDirection::both;
  std::string evidence;
  std::uint64_t tuples_checked = 0;  // estimated only
  std::uint64_t tuples_skipped = 0;  // denominator below cutoff
  double max_ratio = std::numeric_limits<double>::quiet_NaN();

  bool certified() const { return kind == Kind::certified; }
};

/// Ramp test functions f(x) = clamp((x-a)/w, 0, 1) and the mirrored
/// non-increasing ramps.  All members are nonnegative, bounded by 1,
/// monotone, Lipschitz with constant 1/w.
struct MonotoneTestGrid {
  std::vector<PiecewiseLinearFn> nondecreasing;
  std::vector<PiecewiseLinearFn> nonincreasing;

  /// Thresholds a in {-2,-1,-0.5,0,0.5,1,2} and widths w in {0.25,1}, both
  /// in units of (hi-lo)/4 around the range midpoint.
  static MonotoneTestGrid standard(double lo, double hi) {
    if (!(lo <= hi)) throw structural_error("test grid: range out of order");
    const double mid = 0.5 * (lo + hi);
    const double unit = hi > lo ? (hi - lo) / 4.0 : 1.0;
    MonotoneTestGrid grid;
    for (double a : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
      for (double w : {0.25, 1.0}) {
        const double t = mid + a * unit;
        const double width = w * unit;
        auto up = PiecewiseLinearFn::from_knots(0.0, {{t, 0.0}, {t + width, 1.0}}, 0.0);
        up.declare_range(0.0, 1.0);
        auto down = PiecewiseLinearFn::from_knots(0.0, {{t - width, 1.0}, {t, 0.0}}, 0.0);
        down.declare_range(0.0, 1.0);
        grid.nondecreasing.push_back(std::move(up));
        grid.nonincreasing.push_back(std::move(down));
      }
    }
    return grid;
  }

  static MonotoneTestGrid standard_for(const RandomVector& x) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : x.flat()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return standard(lo, hi);
  }
};

/// A family together with the coordinate vector it certifies.
struct EndFamily {
  MeasureFamily family;
  RandomVector coordinates;
  ENDCertificate certificate;
};

namespace detail {

inline RandomVector coordinates_from_digits(const SampleSpace& space, const ProductLayout& layout,
                                            const std::vector<std::vector<double>>& values) {
  const std::int64_t n = static_cast<std::int64_t>(layout.factors());
  std::vector<double> flat(static_cast<std::size_t>(space.atom_count * n));
  for (std::int64_t a = 0; a < space.atom_count; ++a)
    for (std::int64_t i = 0; i < n; ++i)
      flat[static_cast<std::size_t>(a * n + i)] =
          values[static_cast<std::size_t>(i)]
                [static_cast<std::size_t>(layout.digit(a, static_cast<std::size_t>(i)))];
  return RandomVector(space, n, std::move(flat));
}

}  // namespace detail

/// Family {Q_j^(x)n : j} with one shared base space.  Coordinate i reads the
/// base value map off the i-th digit.  The certificate is structural:
///   E_up[prod f_i(X_i)] = max_j prod_i E_Qj[f_i]
///                      <= prod_i max_j E_Qj[f_i] = prod_i E_up[f_i(X_i)]
/// for nonnegative factors, so K = 1 in both monotone directions.
inline EndFamily homogeneous_product_family(const std::vector<double>& base_values,
                                            const std::vector<std::vector<double>>& member_weights,
                                            std::int64_t n) {
  if (base_values.empty()) throw structural_error("homogeneous family: empty base values");
  if (member_weights.empty()) throw structural_error("homogeneous family: no members");
  const SampleSpace base(static_cast<std::int64_t>(base_values.size()));
  std::vector<Measure> marginals;
  marginals.reserve(member_weights.size());
  for (const auto& w : member_weights) marginals.emplace_back(base, w);

  MeasureFamily family = MeasureFamily::homogeneous_product(marginals, n);
  const ProductLayout layout(std::vector<std::int64_t>(static_cast<std::size_t>(n),
                                                       base.atom_count));
  RandomVector coords = detail::coordinates_from_digits(
      family.space(), layout,
      std::vector<std::vector<double>>(static_cast<std::size_t>(n), base_values));

  ENDCertificate cert;
  cert.kind = ENDCertificate::Kind::certified;
  cert.K = 1.0;
  cert.direction = EndDirection::both;
  cert.evidence = "homogeneous product structure: every member is an n-fold product of one marginal";
  return {std::move(family), std::move(coords), std::move(cert)};
}

/// Per-member product family: member j = marginals[j][0] x ... x
/// marginals[j][n-1].  coordinate_values[i] maps the atoms of factor i.
/// Same factorization argument as above, so K = 1 certified.
inline EndFamily product_family(const std::vector<std::vector<Measure>>& per_member_marginals,
                                const std::vector<std::vector<double>>& coordinate_values) {
  if (per_member_marginals.empty()) throw structural_error("product family: no members");
  const std::size_t n = per_member_marginals.front().size();
  if (coordinate_values.size() != n)
    throw structural_error("product family: coordinate value rows do not match factor count");
  std::vector<std::int64_t> sizes;
  sizes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sizes.push_back(per_member_marginals.front()[i].space().atom_count);
    if (static_cast<std::int64_t>(coordinate_values[i].size()) != sizes.back())
      throw structural_error("product family: value map does not match factor space");
  }

  MeasureFamily family = MeasureFamily::product(per_member_marginals);
  const ProductLayout layout(sizes);
  RandomVector coords = detail::coordinates_from_digits(family.space(), layout, coordinate_values);

  ENDCertificate cert;
  cert.kind = ENDCertificate::Kind::certified;
  cert.K = 1.0;
  cert.direction = EndDirection::both;
  cert.evidence = "per-member product structure: each member factors into per-coordinate marginals";
  return {std::move(family), std::move(coords), std::move(cert)};
}

namespace detail {

struct KSearchState {
  double max_ratio = 0.0;
  std::uint64_t tuples = 0;
  std::uint64_t skipped = 0;
};

/// Depth-first sweep over direction-homogeneous grid tuples.  `cur` carries
/// the atomwise partial product, `denom` the product of per-factor upper
/// expectations.  Factors with denominator below the cutoff are skipped
/// (0/0 guards), counted in `skipped`.
inline void k_search(const MeasureFamily& f,
                     const std::vector<std::vector<std::vector<double>>>& applied,
                     const std::vector<std::vector<double>>& denoms, std::size_t coord,
                     const std::vector<double>& cur, double denom, KSearchState& state) {
  const std::size_t n = applied.front().size();
  const std::size_t atoms = cur.size();
  std::vector<double> next(atoms);
  for (std::size_t g = 0; g < applied.size(); ++g) {
    if (denoms[g][coord] < 1e-12) {
      ++state.skipped;
      continue;
    }
    for (std::size_t a = 0; a < atoms; ++a) next[a] = cur[a] * applied[g][coord][a];
    const double d = denom * denoms[g][coord];
    if (coord + 1 == n) {
      double num = -std::numeric_limits<double>::infinity();
      for (const auto& member : f.members()) {
        double dot = 0.0;
        const auto& w = member.weights();
        for (std::size_t a = 0; a < atoms; ++a) dot += w[a] * next[a];
        num = std::max(num, dot);
      }
      ++state.tuples;
      state.max_ratio = std::max(state.max_ratio, num / d);
    } else {
      k_search(f, applied, denoms, coord + 1, next, d, state);
    }
  }
}

}  // namespace detail

/// Grid estimate of the dominating constant: the max over direction-
/// homogeneous tuples (f_1,...,f_n) from the grid of
///   E_up[prod f_i(X_i)] / prod E_up[f_i(X_i)],
/// denominators below 1e-12 skipped.  The result is a LOWER bound on the
/// true minimal K (any finite grid is a relaxation); the certificate says so.
inline ENDCertificate estimate_K(const MeasureFamily& f, const RandomVector& x,
                                 const MonotoneTestGrid& grid, EndDirection direction) {
  if (!(x.space() == f.space()))
    throw structural_error("estimate: vector and family live on different spaces");
  if (grid.nondecreasing.empty() && grid.nonincreasing.empty())
    throw structural_error("estimate: empty test grid");
  const std::int64_t n = x.coords();
  if (n > 6) throw domain_error("estimate: tuple enumeration supported only for n <= 6");

  const std::size_t atoms = static_cast<std::size_t>(f.space().atom_count);
  detail::KSearchState state;

  const auto run = [&](const std::vector<PiecewiseLinearFn>& fns) {
    if (fns.empty()) return;
    // applied[g][i][a] = f_g(X_i(atom a)); denoms[g][i] = E_up[f_g(X_i)].
    std::vector<std::vector<std::vector<double>>> applied(
        fns.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(n),
                                                     std::vector<double>(atoms)));
    std::vector<std::vector<double>> denoms(fns.size(),
                                            std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t g = 0; g < fns.size(); ++g)
      for (std::int64_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < atoms; ++a)
          applied[g][static_cast<std::size_t>(i)][a] =
              fns[g](x.value(static_cast<std::int64_t>(a), i));
        denoms[g][static_cast<std::size_t>(i)] = upper_expectation(
            f, RandomVector::single(f.space(), applied[g][static_cast<std::size_t>(i)]));
      }
    const std::vector<double> ones(atoms, 1.0);
    detail::k_search(f, applied, denoms, 0, ones, 1.0, state);
  };

  if (direction == EndDirection::upper || direction == EndDirection::both)
    run(grid.nondecreasing);
  if (direction == EndDirection::lower || direction == EndDirection::both)
    run(grid.nonincreasing);

  ENDCertificate cert;
  cert.kind = ENDCertificate::Kind::estimated;
  cert.direction = direction;
  cert.max_ratio = state.max_ratio;
  cert.K = std::max(state.max_ratio, 1.0);
  cert.tuples_checked = state.tuples;
  cert.tuples_skipped = state.skipped;
  cert.evidence = "grid estimate (lower bound on the minimal constant): " +
                  std::to_string(state.tuples) + " tuples, max ratio " +
                  std::to_string(state.max_ratio) + ", " + std::to_string(state.skipped) +
                  " skipped below denominator cutoff";
  return cert;
}

}  // namespace sublin

#endif
