#ifndef SUBLIN_GENERATORS_HPP
#define SUBLIN_GENERATORS_HPP

// Deterministic random-instance builders for soak runs.  Every instance is
// constructed to satisfy the hypotheses of the bound it will be checked
// against (mean signs, boundedness), so a soak failure indicts the bound
// machinery rather than the generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sublin/bounds.hpp"
#include "sublin/dependence.hpp"
#include "sublin/errors.hpp"
#include "sublin/family.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/rng.hpp"

namespace sublin {

namespace detail {

inline std::vector<double> normalized_weights(Rng& rng, std::size_t count) {
  std::vector<double> w(count);
  double sum = 0.0;
  for (auto& v : w) {
    v = rng.uniform(0.05, 1.0);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

/// Blends the weight row toward the atom whose value has the opposite sign of
/// the current mean, making the mean vanish exactly (up to roundoff).  The
/// values must straddle 0 for a target atom to exist.
inline void zero_mean_blend(std::vector<double>& w, const std::vector<double>& v) {
  for (int pass = 0; pass < 3; ++pass) {
    double mean = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) mean += w[k] * v[k];
    if (std::abs(mean) <= 1e-13) return;
    const std::size_t k =
        mean > 0.0
            ? static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin())
            : static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    if (!((mean > 0.0 && v[k] < 0.0) || (mean < 0.0 && v[k] > 0.0)))
      throw structural_error("generator: values do not straddle 0");
    const double t = mean / (mean - v[k]);
    for (auto& x : w) x *= 1.0 - t;
    w[k] += t;
  }
}

/// Values guaranteed to straddle 0 by a definite margin, so the zero-mean
/// blend always has a target.
inline std::vector<double> straddling_values(Rng& rng, std::size_t atoms) {
  std::vector<double> v(atoms);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  v.front() = -rng.uniform(0.1, 1.0);
  v.back() = rng.uniform(0.1, 1.0);
  return v;
}

}  // namespace detail

/// General (untagged) family for axiom soaks.
inline MeasureFamily random_family(Rng& rng, std::int64_t max_atoms = 6,
                                   std::int64_t max_members = 4) {
  if (max_atoms < 2) throw domain_error("generator: max atoms must be >= 2");
  if (max_members < 1) throw domain_error("generator: max members must be >= 1");
  const std::int64_t atoms = rng.uniform_int(2, max_atoms);
  const std::int64_t members = rng.uniform_int(1, max_members);
  const SampleSpace space(atoms);
  std::vector<Measure> ms;
  ms.reserve(static_cast<std::size_t>(members));
  for (std::int64_t j = 0; j < members; ++j)
    ms.emplace_back(space, detail::normalized_weights(rng, static_cast<std::size_t>(atoms)));
  return MeasureFamily(std::move(ms));
}

/// A certified family with its coordinate vector and a threshold/exponent
/// pair ready for one of the two tail bounds.
struct VerificationInstance {
  EndFamily end;
  double threshold = 0.0;  // eps for the bounded form, x for the general form
  double p = 2.0;
  bool two_sided = false;
};

namespace detail {

/// Shared construction: random product-structured family (50% homogeneous,
/// 50% per-coordinate marginals), coordinate means forced to the sign pattern
/// the bounds require.  One-sided: every upper mean strictly <= 0.
/// Two-sided: every member mean exactly 0 (so both signed conditions hold).
inline EndFamily random_certified_family(Rng& rng, bool two_sided) {
  const std::int64_t n = rng.uniform_int(1, 5);
  const std::int64_t members = rng.uniform_int(1, 3);

  if (rng.bernoulli(0.5)) {
    const std::int64_t atoms = rng.uniform_int(2, 4);
    std::vector<double> values =
        two_sided ? straddling_values(rng, static_cast<std::size_t>(atoms))
                  : [&] {
                      std::vector<double> v(static_cast<std::size_t>(atoms));
                      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
                      return v;
                    }();
    std::vector<std::vector<double>> weights;
    weights.reserve(static_cast<std::size_t>(members));
    for (std::int64_t j = 0; j < members; ++j)
      weights.push_back(normalized_weights(rng, static_cast<std::size_t>(atoms)));

    if (two_sided) {
      for (auto& w : weights) zero_mean_blend(w, values);
    } else {
      double mu_up = -std::numeric_limits<double>::infinity();
      for (const auto& w : weights) {
        double m = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) m += w[k] * values[k];
        mu_up = std::max(mu_up, m);
      }
      const double shift = mu_up + rng.uniform(0.0, 0.3);
      for (auto& v : values) v -= shift;
    }
    return homogeneous_product_family(values, weights, n);
  }

  std::vector<std::vector<double>> coord_values(static_cast<std::size_t>(n));
  std::vector<std::vector<std::vector<double>>> w(  // [member][coord][atom]
      static_cast<std::size_t>(members),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n)));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t atoms = rng.uniform_int(2, 4);
    auto& values = coord_values[static_cast<std::size_t>(i)];
    if (two_sided) {
      values = straddling_values(rng, static_cast<std::size_t>(atoms));
    } else {
      values.resize(static_cast<std::size_t>(atoms));
      for (auto& x : values) x = rng.uniform(-1.0, 1.0);
    }
    for (std::int64_t j = 0; j < members; ++j)
      w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          normalized_weights(rng, static_cast<std::size_t>(atoms));

    if (two_sided) {
      for (std::int64_t j = 0; j < members; ++j)
        zero_mean_blend(w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], values);
    } else {
      double mu_up = -std::numeric_limits<double>::infinity();
      for (std::int64_t j = 0; j < members; ++j) {
        const auto& wj = w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        double m = 0.0;
        for (std::size_t k = 0; k < wj.size(); ++k) m += wj[k] * values[k];
        mu_up = std::max(mu_up, m);
      }
      const double shift = mu_up + rng.uniform(0.0, 0.3);
      for (auto& v : values) v -= shift;
    }
  }

  std::vector<std::vector<Measure>> marginals(static_cast<std::size_t>(members));
  for (std::int64_t j = 0; j < members; ++j) {
    auto& row = marginals[static_cast<std::size_t>(j)];
    row.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& values = coord_values[static_cast<std::size_t>(i)];
      row.emplace_back(SampleSpace(static_cast<std::int64_t>(values.size())),
                       w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    }
  }
  return product_family(marginals, coord_values);
}

}  // namespace detail

/// Instance for the bounded-summand bound: |values| <= eps by construction.
inline VerificationInstance random_bounded_instance(Rng& rng, bool two_sided) {
  VerificationInstance inst{detail::random_certified_family(rng, two_sided), 0.0, 2.0,
                            two_sided};
  double abs_max = 0.0;
  for (double v : inst.end.coordinates.flat()) abs_max = std::max(abs_max, std::abs(v));
  inst.threshold = std::max(abs_max, 0.05) * rng.uniform(1.0, 2.0);
  inst.p = 2.0 - rng.next_unit() * 0.999;
  return inst;
}

/// Instance for the general bound.  The threshold is placed around the
/// level where the bound crosses 1, weighted toward the informative side:
/// 60% above (bound < 1), 40% below (vacuous branch exercised).
inline VerificationInstance random_unbounded_instance(Rng& rng, bool two_sided) {
  VerificationInstance inst{detail::random_certified_family(rng, two_sided), 0.0, 2.0,
                            two_sided};
  inst.p = 2.0 - rng.next_unit() * 0.999;
  const double K = std::max(inst.end.certificate.K, 1.0);
  const double M = moment_profile(inst.end.family, inst.end.coordinates, inst.p).sum;
  const double c = (two_sided ? 2.0 : 1.0) * std::pow(4.0, inst.p) *
                   (1.0 + K * std::exp(1.0)) * M;
  const double x_crit = std::pow(c, 1.0 / inst.p);
  if (!(x_crit > 1e-9)) {
    inst.threshold = 1.0;
  } else if (rng.bernoulli(0.6)) {
    inst.threshold = x_crit * rng.uniform(1.05, 3.0);
  } else {
    inst.threshold = x_crit * rng.uniform(0.2, 0.95);
  }
  return inst;
}

}  // namespace sublin

#endif
