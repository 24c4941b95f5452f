#ifndef SUBLIN_EXPERIMENTS_HPP
#define SUBLIN_EXPERIMENTS_HPP

// Long-run experiments over homogeneous product families: weak-law capacity
// decay and weighted complete-convergence series, both computed via exact
// lattice convolution (no sampling error in the reported capacities).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/family.hpp"
#include "sublin/lattice.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/rng.hpp"
#include "sublin/transforms.hpp"

namespace sublin {

/// One-coordinate model replicated as an i.i.d.-style homogeneous product.
/// `values[k]` is the outcome on base atom k; `member_weights[j]` is the
/// j-th marginal candidate.  All coordinates share the same marginal set.
struct HomogeneousModel {
  std::vector<double> values;
  std::vector<std::vector<double>> member_weights;

  SampleSpace base_space() const {
    return SampleSpace(static_cast<std::int64_t>(values.size()));
  }

  std::vector<Measure> marginals() const {
    SampleSpace sp = base_space();
    std::vector<Measure> out;
    out.reserve(member_weights.size());
    for (const auto& w : member_weights) out.emplace_back(sp, w);
    return out;
  }

  /// Family on the base space itself (one-summand view), used for per-summand
  /// quantities: means, moments, Choquet integrals of the base variable.
  MeasureFamily base_family() const { return MeasureFamily(marginals()); }

  RandomVector base_variable() const {
    return RandomVector::single(base_space(), values);
  }

  void validate() const {
    if (values.empty()) throw structural_error("model: no atoms");
    if (member_weights.empty()) throw structural_error("model: no measures");
    for (const auto& w : member_weights)
      if (w.size() != values.size())
        throw structural_error("model: weight row length does not match atom count");
  }
};

namespace detail {

/// max_j E_j[h(X)] on the base space, for an atomwise transform h.
template <class H>
double base_upper_mean(const HomogeneousModel& m, H&& h) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : m.member_weights) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.values.size(); ++k) s += w[k] * h(m.values[k]);
    best = std::max(best, s);
  }
  return best;
}

inline double base_upper_mean_id(const HomogeneousModel& m) {
  return base_upper_mean(m, [](double v) { return v; });
}

inline double base_lower_mean_id(const HomogeneousModel& m) {
  return -base_upper_mean(m, [](double v) { return -v; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Weak law of large numbers: V(S_n/n outside [mu_low - eps, mu_up + eps]) -> 0.
// The capacity is bracketed by lattice queries at the thresholds
// n(mu_low - eps) and n(mu_up + eps); cap_lo/cap_hi enclose the exact value,
// the gap being due only to grid snapping (zero when the spacing fits).

struct WllnPoint {
  std::size_t n = 0;
  double cap_lo = 0.0;   // certified lower bracket of the miss capacity
  double cap_hi = 0.0;   // certified upper bracket
  double cap_mid = 0.0;
  double v_form = 0.0;   // 1 - cap_mid: inner capacity of the epsilon tube
};

struct WllnReport {
  double eps = 0.0;
  double mu_low = 0.0;
  double mu_up = 0.0;
  double delta = 0.0;      // lattice spacing used
  bool exact_fit = false;  // spacing snapped nothing anywhere
  std::vector<WllnPoint> points;
};

/// `n_grid` must be nonempty and strictly increasing.  One convolution step
/// per summand total (incremental), bracket queries at each requested n.
inline WllnReport wlln_experiment(const HomogeneousModel& model,
                                  const std::vector<std::size_t>& n_grid, double eps,
                                  std::optional<double> delta_opt = {}) {
  model.validate();
  if (n_grid.empty()) throw domain_error("wlln: empty n grid");
  if (n_grid.front() == 0) throw domain_error("wlln: n must be >= 1");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    if (n_grid[i] >= n_grid[i + 1])
      throw domain_error("wlln: n grid must be strictly increasing");
  if (!(eps > 0.0)) throw domain_error("wlln: eps must be positive");

  WllnReport rep;
  rep.eps = eps;
  rep.mu_up = detail::base_upper_mean_id(model);
  rep.mu_low = detail::base_lower_mean_id(model);

  const std::vector<Measure> margs = model.marginals();
  const RandomVector vmap = model.base_variable();
  const std::vector<double> ones{1.0};

  double delta;
  if (delta_opt) {
    delta = *delta_opt;
    if (!(delta > 0.0)) throw domain_error("wlln: delta must be positive");
  } else if (auto fit = exact_fit_delta(vmap, ones)) {
    delta = *fit;
  } else {
    const std::vector<double> full(n_grid.back(), 1.0);
    delta = auto_delta(vmap, full);
  }
  rep.delta = delta;

  std::vector<LatticeDistribution> sums;
  sums.reserve(margs.size());
  for (std::size_t j = 0; j < margs.size(); ++j)
    sums.push_back(LatticeDistribution::point_mass(delta));

  std::size_t grid_pos = 0;
  for (std::size_t n = 1; n <= n_grid.back(); ++n) {
    for (std::size_t j = 0; j < margs.size(); ++j)
      sums[j].add_scaled(margs[j], vmap, 1.0);
    if (n != n_grid[grid_pos]) continue;
    ++grid_pos;

    const double t_low = static_cast<double>(n) * (rep.mu_low - eps);
    const double t_high = static_cast<double>(n) * (rep.mu_up + eps);
    WllnPoint pt;
    pt.n = n;
    double lo = 0.0, hi = 0.0;
    for (const auto& d : sums) {
      const double s = d.snap_bound();
      lo = std::max(lo, d.prob_less(t_low - s) + d.prob_greater(t_high + s));
      hi = std::max(hi, d.prob_less(t_low + s) + d.prob_greater(t_high - s));
    }
    pt.cap_lo = std::clamp(lo, 0.0, 1.0);
    pt.cap_hi = std::clamp(hi, 0.0, 1.0);
    pt.cap_lo = std::min(pt.cap_lo, pt.cap_hi);
    pt.cap_mid = 0.5 * (pt.cap_lo + pt.cap_hi);
    pt.v_form = 1.0 - pt.cap_mid;
    rep.points.push_back(pt);
  }

  rep.exact_fit = true;
  for (const auto& d : sums) rep.exact_fit = rep.exact_fit && d.snap_bound() == 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Weighted complete-convergence series
//     sum_n  n^{ap-2} l(n) V(S_n > eps n^a),   S_n = sum_i a_{ni} X_i,
// with row weights either a == 1 or a deterministic pseudorandom array
// bounded in [0, 2].  The two-sided variant uses V(|S_n| > eps n^a).

enum class WeightKind { constant_one, bounded_random };

inline const char* to_string(WeightKind k) {
  return k == WeightKind::constant_one ? "constant-one" : "bounded-random";
}

struct SeriesConfig {
  double p = 1.5;
  double alpha = 1.0;
  double eps = 1.0;
  SlowlyVaryingFn l = SlowlyVaryingFn::one();
  WeightKind weights = WeightKind::constant_one;
  double q = 2.0;               // row-sum exponent monitored via sum a^q = O(n)
  std::size_t n_max = 200;
  std::optional<double> delta;  // lattice spacing override
  std::uint64_t seed = 0;       // weight-array stream key
  bool two_sided = false;
};

struct SeriesPoint {
  std::size_t n = 0;
  double weight = 0.0;      // n^{ap-2} l(n)
  double cap_lo = 0.0;
  double cap_hi = 0.0;
  double cap_mid = 0.0;
  double term = 0.0;        // weight * cap_mid
  double partial_sum = 0.0;
  double mean_shift = 0.0;  // n^{-a} |sum_i a_i E[truncated X]|, p >= 1 only
};

struct SeriesReport {
  std::string regime;               // which hypothesis set the run sits in
  double alpha_p = 0.0;
  double choquet_hypothesis = 0.0;  // Choquet integral of |x|^p l(|x|^{1/a})
  double moment_p = 0.0;            // upper expectation of |X|^p
  double upper_mean = 0.0;
  double lower_mean = 0.0;
  double weight_C = 0.0;            // max_n (sum_i a_{ni}^q) / n
  double final_partial_sum = 0.0;
  double decay_slope = 0.0;         // log-log least-squares slope of the terms
  bool decay_fit_ok = false;
  double max_mean_shift = 0.0;
  double delta = 0.0;               // spacing of the incremental path (a == 1)
  bool exact_fit = false;
  std::size_t skipped_zero_support = 0;  // per-n runs certified zero by support
  std::vector<SeriesPoint> points;
};

namespace detail {

/// Row a_{n,0..n-1} of the weight array.  Deterministic in (seed, n, i).
inline std::vector<double> weight_row(WeightKind kind, std::uint64_t seed,
                                      std::size_t n) {
  std::vector<double> a(n, 1.0);
  if (kind == WeightKind::bounded_random) {
    Rng row = Rng(seed).child("weights").child(static_cast<std::uint64_t>(n));
    for (std::size_t i = 0; i < n; ++i) a[i] = 2.0 * row.next_unit();
  }
  return a;
}

}  // namespace detail

/// Runs the series experiment.  Hypothesis violations throw hypothesis_error;
/// parameter-range violations throw domain_error.  Capacities are exact up to
/// the reported lattice bracket; nothing is estimated by sampling.
inline SeriesReport complete_convergence_report(const HomogeneousModel& model,
                                                const SeriesConfig& cfg) {
  model.validate();
  if (!(cfg.p > 0.0) || !(cfg.p < 2.0)) throw domain_error("series: p must lie in (0, 2)");
  if (!(cfg.alpha > 0.0)) throw domain_error("series: alpha must be positive");
  if (!(cfg.eps > 0.0)) throw domain_error("series: eps must be positive");
  if (!(cfg.q > cfg.p)) throw domain_error("series: q must exceed p");
  if (cfg.n_max < 1) throw domain_error("series: n_max must be >= 1");
  if (cfg.n_max > 2000) throw domain_error("series: n_max capped at 2000");

  const double ap = cfg.alpha * cfg.p;
  if (ap < 1.0 - 1e-12) throw hypothesis_error("series: alpha * p must be >= 1");
  const bool boundary = std::abs(ap - 1.0) <= 1e-12;

  SeriesReport rep;
  rep.alpha_p = ap;
  rep.regime = boundary ? "boundary series (alpha p = 1)" : "interior series (alpha p > 1)";
  rep.upper_mean = detail::base_upper_mean_id(model);
  rep.lower_mean = detail::base_lower_mean_id(model);
  rep.moment_p = detail::base_upper_mean(
      model, [p = cfg.p](double v) { return std::pow(std::abs(v), p); });

  // Mean-zero requirements kick in at p > 1 (interior) / p >= 1 (boundary).
  const bool need_mean_zero = boundary ? cfg.p >= 1.0 : cfg.p > 1.0;
  if (need_mean_zero) {
    if (std::abs(rep.upper_mean) > 1e-12)
      throw hypothesis_error("series: upper mean must vanish for this (p, alpha)");
    if (cfg.two_sided && std::abs(rep.lower_mean) > 1e-12)
      throw hypothesis_error("series: lower mean must vanish for the two-sided form");
  }

  {
    // Hypothesis moment: Choquet integral of |x|^p l(|x|^{1/alpha}).
    const MeasureFamily base = model.base_family();
    std::vector<double> h(model.values.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double av = std::abs(model.values[k]);
      h[k] = std::pow(av, cfg.p) * cfg.l(std::pow(av, 1.0 / cfg.alpha));
    }
    rep.choquet_hypothesis = choquet_integral(
        base, RandomVector::single(model.base_space(), h), CapacitySide::upper);
  }

  const std::vector<Measure> margs = model.marginals();
  const RandomVector vmap = model.base_variable();
  const double vmax = *std::max_element(model.values.begin(), model.values.end());
  const double vmin = *std::min_element(model.values.begin(), model.values.end());
  const std::vector<double> ones{1.0};

  // Incremental state for the constant-one path.
  std::vector<LatticeDistribution> sums;
  if (cfg.weights == WeightKind::constant_one) {
    double delta;
    if (cfg.delta) {
      delta = *cfg.delta;
      if (!(delta > 0.0)) throw domain_error("series: delta must be positive");
    } else if (auto fit = exact_fit_delta(vmap, ones)) {
      delta = *fit;
    } else {
      const std::vector<double> full(cfg.n_max, 1.0);
      delta = auto_delta(vmap, full);
    }
    sums.reserve(margs.size());
    for (std::size_t j = 0; j < margs.size(); ++j)
      sums.push_back(LatticeDistribution::point_mass(delta));
    rep.delta = delta;
  }

  rep.points.reserve(cfg.n_max);
  double running = 0.0;
  for (std::size_t n = 1; n <= cfg.n_max; ++n) {
    SeriesPoint pt;
    pt.n = n;
    const double nn = static_cast<double>(n);
    pt.weight = std::pow(nn, ap - 2.0) * cfg.l(nn);
    const double n_alpha = std::pow(nn, cfg.alpha);
    const double threshold = cfg.eps * n_alpha;

    const std::vector<double> a = detail::weight_row(cfg.weights, cfg.seed, n);
    double a_sum = 0.0, a_q = 0.0;
    for (double ai : a) {
      a_sum += ai;
      a_q += std::pow(ai, cfg.q);
    }
    rep.weight_C = std::max(rep.weight_C, a_q / nn);

    double lo = 0.0, hi = 0.0;
    if (cfg.weights == WeightKind::constant_one) {
      for (std::size_t j = 0; j < margs.size(); ++j)
        sums[j].add_scaled(margs[j], vmap, 1.0);
      for (const auto& d : sums) {
        const double s = d.snap_bound();
        double mlo = d.prob_greater(threshold + s);
        double mhi = d.prob_greater(threshold - s);
        if (cfg.two_sided) {
          mlo += d.prob_less(-threshold - s);
          mhi += d.prob_less(-threshold + s);
        }
        lo = std::max(lo, mlo);
        hi = std::max(hi, mhi);
      }
    } else {
      // Fresh convolution per n; short-circuit to an exact zero when the
      // true support of sum a_i X_i cannot reach past the threshold.
      const double pad = 1e-9 * (1.0 + std::abs(a_sum));
      const bool up_reachable = a_sum * vmax + pad > threshold;
      const bool down_reachable = cfg.two_sided && a_sum * vmin - pad < -threshold;
      if (!up_reachable && !down_reachable) {
        ++rep.skipped_zero_support;
      } else {
        const double spacing = cfg.delta ? *cfg.delta : auto_delta(vmap, a);
        for (const auto& m : margs) {
          const LatticeDistribution d = weighted_sum_law(m, vmap, a, spacing);
          const double s = d.snap_bound();
          double mlo = d.prob_greater(threshold + s);
          double mhi = d.prob_greater(threshold - s);
          if (cfg.two_sided) {
            mlo += d.prob_less(-threshold - s);
            mhi += d.prob_less(-threshold + s);
          }
          lo = std::max(lo, mlo);
          hi = std::max(hi, mhi);
        }
      }
    }
    pt.cap_lo = std::clamp(lo, 0.0, 1.0);
    pt.cap_hi = std::clamp(hi, 0.0, 1.0);
    pt.cap_lo = std::min(pt.cap_lo, pt.cap_hi);
    pt.cap_mid = 0.5 * (pt.cap_lo + pt.cap_hi);
    pt.term = pt.weight * pt.cap_mid;
    running += pt.term;
    pt.partial_sum = running;

    // Truncated-mean drift: the normalized shift that must vanish for the
    // truncation step to close when p >= 1.  Reported, not enforced.
    if (cfg.p >= 1.0) {
      const PiecewiseLinearFn clip_n = clip(n_alpha);
      const double clipped_mean =
          detail::base_upper_mean(model, [&](double v) { return clip_n(v); });
      pt.mean_shift = std::abs(clipped_mean) * a_sum / n_alpha;
      rep.max_mean_shift = std::max(rep.max_mean_shift, pt.mean_shift);
    }
    rep.points.push_back(pt);
  }
  rep.final_partial_sum = running;

  if (cfg.weights == WeightKind::constant_one) {
    rep.exact_fit = true;
    for (const auto& d : sums) rep.exact_fit = rep.exact_fit && d.snap_bound() == 0.0;
  }

  // log-log decay fit over the last decade of positive terms.
  std::vector<std::pair<double, double>> fit_pts;
  const double n_cut = static_cast<double>(cfg.n_max) / 10.0;
  for (const auto& pt : rep.points)
    if (pt.term > 0.0 && static_cast<double>(pt.n) >= n_cut)
      fit_pts.emplace_back(std::log(static_cast<double>(pt.n)), std::log(pt.term));
  if (fit_pts.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : fit_pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(fit_pts.size());
    const double den = m * sxx - sx * sx;
    if (den > 1e-12) {
      rep.decay_slope = (m * sxy - sx * sy) / den;
      rep.decay_fit_ok = true;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Series-equivalence diagnostics: finite-horizon renderings of the
// moment <-> capacity-series equivalences behind the convergence results.

struct TailSeriesReport {
  double choquet = 0.0;  // Choquet moment of |X|^p l(|X|^{1/alpha})
  double series = 0.0;   // sum_{n<=N} n^{ap-1} l(n) V(|X| > c0 n^a)
  std::size_t nonzero_terms = 0;
  bool series_complete = false;  // thresholds exceed max|X| beyond the horizon
  double theta_series = 0.0;     // geometric-block analogue over theta^k
  std::size_t theta_terms = 0;
  std::string note;
};

/// Both series are finite sums here because X is bounded: every term with
/// c0 n^alpha > max|X| vanishes.  `series_complete` certifies the horizon N
/// already contains all nonzero terms.
inline TailSeriesReport tail_series_check(const MeasureFamily& f, const RandomVector& x,
                                          double p, double alpha,
                                          const SlowlyVaryingFn& l, double c0 = 1.0,
                                          double theta = 2.0, std::size_t n_limit = 2000) {
  if (!(p > 0.0)) throw domain_error("tail series: p must be positive");
  if (!(alpha > 0.0)) throw domain_error("tail series: alpha must be positive");
  if (!(c0 > 0.0)) throw domain_error("tail series: c0 must be positive");
  if (!(theta > 1.0)) throw domain_error("tail series: theta must exceed 1");
  if (n_limit < 1 || n_limit > 10000)
    throw domain_error("tail series: n limit must lie in [1, 10000]");
  if (x.coords() != 1)
    throw structural_error("tail series: variable must be single-coordinate");

  TailSeriesReport rep;
  const std::int64_t atoms = f.space().atom_count;
  std::vector<double> h(static_cast<std::size_t>(atoms));
  double abs_max = 0.0;
  for (std::int64_t k = 0; k < atoms; ++k) {
    const double av = std::abs(x.value(k, 0));
    abs_max = std::max(abs_max, av);
    h[static_cast<std::size_t>(k)] = std::pow(av, p) * l(std::pow(av, 1.0 / alpha));
  }
  rep.choquet =
      choquet_integral(f, RandomVector::single(f.space(), h), CapacitySide::upper);

  for (std::size_t n = 1; n <= n_limit; ++n) {
    const double nn = static_cast<double>(n);
    const double thr = c0 * std::pow(nn, alpha);
    if (thr > abs_max) {
      rep.series_complete = true;
      break;
    }
    const EventSet ev = EventSet::of(
        f.space(), [&](std::int64_t k) { return std::abs(x.value(k, 0)) > thr; });
    const double cap = upper_capacity(f, ev).upper;
    if (cap > 0.0) ++rep.nonzero_terms;
    rep.series += std::pow(nn, alpha * p - 1.0) * l(nn) * cap;
  }

  for (std::size_t k = 0; k < 400; ++k) {
    const double tk = std::pow(theta, static_cast<double>(k));
    const double thr = c0 * std::pow(tk, alpha);
    if (thr > abs_max) break;
    const EventSet ev = EventSet::of(
        f.space(), [&](std::int64_t a) { return std::abs(x.value(a, 0)) > thr; });
    rep.theta_series += std::pow(tk, alpha * p) * l(tk) * upper_capacity(f, ev).upper;
    ++rep.theta_terms;
  }

  rep.note =
      "finite-horizon rendering: the moment/series equivalence is asymptotic; "
      "both sides are reported, neither is asserted against the other";
  return rep;
}

struct SmoothedMomentReport {
  double s = 0.0;
  double final_sum = 0.0;
  std::size_t terms = 0;
  bool terms_bounded = true;   // every term <= n^{ap-as-1} l(n) E[|X|^s]
  double tail_fraction = 0.0;  // share of the sum from the last quarter
  bool tail_flat = false;
};

/// sum_n n^{alpha(p-s)-1} l(n) E[|X|^s g(mu X / n^alpha)] with s > p.  For
/// bounded X the summand decays like n^{-1-alpha(s-p)} l(n), so partial sums
/// flatten; `tail_fraction` quantifies that.
inline SmoothedMomentReport smoothed_moment_check(const MeasureFamily& f,
                                                  const RandomVector& x, double p,
                                                  double alpha, double s, double mu,
                                                  const SlowlyVaryingFn& l,
                                                  std::size_t n_terms = 1000) {
  if (!(p > 0.0)) throw domain_error("smoothed moment: p must be positive");
  if (!(alpha > 0.0)) throw domain_error("smoothed moment: alpha must be positive");
  if (!(s > p)) throw domain_error("smoothed moment: s must exceed p");
  if (n_terms < 4 || n_terms > 10000)
    throw domain_error("smoothed moment: term count must lie in [4, 10000]");
  if (x.coords() != 1)
    throw structural_error("smoothed moment: variable must be single-coordinate");

  const SmoothingG g(mu);
  SmoothedMomentReport rep;
  rep.s = s;

  const std::int64_t atoms = f.space().atom_count;
  std::vector<double> abs_s(static_cast<std::size_t>(atoms));
  for (std::int64_t k = 0; k < atoms; ++k)
    abs_s[static_cast<std::size_t>(k)] = std::pow(std::abs(x.value(k, 0)), s);
  const double moment_s = upper_expectation(f, RandomVector::single(f.space(), abs_s));

  double last_quarter = 0.0;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    const double nn = static_cast<double>(n);
    const double n_alpha = std::pow(nn, alpha);
    std::vector<double> smoothed(static_cast<std::size_t>(atoms));
    for (std::int64_t k = 0; k < atoms; ++k)
      smoothed[static_cast<std::size_t>(k)] =
          abs_s[static_cast<std::size_t>(k)] * g(mu * x.value(k, 0) / n_alpha);
    const double expect = upper_expectation(f, RandomVector::single(f.space(), smoothed));
    const double scale = std::pow(nn, alpha * (p - s) - 1.0) * l(nn);
    const double term = scale * expect;
    if (term > scale * moment_s * (1.0 + 1e-9) + 1e-15) rep.terms_bounded = false;
    rep.final_sum += term;
    if (4 * n > 3 * n_terms) last_quarter += term;
    ++rep.terms;
  }
  rep.tail_fraction = rep.final_sum > 0.0 ? last_quarter / rep.final_sum : 0.0;
  rep.tail_flat = rep.tail_fraction <= 0.02;
  return rep;
}

}  // namespace sublin

#endif
