#ifndef SUBLIN_TRANSFORMS_HPP
#define SUBLIN_TRANSFORMS_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sublin/errors.hpp"
#include "sublin/piecewise_linear.hpp"

namespace sublin {

/// Truncation to [-c, c]: x -> max(-c, min(x, c)).  Lipschitz constant 1.
inline PiecewiseLinearFn clip(double c) {
  if (!(c > 0.0)) throw domain_error("clip: level must be > 0");
  auto f = PiecewiseLinearFn::from_knots(0.0, {{-c, -c}, {c, c}}, 0.0);
  f.declare_range(-c, c);
  return f;
}

/// The part clipped away: x -> x - clip(c)(x).  Zero on [-c, c].
inline PiecewiseLinearFn overshoot(double c) {
  if (!(c > 0.0)) throw domain_error("overshoot: level must be > 0");
  return PiecewiseLinearFn::from_knots(1.0, {{-c, 0.0}, {c, 0.0}}, 1.0);
}

/// x -> max(x, 0).
inline PiecewiseLinearFn positive_part() {
  return PiecewiseLinearFn::from_knots(0.0, {{0.0, 0.0}}, 1.0);
}

/// Even plateau-and-flank cutoff: 1 on [-mu, mu], 0 outside [-1, 1], linear
/// in between.  Sandwiched between the indicators of {|x| <= mu} and
/// {|x| <= 1}, non-increasing in |x|, Lipschitz with constant 1/(1-mu).
struct SmoothingG {
  double mu = 0.5;

  explicit SmoothingG(double mu_ = 0.5) : mu(mu_) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("smoothing: mu must be in (0,1)");
  }

  double operator()(double x) const {
    const double ax = std::abs(x);
    if (ax <= mu) return 1.0;
    if (ax >= 1.0) return 0.0;
    return (1.0 - ax) / (1.0 - mu);
  }

  PiecewiseLinearFn as_piecewise() const {
    auto f = PiecewiseLinearFn::from_knots(
        0.0, {{-1.0, 0.0}, {-mu, 1.0}, {mu, 1.0}, {1.0, 0.0}}, 0.0);
    f.declare_range(0.0, 1.0);
    return f;
  }
};

inline double g_eval(const SmoothingG& g, double x) { return g(x); }

/// Dyadic-block bump: 1 for 2^((j-1)a) <= |x| <= 2^(ja), 0 for
/// |x| <= mu*2^((j-1)a) and |x| >= (1+mu)*2^(ja), linear flanks.  Even.
inline double gj_eval(const SmoothingG& g, double alpha, int j, double x) {
  if (!(alpha > 0.0)) throw domain_error("block bump: alpha must be > 0");
  if (j < 1) throw domain_error("block bump: j must be >= 1");
  const double a = std::exp2((j - 1) * alpha);
  const double b = std::exp2(j * alpha);
  const double ax = std::abs(x);
  if (ax <= g.mu * a) return 0.0;
  if (ax < a) return (ax - g.mu * a) / (a - g.mu * a);
  if (ax <= b) return 1.0;
  if (ax < (1.0 + g.mu) * b) return ((1.0 + g.mu) * b - ax) / (g.mu * b);
  return 0.0;
}

inline PiecewiseLinearFn gj_piecewise(const SmoothingG& g, double alpha, int j) {
  if (!(alpha > 0.0)) throw domain_error("block bump: alpha must be > 0");
  if (j < 1) throw domain_error("block bump: j must be >= 1");
  const double a = std::exp2((j - 1) * alpha);
  const double b = std::exp2(j * alpha);
  auto f = PiecewiseLinearFn::from_knots(0.0,
                                         {{-(1.0 + g.mu) * b, 0.0},
                                          {-b, 1.0},
                                          {-a, 1.0},
                                          {-g.mu * a, 0.0},
                                          {g.mu * a, 0.0},
                                          {a, 1.0},
                                          {b, 1.0},
                                          {(1.0 + g.mu) * b, 0.0}},
                                         0.0);
  f.declare_range(0.0, 1.0);
  return f;
}

/// Closed catalog of slowly varying functions.  The catalog is fixed (no
/// user-defined code) so the dyadic checks below can rely on closed forms.
struct SlowlyVaryingFn {
  enum class Kind { one, log, log_pow, loglog };

  Kind kind = Kind::one;
  double b = 1.0;  // exponent, log_pow only

  static SlowlyVaryingFn one() { return {Kind::one, 1.0}; }
  static SlowlyVaryingFn log() { return {Kind::log, 1.0}; }
  static SlowlyVaryingFn log_pow(double exponent) { return {Kind::log_pow, exponent}; }
  static SlowlyVaryingFn loglog() { return {Kind::loglog, 1.0}; }

  double operator()(double x) const {
    if (!(x >= 0.0)) throw domain_error("slowly varying: argument must be >= 0");
    switch (kind) {
      case Kind::one:
        return 1.0;
      case Kind::log:
        return std::log(std::exp(1.0) + x);
      case Kind::log_pow:
        return std::pow(std::log(std::exp(1.0) + x), b);
      case Kind::loglog:
        return std::log(std::exp(1.0) + std::log(std::exp(1.0) + x));
    }
    throw domain_error("slowly varying: unknown catalog member");
  }

  std::string name() const {
    switch (kind) {
      case Kind::one:
        return "one";
      case Kind::log:
        return "log";
      case Kind::log_pow:
        return "log^" + std::to_string(b);
      case Kind::loglog:
        return "loglog";
    }
    return "?";
  }
};

inline double slowly_varying_eval(const SlowlyVaryingFn& l, double x) { return l(x); }

/// Dyadic slow-variation diagnostic.  The gap |l(lambda*x)/l(x) - 1| for the
/// log-type catalog members decays like C/k at x = 2^k, so no fixed small
/// tolerance is reachable at k <= 40; instead the check accepts when the gap
/// either is already tiny or halves as k doubles (the C/k signature).
struct SlowVariationCheck {
  double lambda = 2.0;
  int k_max = 40;
  std::vector<std::pair<int, double>> ratios;  // (k, l(lambda*2^k)/l(2^k))
  double gap_mid = 0.0;
  double gap_final = 0.0;
  bool converging = false;
};

inline SlowVariationCheck check_slow_variation(const SlowlyVaryingFn& l, double lambda = 2.0,
                                               int k_max = 40) {
  if (!(lambda > 0.0)) throw domain_error("slow variation: lambda must be > 0");
  if (k_max < 4) throw domain_error("slow variation: k_max must be >= 4");
  SlowVariationCheck out;
  out.lambda = lambda;
  out.k_max = k_max;
  for (int k = 1; k <= k_max; ++k) {
    const double x = std::ldexp(1.0, k);
    out.ratios.emplace_back(k, l(lambda * x) / l(x));
  }
  out.gap_mid = std::abs(out.ratios[static_cast<std::size_t>(k_max / 2) - 1].second - 1.0);
  out.gap_final = std::abs(out.ratios.back().second - 1.0);
  out.converging = out.gap_final <= 1e-3 || out.gap_final <= 0.6 * out.gap_mid;
  return out;
}

/// Dyadic-scale behaviour of a catalog member:
///  (i)  block sup ratio sup_{2^k <= x < 2^(k+1)} l(x)/l(2^k) per k,
///  (ii) for r > 0, partial sums sum_{j<=k} 2^(jr) l(2^j) against 2^(kr) l(2^k),
///  (iii) for r < 0, tail sums sum_{j>=k} 2^(jr) l(2^j) against the same.
/// The bracketing constants are empirical (taken over the top half of k).
struct DyadicSumBracket {
  double r = 0.0;
  int k_max = 0;
  std::vector<std::pair<int, double>> block_sup;     // (k, sup ratio)
  bool block_converging = false;
  std::vector<std::pair<int, double>> series_ratio;  // (k, sum / (2^(kr) l(2^k)))
  double c1 = 0.0;  // empirical lower bracket
  double c2 = 0.0;  // empirical upper bracket
};

inline DyadicSumBracket check_dyadic_sums(const SlowlyVaryingFn& l, double r, int k_max) {
  if (r == 0.0) throw domain_error("dyadic series check: r must be nonzero");
  if (k_max < 10) throw domain_error("dyadic series check: k_max must be >= 10");
  DyadicSumBracket out;
  out.r = r;
  out.k_max = k_max;

  for (int k = 1; k <= k_max; ++k) {
    const double base = std::ldexp(1.0, k);
    const double lk = l(base);
    double sup = 0.0;
    for (int t = 0; t < 64; ++t) sup = std::max(sup, l(base * (1.0 + t / 64.0)) / lk);
    out.block_sup.emplace_back(k, sup);
  }
  const double gap_mid =
      std::abs(out.block_sup[static_cast<std::size_t>(k_max / 2) - 1].second - 1.0);
  const double gap_final = std::abs(out.block_sup.back().second - 1.0);
  out.block_converging = gap_final <= 1e-3 || gap_final <= 0.7 * gap_mid;

  const auto term = [&](int j) { return std::exp2(j * r) * l(std::ldexp(1.0, j)); };
  if (r > 0.0) {
    double sum = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      sum += term(k);
      out.series_ratio.emplace_back(k, sum / term(k));
    }
  } else {
    for (int k = 1; k <= k_max; ++k) {
      double sum = 0.0;
      for (int j = k; j <= 1000; ++j) {
        const double t = term(j);
        sum += t;
        if (t <= 1e-16 * sum) break;
      }
      out.series_ratio.emplace_back(k, sum / term(k));
    }
  }
  double lo = out.series_ratio.back().second, hi = lo;
  for (int k = k_max / 2; k <= k_max; ++k) {
    const double v = out.series_ratio[static_cast<std::size_t>(k) - 1].second;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.c1 = lo;
  out.c2 = hi;
  return out;
}

}  // namespace sublin

#endif
