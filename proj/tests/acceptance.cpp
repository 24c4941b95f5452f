// Acceptance gate: eleven numbered end-to-end checks, one line of output
// each, nonzero exit if any fails.  Every check compares library results
// against either an independent oracle (direct summation, Riemann grids,
// log-gamma binomials, subset tables) or a closed-form/structural fact, at
// the stated tolerance and within the stated time budget.
//
// Usage: acceptance [path-to-cli-binary]
// The CLI path is needed only by check 11 (determinism and exit codes).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sublin/sublin.hpp"

namespace {

using namespace sublin;

// ---------------------------------------------------------------------------
// Harness

struct Gate {
  int failures = 0;

  template <class Fn>
  void criterion(int id, const char* label, double budget_seconds, Fn&& body) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    std::string note;
    std::string reason;
    try {
      reason = body(note);
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    } catch (...) {
      reason = "unknown exception";
    }
    const double secs =
        std::chrono::duration<double>(clock::now() - start).count();
    if (reason.empty() && budget_seconds > 0.0 && secs > budget_seconds) {
      std::ostringstream os;
      os << "exceeded time budget (" << secs << " s > " << budget_seconds << " s)";
      reason = os.str();
    }
    const bool ok = reason.empty();
    std::printf("criterion %02d: %s (%7.2f s)  %s", id, ok ? "PASS" : "FAIL", secs, label);
    if (!note.empty()) std::printf("  [%s]", note.c_str());
    if (!reason.empty()) std::printf("  -- %s", reason.c_str());
    std::printf("\n");
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

/// Collects the first failure message; later ones are dropped.
class Check {
 public:
  void require(bool cond, const std::string& msg) {
    if (!cond && why_.empty()) why_ = msg;
  }
  bool ok() const { return why_.empty(); }
  const std::string& why() const { return why_; }

 private:
  std::string why_;
};

std::string at(const char* what, std::size_t i) {
  return std::string(what) + " at instance " + std::to_string(i);
}

std::vector<double> random_simplex(Rng& rng, std::size_t count) {
  std::vector<double> w(count);
  double sum = 0.0;
  for (auto& v : w) {
    v = rng.uniform(0.05, 1.0);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

const std::uint64_t kRootSeed = 20260819;

// ---------------------------------------------------------------------------
// 1. Randomized functional-property suite on generated families.

std::string run_axiom_suite(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("axioms");
  for (std::size_t i = 0; i < 200 && c.ok(); ++i) {
    Rng rng = root.child(i);
    const MeasureFamily f = random_family(rng, 6, 5);
    const AxiomReport rep = check_axioms(f, 100, 1000 + i);
    for (const auto& chk : rep.checks)
      c.require(chk.failed == 0, at(("property '" + chk.name + "' failed").c_str(), i));
    c.require(rep.all_pass, at("axiom probes failed", i));
  }
  note = "200 families x 100 probes, 7 properties";
  return c.why();
}

// ---------------------------------------------------------------------------
// 2. Exhaustive capacity identities on every event of 50 small spaces.

std::string run_capacity_identities(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("capacities");
  std::uint64_t masks_total = 0;
  for (std::size_t fam = 0; fam < 50 && c.ok(); ++fam) {
    Rng rng = root.child(fam);
    const MeasureFamily f = random_family(rng, 12, 5);
    const std::size_t atoms = static_cast<std::size_t>(f.space().atom_count);
    const std::size_t masks = std::size_t{1} << atoms;
    masks_total += masks;

    // Library capacities for every event, cross-checked against the oracle
    // subset-sum table, plus the pair identity against the complement.
    const std::vector<double> otable = oracle::upper_capacity_table(f);
    std::vector<CapacityPair> pairs(masks);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      const EventSet ev = EventSet::of(
          f.space(), [mask](std::int64_t a) { return (mask >> a) & 1U; });
      pairs[mask] = upper_capacity(f, ev);
      c.require(std::abs(pairs[mask].upper - otable[mask]) <= 1e-12,
                at("upper capacity disagrees with the subset-sum oracle", fam));
    }
    const std::size_t full = masks - 1;
    for (std::size_t mask = 0; mask < masks; ++mask)
      c.require(std::abs(pairs[mask].upper + pairs[full ^ mask].lower - 1.0) <= 1e-12,
                at("upper/lower pair identity violated", fam));

    // Sub-additivity of the upper capacity over all event pairs.
    for (std::size_t a = 0; a < masks && c.ok(); ++a)
      for (std::size_t b = a; b < masks; ++b)
        if (pairs[a | b].upper > pairs[a].upper + pairs[b].upper + 1e-12) {
          c.require(false, at("capacity sub-additivity violated", fam));
          break;
        }

    // Sandwich: 0.75*I_A <= I_A <= I_A + 0.5*I_complement pointwise, so the
    // upper expectations must bracket the capacity.
    for (std::size_t mask = 0; mask < masks && c.ok(); ++mask) {
      std::vector<double> lo_v(atoms, 0.0), hi_v(atoms, 0.5);
      for (std::size_t a = 0; a < atoms; ++a)
        if ((mask >> a) & 1U) {
          lo_v[a] = 0.75;
          hi_v[a] = 1.0;
        }
      const double lo = upper_expectation(f, RandomVector::single(f.space(), lo_v));
      const double hi = upper_expectation(f, RandomVector::single(f.space(), hi_v));
      c.require(lo <= pairs[mask].upper + 1e-12 && pairs[mask].upper <= hi + 1e-12,
                at("minorant/majorant sandwich violated", fam));
    }
  }
  note = "50 families, " + std::to_string(masks_total) + " events, all pairs";
  return c.why();
}

// ---------------------------------------------------------------------------
// 3. Choquet integral vs a 1e5-point Riemann oracle; one-member families
//    must reproduce the classical expectation exactly.

std::string run_choquet_oracle(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("choquet");
  for (std::size_t i = 0; i < 100 && c.ok(); ++i) {
    Rng rng = root.child(i);
    const MeasureFamily f = random_family(rng, 6, 4);
    std::vector<double> v(static_cast<std::size_t>(f.space().atom_count));
    for (auto& x : v) x = rng.uniform(-3.0, 3.0);
    const RandomVector x = RandomVector::single(f.space(), v);
    const double up = choquet_integral(f, x, CapacitySide::upper);
    const double low = choquet_integral(f, x, CapacitySide::lower);
    c.require(std::abs(up - oracle::riemann_choquet(f, x, true)) <= 1e-4,
              at("upper Choquet integral off the Riemann oracle", i));
    c.require(std::abs(low - oracle::riemann_choquet(f, x, false)) <= 1e-4,
              at("lower Choquet integral off the Riemann oracle", i));
    c.require(low <= up + 1e-12, at("lower Choquet exceeds upper", i));
  }
  const Rng single = Rng(kRootSeed).child("choquet-singleton");
  for (std::size_t i = 0; i < 30 && c.ok(); ++i) {
    Rng rng = single.child(i);
    const MeasureFamily f = random_family(rng, 6, 1);
    std::vector<double> v(static_cast<std::size_t>(f.space().atom_count));
    for (auto& x : v) x = rng.uniform(-3.0, 3.0);
    const RandomVector x = RandomVector::single(f.space(), v);
    const double mean = expectation(f.members().front(), x);
    c.require(std::abs(choquet_integral(f, x, CapacitySide::upper) - mean) <= 1e-12,
              at("one-member upper Choquet differs from the expectation", i));
    c.require(std::abs(choquet_integral(f, x, CapacitySide::lower) - mean) <= 1e-12,
              at("one-member lower Choquet differs from the expectation", i));
  }
  note = "100 Riemann comparisons at 1e-4, 30 one-member identities at 1e-12";
  return c.why();
}

// ---------------------------------------------------------------------------
// 4. Product-structured families: the grid search for the dominating
//    constant must come back as exactly 1.

std::string run_end_certification(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("endk");
  for (std::size_t i = 0; i < 100 && c.ok(); ++i) {
    Rng rng = root.child(i);
    // Alternate family kinds while cycling each kind through n = 1..4.
    const std::int64_t n = 1 + static_cast<std::int64_t>((i / 2) % 4);
    const std::int64_t members = rng.uniform_int(1, 3);

    EndFamily ef = [&]() -> EndFamily {
      if (i % 2 == 0) {
        const std::int64_t atoms = rng.uniform_int(2, 3);
        std::vector<double> values(static_cast<std::size_t>(atoms));
        for (auto& x : values) x = rng.uniform(-1.0, 1.0);
        std::vector<std::vector<double>> weights;
        for (std::int64_t j = 0; j < members; ++j)
          weights.push_back(random_simplex(rng, static_cast<std::size_t>(atoms)));
        return homogeneous_product_family(values, weights, n);
      }
      std::vector<std::vector<double>> coord_values(static_cast<std::size_t>(n));
      std::vector<std::vector<Measure>> marginals(static_cast<std::size_t>(members));
      std::vector<std::vector<std::vector<double>>> w(
          static_cast<std::size_t>(members),
          std::vector<std::vector<double>>(static_cast<std::size_t>(n)));
      for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t atoms = rng.uniform_int(2, 3);
        auto& cv = coord_values[static_cast<std::size_t>(k)];
        cv.resize(static_cast<std::size_t>(atoms));
        for (auto& x : cv) x = rng.uniform(-1.0, 1.0);
        for (std::int64_t j = 0; j < members; ++j)
          w[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
              random_simplex(rng, static_cast<std::size_t>(atoms));
      }
      for (std::int64_t j = 0; j < members; ++j) {
        auto& row = marginals[static_cast<std::size_t>(j)];
        for (std::int64_t k = 0; k < n; ++k) {
          const auto& cv = coord_values[static_cast<std::size_t>(k)];
          row.emplace_back(SampleSpace(static_cast<std::int64_t>(cv.size())),
                           w[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
        }
      }
      return product_family(marginals, coord_values);
    }();

    c.require(ef.certificate.certified() && ef.certificate.K == 1.0,
              at("structural certificate missing", i));
    const ENDCertificate est =
        estimate_K(ef.family, ef.coordinates,
                   MonotoneTestGrid::standard_for(ef.coordinates), EndDirection::both);
    c.require(std::abs(est.K - 1.0) <= 1e-9,
              at("grid estimate of the dominating constant is not 1", i));
  }
  note = "100 product-structured families, n <= 4, default grid";
  return c.why();
}

// ---------------------------------------------------------------------------
// 5. Bounded-summand tail bound soak: exact capacity vs closed form.

std::string run_bounded_soak(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("bounded-soak");
  for (std::size_t i = 0; i < 1000 && c.ok(); ++i) {
    Rng rng = root.child(i);
    const VerificationInstance inst = random_bounded_instance(rng, false);
    const BoundReport rep =
        verify_bounded_tail_bound(inst.end.family, inst.end.coordinates, inst.threshold,
                                  inst.p, inst.end.certificate, false);
    c.require(rep.asserted, at("constant not certified", i));
    c.require(rep.hypotheses_ok, at("generated instance violates its own hypotheses", i));
    c.require(rep.pass, at("exact tail capacity exceeds the closed-form bound", i));
    c.require(rep.slack >= -1e-9 * rep.rhs, at("negative slack beyond tolerance", i));
    c.require(rep.chain_ok, at("optimized exponential bound exceeds its closed form", i));
    double at_t_opt = 0.0, closed = 0.0;
    for (const auto& [name, value] : rep.chain) {
      if (name == "exp_bound_at_t_opt") at_t_opt = value;
      if (name == "exp_bound_closed_form") closed = value;
    }
    c.require(at_t_opt <= closed * (1.0 + 1e-9) + 1e-15,
              at("exponential-bound chain link broken", i));
    c.require(at_t_opt <= rep.rhs * (1.0 + 1e-9) + 1e-15,
              at("optimized bound exceeds the reported bound", i));
  }
  note = "1000 instances, zero tolerance for failures";
  return c.why();
}

// ---------------------------------------------------------------------------
// 6. General tail bound soak, one-sided plus a two-sided sub-soak.

std::string run_general_soak(std::string& note) {
  Check c;
  std::size_t non_vacuous_one = 0, non_vacuous_two = 0;
  const Rng one = Rng(kRootSeed).child("general-soak");
  for (std::size_t i = 0; i < 1000 && c.ok(); ++i) {
    Rng rng = one.child(i);
    const VerificationInstance inst = random_unbounded_instance(rng, false);
    const BoundReport rep =
        verify_general_tail_bound(inst.end.family, inst.end.coordinates, inst.threshold,
                                  inst.p, inst.end.certificate, false);
    c.require(rep.hypotheses_ok, at("generated instance violates its own hypotheses", i));
    c.require(rep.pass, at("exact tail capacity exceeds the bound", i));
    c.require(rep.chain_ok, at("decomposition chain inconsistent", i));
    if (!rep.vacuous) {
      ++non_vacuous_one;
      c.require(rep.mean_shift_ok, at("mean-shift total exceeds a quarter threshold", i));
    }
  }
  const Rng two = Rng(kRootSeed).child("general-soak-two-sided");
  for (std::size_t i = 0; i < 300 && c.ok(); ++i) {
    Rng rng = two.child(i);
    const VerificationInstance inst = random_unbounded_instance(rng, true);
    const BoundReport rep =
        verify_general_tail_bound(inst.end.family, inst.end.coordinates, inst.threshold,
                                  inst.p, inst.end.certificate, true);
    c.require(rep.hypotheses_ok,
              at("two-sided instance violates its own hypotheses", i));
    c.require(rep.pass, at("two-sided capacity exceeds the bound", i));
    c.require(rep.chain_ok, at("two-sided decomposition chain inconsistent", i));
    if (!rep.vacuous) {
      ++non_vacuous_two;
      c.require(rep.mean_shift_ok,
                at("two-sided mean-shift exceeds a quarter threshold", i));
    }
  }
  const double frac_one = static_cast<double>(non_vacuous_one) / 1000.0;
  const double frac_two = static_cast<double>(non_vacuous_two) / 300.0;
  c.require(frac_one >= 0.30, "one-sided non-vacuous fraction below 30%");
  c.require(frac_two >= 0.30, "two-sided non-vacuous fraction below 30%");
  std::ostringstream os;
  os << "non-vacuous fraction " << frac_one << " one-sided, " << frac_two << " two-sided";
  note = os.str();
  return c.why();
}

// ---------------------------------------------------------------------------
// 7. Scalar inequality grids: exponential-vs-cosh dominance, the moment
//    kernel's shape, and the cutoff sandwich/cover inequalities.

std::string run_inequality_grids(std::string& note) {
  Check c;
  const CoshDominanceReport cosh_rep = cosh_dominance_check();
  c.require(cosh_rep.pass && cosh_rep.points == 100000,
            "exp(x)-1-x <= 2(cosh x - 1) failed on the 1e5-point grid");

  // Kernel 2 sinh^2(x/2)/|x|^p: even in x, nondecreasing on [0, inf).
  for (double p : {1.0, 1.2, 1.5, 2.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = 12.0 * static_cast<double>(i) / 4000.0;
      const double h = H(x, p);
      c.require(std::abs(h - H(-x, p)) <= 1e-13 * std::max(1.0, h),
                "moment kernel is not even");
      c.require(h >= prev - 1e-12 * std::max(1.0, std::abs(h)),
                "moment kernel is not monotone on the positive axis");
      prev = h;
    }
  }

  // Plateau cutoff sandwich: indicator(|x| <= mu) <= g <= indicator(|x| <= 1),
  // and the dyadic-block cover of the scaled cutoff.
  for (double mu : {0.25, 0.5, 0.75}) {
    const SmoothingG g(mu);
    for (int i = 0; i <= 6000; ++i) {
      const double x = -1.5 + 3.0 * static_cast<double>(i) / 6000.0;
      const double v = g(x);
      c.require(v >= 0.0 && v <= 1.0, "cutoff leaves [0,1]");
      if (std::abs(x) <= mu) c.require(v == 1.0, "cutoff below the inner indicator");
      if (std::abs(x) > 1.0) c.require(v == 0.0, "cutoff above the outer indicator");
    }
    const double alpha = 1.0;
    for (double t : {0.5, 1.0, 2.0}) {
      for (int k : {1, 2, 4, 8}) {
        const double scale = std::exp2(k * alpha);
        const double top = scale * (1.0 + mu) * 1.5;
        for (int i = 0; i <= 3000; ++i) {
          const double x = -top + 2.0 * top * static_cast<double>(i) / 3000.0;
          const double pow_t = std::pow(std::abs(x), t);
          const double lhs = pow_t * g(x / scale);
          double rhs = 1.0;
          for (int j = 1; j <= k; ++j) rhs += pow_t * gj_eval(g, alpha, j, x);
          c.require(lhs <= rhs * (1.0 + 1e-12) + 1e-12,
                    "dyadic-block cover inequality violated");
        }
      }
    }
  }
  note = "cosh grid, kernel shape, cutoff sandwich and cover for mu in {1/4,1/2,3/4}";
  return c.why();
}

// ---------------------------------------------------------------------------
// 8. Law-of-large-numbers decay vs an exact binomial oracle.

std::string run_wlln_reproduction(std::string& note) {
  Check c;
  const HomogeneousModel model{{-1.0, 1.0}, {{0.5, 0.5}, {0.6, 0.4}}};
  const std::vector<std::size_t> grid{250, 1000, 4000};
  const WllnReport rep = wlln_experiment(model, grid, 0.05);
  c.require(rep.exact_fit, "unit spacing did not fit the lattice exactly");
  c.require(rep.points.size() == 3, "missing grid points");

  double prev = 1.0;
  for (std::size_t k = 0; k < rep.points.size() && c.ok(); ++k) {
    const auto& pt = rep.points[k];
    c.require(pt.cap_lo == pt.cap_hi, "bracket not tight despite exact fit");
    // Oracle: per-member binomial tails from log-gamma coefficients, using
    // the same thresholds the experiment derives from its mean band.
    const double t_low = static_cast<double>(pt.n) * (rep.mu_low - rep.eps);
    const double t_high = static_cast<double>(pt.n) * (rep.mu_up + rep.eps);
    double want = 0.0;
    for (double q : {0.5, 0.4})
      want = std::max(want, oracle::two_point_sum_less(static_cast<std::int64_t>(pt.n), q,
                                                       -1.0, 1.0, t_low) +
                                oracle::two_point_sum_greater(
                                    static_cast<std::int64_t>(pt.n), q, -1.0, 1.0, t_high));
    c.require(std::abs(pt.cap_mid - want) <= 1e-9,
              "capacity disagrees with the binomial oracle at n = " + std::to_string(pt.n));
    c.require(pt.cap_mid <= prev + 1e-15,
              "capacity sequence is not non-increasing at n = " + std::to_string(pt.n));
    prev = pt.cap_mid;
  }
  const auto& last = rep.points.back();
  c.require(last.cap_mid <= 0.01, "miss capacity above 0.01 at n = 4000");
  c.require(last.v_form >= 0.99, "inner capacity of the mean band below 0.99 at n = 4000");
  std::ostringstream os;
  os << "caps " << rep.points[0].cap_mid << " / " << rep.points[1].cap_mid << " / "
     << last.cap_mid;
  note = os.str();
  return c.why();
}

// ---------------------------------------------------------------------------
// 9. Complete-convergence series, exactly computed: terms vanish, partial
//    sums freeze, and the truncated-mean shift is zero for symmetric signs.

std::string run_series_stability(std::string& note) {
  Check c;
  const HomogeneousModel fair{{-1.0, 1.0}, {{0.5, 0.5}}};
  SeriesConfig cfg;
  cfg.p = 1.0;
  cfg.alpha = 1.5;
  cfg.eps = 0.5;
  cfg.l = SlowlyVaryingFn::one();
  cfg.weights = WeightKind::constant_one;
  cfg.n_max = 2000;
  const SeriesReport rep = complete_convergence_report(fair, cfg);
  c.require(rep.exact_fit && rep.delta == 1.0, "unit lattice spacing expected");
  c.require(rep.points.size() == 2000, "missing series points");
  for (const auto& pt : rep.points) {
    c.require(pt.cap_lo == pt.cap_hi,
              "bracket not tight at n = " + std::to_string(pt.n));
    if (pt.n >= 100)
      c.require(pt.term <= 1e-12, "term above 1e-12 at n = " + std::to_string(pt.n));
  }
  const double drift =
      rep.points[1999].partial_sum - rep.points[1499].partial_sum;
  c.require(std::abs(drift) < 1e-10, "partial sums move over the last quarter of the run");
  c.require(rep.max_mean_shift <= 1e-12,
            "truncated-mean shift nonzero for symmetric marginals");
  std::ostringstream os;
  os << "final partial sum " << rep.final_partial_sum << ", max mean shift "
     << rep.max_mean_shift;
  note = os.str();
  return c.why();
}

// ---------------------------------------------------------------------------
// 10. Lattice convolution vs direct enumeration on the explicit product
//     space, with an exactly fitting spacing (bracket width zero).

std::string run_lattice_cross_check(std::string& note) {
  Check c;
  const Rng root = Rng(kRootSeed).child("lattice");
  for (std::size_t i = 0; i < 50 && c.ok(); ++i) {
    Rng rng = root.child(i);
    const std::int64_t atoms = rng.uniform_int(2, 3);
    const std::int64_t n = rng.uniform_int(1, 8);
    const std::int64_t members = rng.uniform_int(1, 3);

    std::vector<double> values(static_cast<std::size_t>(atoms));
    for (auto& v : values)
      v = 0.125 * static_cast<double>(rng.uniform_int(-24, 24));
    std::vector<std::vector<double>> weights;
    for (std::int64_t j = 0; j < members; ++j)
      weights.push_back(random_simplex(rng, static_cast<std::size_t>(atoms)));
    std::vector<double> a(static_cast<std::size_t>(n));
    for (auto& x : a) x = static_cast<double>(rng.uniform_int(1, 3));
    const double threshold = rng.uniform(-6.0, 6.0);

    const EndFamily ef = homogeneous_product_family(values, weights, n);
    const RandomVector base = RandomVector::single(
        SampleSpace(atoms), values);
    const auto fit = exact_fit_delta(base, a);
    c.require(fit.has_value(), at("dyadic values should admit an exact spacing", i));
    if (!fit) continue;

    std::vector<Measure> marginals;
    for (std::int64_t j = 0; j < members; ++j)
      marginals.emplace_back(SampleSpace(atoms), weights[static_cast<std::size_t>(j)]);
    const RandomVector s = ef.coordinates.weighted_row_sum(a);

    for (TailSide side : {TailSide::greater, TailSide::less}) {
      const TailBracket br =
          family_tail_capacity(marginals, base, a, threshold, side, *fit);
      c.require(br.snap == 0.0 && br.lo == br.hi,
                at("bracket not tight despite exact-fit spacing", i));
      const EventSet ev = EventSet::of(ef.family.space(), [&](std::int64_t atom) {
        const double v = s.value(atom, 0);
        return side == TailSide::greater ? v > threshold : v < threshold;
      });
      const double exact = upper_capacity(ef.family, ev).upper;
      c.require(std::abs(br.mid() - exact) <= 1e-12,
                at("lattice capacity disagrees with direct enumeration", i));
    }
  }
  note = "50 instances, n <= 8, both tail sides, 1e-12";
  return c.why();
}

// ---------------------------------------------------------------------------
// 11. CLI determinism and exit-code contract.

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}

std::optional<std::string> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string run_cli_contract(std::string& note, const std::string& cli) {
  Check c;
  if (cli.empty()) return "CLI binary path not provided (argv[1])";

  namespace fs = std::filesystem;
  const fs::path dir = fs::path("acceptance_tmp");
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);

  struct Cmd {
    const char* name;
    const char* config;
    std::vector<const char*> outputs;
    int expect_exit;
  };
  const std::vector<Cmd> cmds = {
      {"axioms",
       R"({"seed": 7, "probes": 50,
           "family": {"atoms": 3, "members": [[0.2, 0.3, 0.5], [0.5, 0.25, 0.25]]}})",
       {"axioms_report.json"},
       0},
      {"verify-bounds",
       R"({"seed": 3, "mode": "soak", "instances": 60, "form": "both",
           "policy": "assert"})",
       {"bounds_soak.csv", "bounds_summary.json"},
       0},
      {"estimate-k",
       R"({"family": {"atoms": 2, "members": [[0.5, 0.5], [0.6, 0.4]]},
           "vector": {"values": [-1.0, 1.0]}, "direction": "both"})",
       {"certificate.json"},
       0},
      {"wlln",
       R"({"model": {"values": [-1, 1], "members": [[0.5, 0.5], [0.6, 0.4]]},
           "eps": 0.05, "n_grid": [50, 100, 200]})",
       {"wlln.csv", "wlln_summary.json"},
       0},
      {"series",
       R"({"model": {"values": [-1, 1], "members": [[0.5, 0.5]]},
           "p": 1.0, "alpha": 1.5, "eps": 0.5, "n_max": 120,
           "weights": "bounded-random", "seed": 11})",
       {"series.csv", "series_summary.json"},
       0},
      {"lemmas",
       R"({"l": {"kind": "log"},
           "slow_variation": {"lambda": 2.0, "k_max": 20},
           "dyadic_sums": {"r": 0.5, "k_max": 15},
           "tail_series": {"p": 1.0, "alpha": 1.0, "c0": 0.1, "theta": 2.0, "n_limit": 100},
           "smoothed_moment": {"p": 1.0, "alpha": 1.0, "s": 2.0, "mu": 0.5, "n_terms": 200},
           "family": {"atoms": 2, "members": [[0.5, 0.5]]},
           "vector": {"values": [-0.3, 0.9]}})",
       {"lemmas.json"},
       0},
  };

  for (const auto& cmd : cmds) {
    if (!c.ok()) break;
    const fs::path cfg = dir / (std::string(cmd.name) + ".json");
    write_text(cfg, cmd.config);
    const fs::path out_a = dir / (std::string(cmd.name) + "_a");
    const fs::path out_b = dir / (std::string(cmd.name) + "_b");
    const int rc_a = run_cli(cli, std::string(cmd.name) + " --config " + cfg.string() +
                                      " --out " + out_a.string());
    const int rc_b = run_cli(cli, std::string(cmd.name) + " --config " + cfg.string() +
                                      " --out " + out_b.string());
    c.require(rc_a == cmd.expect_exit,
              std::string(cmd.name) + ": expected exit " +
                  std::to_string(cmd.expect_exit) + ", got " + std::to_string(rc_a));
    c.require(rc_a == rc_b, std::string(cmd.name) + ": rerun exit code differs");
    for (const char* f : cmd.outputs) {
      const auto a = slurp(out_a / f);
      const auto b = slurp(out_b / f);
      c.require(a.has_value() && b.has_value(),
                std::string(cmd.name) + ": missing output " + f);
      if (a && b) {
        c.require(!a->empty(), std::string(cmd.name) + ": empty output " + f);
        c.require(*a == *b,
                  std::string(cmd.name) + ": rerun output differs byte-for-byte in " + f);
      }
    }
  }

  // Exit-code contract: hypothesis/input problems exit 2, policy refusals 3,
  // and an explicit passing instance exits 0.
  if (c.ok()) {
    const fs::path bad_series = dir / "bad_series.json";
    write_text(bad_series,
               R"({"model": {"values": [-1, 1], "members": [[0.5, 0.5]]},
                   "p": 0.5, "alpha": 1.0, "eps": 0.5, "n_max": 40})");
    c.require(run_cli(cli, "series --config " + bad_series.string() + " --out " +
                               (dir / "bad_series_out").string()) == 2,
              "series with an out-of-range exponent pair should exit 2");

    const fs::path bad_family = dir / "bad_family.json";
    write_text(bad_family, R"({"family": {"atoms": 2, "members": [[0.5, 0.4]]}})");
    c.require(run_cli(cli, "axioms --config " + bad_family.string() + " --out " +
                               (dir / "bad_family_out").string()) == 2,
              "axioms with non-normalized weights should exit 2");

    const fs::path policy = dir / "policy.json";
    write_text(policy,
               R"({"mode": "explicit", "policy": "assert", "p": 1.5, "x": 2.0,
                   "family": {"atoms": 2, "members": [[0.5, 0.5], [0.6, 0.4]]},
                   "vector": {"values": [-1.0, 1.0]}})");
    c.require(run_cli(cli, "verify-bounds --config " + policy.string() + " --out " +
                               (dir / "policy_out").string()) == 3,
              "asserting on an estimated constant should exit 3");

    const fs::path explicit_ok = dir / "explicit_ok.json";
    write_text(explicit_ok,
               R"({"mode": "explicit", "policy": "assert", "p": 2.0, "eps": 1.5,
                   "family": {"structure": "homogeneous-product",
                              "marginals": [[0.5, 0.5], [0.6, 0.4]], "n": 2},
                   "vector": {"values": [[-1, -1], [-1, 1], [1, -1], [1, 1]]}})");
    c.require(run_cli(cli, "verify-bounds --config " + explicit_ok.string() + " --out " +
                               (dir / "explicit_out").string()) == 0,
              "explicit certified instance should verify and exit 0");
    c.require(slurp(dir / "explicit_out" / "bound_report.json").has_value(),
              "explicit run should write its report");
  }

  if (c.ok()) fs::remove_all(dir, ec);
  note = "6 subcommands rerun byte-identical; exit codes 0/2/3 verified";
  return c.why();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  Gate gate;

  gate.criterion(1, "functional properties on random families", 5.0, run_axiom_suite);
  gate.criterion(2, "capacity identities, exhaustive over events", 30.0,
                 run_capacity_identities);
  gate.criterion(3, "Choquet integral vs Riemann oracle", 0.0, run_choquet_oracle);
  gate.criterion(4, "product families certify constant 1", 0.0, run_end_certification);
  gate.criterion(5, "bounded-summand tail bound soak", 60.0, run_bounded_soak);
  gate.criterion(6, "general tail bound soak", 120.0, run_general_soak);
  gate.criterion(7, "scalar inequality grids", 5.0, run_inequality_grids);
  gate.criterion(8, "mean-band capacity decay vs binomial oracle", 30.0,
                 run_wlln_reproduction);
  gate.criterion(9, "series terms vanish and partial sums freeze", 600.0,
                 run_series_stability);
  gate.criterion(10, "lattice law vs explicit product enumeration", 0.0,
                 run_lattice_cross_check);
  gate.criterion(11, "CLI determinism and exit codes", 0.0,
                 [&](std::string& note) { return run_cli_contract(note, cli); });

  if (gate.failures > 0) {
    std::printf("acceptance: %d criterion(s) failed\n", gate.failures);
    return 1;
  }
  std::printf("acceptance: all 11 criteria passed\n");
  return 0;
}
