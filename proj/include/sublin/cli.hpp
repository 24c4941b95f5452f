#ifndef SUBLIN_CLI_HPP
#define SUBLIN_CLI_HPP

// Subcommand bodies for the batch binary.  Each run_* loads a JSON config,
// writes its report files into the output directory, and returns the exit
// code for a *verification* outcome (0 ok, 1 failed assertions).  Input,
// domain, and hypothesis problems are thrown (exit 2 at main); policy
// violations throw policy_error (exit 3).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sublin/io.hpp"
#include "sublin/sublin.hpp"

namespace sublin::cli {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // --seed override
  std::string out_dir = ".";
  std::optional<bool> assert_mode;    // --assert / --report-only override
};

namespace detail {

inline std::filesystem::path prepare_out(const Options& o) {
  const std::filesystem::path p = o.out_dir.empty() ? "." : o.out_dir;
  std::filesystem::create_directories(p);
  return p;
}

inline json load_config(const Options& o, std::filesystem::path& base) {
  if (o.config_path.empty()) throw structural_error("config: --config is required");
  base = std::filesystem::path(o.config_path).parent_path();
  return load_json(o.config_path);
}

/// A config section is either inline JSON or a path (relative to the config).
inline json section(const json& cfg, const std::string& key,
                    const std::filesystem::path& base) {
  if (!cfg.contains(key)) throw structural_error("config: missing \"" + key + "\"");
  const json& v = cfg.at(key);
  if (v.is_string()) return load_json((base / v.get<std::string>()).string());
  return v;
}

inline std::uint64_t resolve_seed(const Options& o, const json& cfg) {
  if (o.seed) return *o.seed;
  return cfg.value("seed", std::uint64_t{0});
}

inline bool resolve_assert(const Options& o, const json& cfg) {
  if (o.assert_mode) return *o.assert_mode;
  const std::string policy = cfg.value("policy", "assert");
  if (policy == "assert") return true;
  if (policy == "report-only") return false;
  throw structural_error("config: policy must be \"assert\" or \"report-only\"");
}

inline HomogeneousModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("values") || !j.contains("members"))
    throw structural_error("model: needs \"values\" and \"members\"");
  HomogeneousModel m;
  m.values = sublin::detail::double_array(j.at("values"), "model values");
  for (const auto& w : j.at("members"))
    m.member_weights.push_back(sublin::detail::weights_of(w));
  m.validate();
  return m;
}

inline EndDirection direction_from_string(const std::string& s) {
  if (s == "upper") return EndDirection::upper;
  if (s == "lower") return EndDirection::lower;
  if (s == "both") return EndDirection::both;
  throw structural_error("config: direction must be upper, lower, or both");
}

/// Structural certificate for a family whose product tag was verified at
/// construction; estimation is reserved for untagged families.
inline ENDCertificate structural_certificate(const MeasureFamily& f) {
  ENDCertificate cert;
  cert.kind = ENDCertificate::Kind::certified;
  cert.K = 1.0;
  cert.direction = EndDirection::both;
  cert.evidence = f.structure() == FamilyStructure::homogeneous_product
                      ? "verified homogeneous product factorization"
                      : "verified product factorization";
  return cert;
}

inline json bound_report_to_json(const BoundReport& r, const ENDCertificate& cert) {
  json j;
  j["bound"] = r.theorem;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  j["vacuous"] = r.vacuous;
  j["hypotheses_ok"] = r.hypotheses_ok;
  j["chain_ok"] = r.chain_ok;
  j["mean_shift_ok"] = r.mean_shift_ok;
  j["asserted"] = r.asserted;
  j["note"] = r.note;
  json chain = json::array();
  for (const auto& [name, value] : r.chain) chain.push_back({{name, value}});
  j["chain"] = chain;
  j["certificate"] = certificate_to_json(cert);
  return j;
}

}  // namespace detail

/// axioms: randomized probes of the defining properties on a loaded family.
/// Writes axioms_report.json; exit 0 iff every check passed.
inline int run_axioms(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const MeasureFamily f = family_from_json(detail::section(cfg, "family", base));
  const int probes = cfg.value("probes", 100);
  const std::uint64_t seed = detail::resolve_seed(opts, cfg);

  const AxiomReport rep = check_axioms(f, probes, seed);

  json out;
  out["all_pass"] = rep.all_pass;
  out["probes"] = rep.probes;
  out["seed"] = rep.seed;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj;
    cj["name"] = c.name;
    cj["performed"] = c.performed;
    cj["failed"] = c.failed;
    cj["witnesses"] = c.witnesses;
    checks.push_back(cj);
  }
  out["checks"] = checks;
  save_json((detail::prepare_out(opts) / "axioms_report.json").string(), out);
  return rep.all_pass ? 0 : 1;
}

/// verify-bounds: either a seeded soak of generated certified instances or a
/// single explicit instance from files.  Soak writes bounds_soak.csv +
/// bounds_summary.json; explicit writes bound_report.json.  In assert mode a
/// non-vacuous bound failure exits 1; estimating K under assert exits 3.
inline int run_verify_bounds(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const bool assert_mode = detail::resolve_assert(opts, cfg);
  const std::filesystem::path out = detail::prepare_out(opts);
  const std::string mode = cfg.value("mode", "soak");

  if (mode == "soak") {
    const std::uint64_t instances = cfg.value("instances", std::uint64_t{1000});
    const std::string form = cfg.value("form", "both");
    if (form != "bounded" && form != "general" && form != "both")
      throw structural_error("config: form must be bounded, general, or both");
    // two_sided: true, false, or "mixed" (default) = derived per instance.
    const json two_cfg = cfg.value("two_sided", json("mixed"));
    const std::uint64_t seed = detail::resolve_seed(opts, cfg);

    CsvWriter csv((out / "bounds_soak.csv").string(),
                  {"seed", "n", "p", "eps_or_x", "lhs", "rhs", "slack", "branch"});
    const Rng soak = Rng(seed).child("soak");
    std::uint64_t failures = 0, non_vacuous = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
      Rng rng = soak.child(i);
      const bool bounded = form == "bounded" || (form == "both" && i % 2 == 0);
      const bool two = two_cfg.is_boolean() ? two_cfg.get<bool>() : rng.bernoulli(0.5);
      const VerificationInstance inst =
          bounded ? random_bounded_instance(rng, two) : random_unbounded_instance(rng, two);
      const BoundReport rep =
          bounded ? verify_bounded_tail_bound(inst.end.family, inst.end.coordinates,
                                              inst.threshold, inst.p,
                                              inst.end.certificate, two)
                  : verify_general_tail_bound(inst.end.family, inst.end.coordinates,
                                              inst.threshold, inst.p,
                                              inst.end.certificate, two);
      if (!rep.vacuous) ++non_vacuous;
      const bool fail = (!rep.pass && !rep.vacuous) || !rep.hypotheses_ok ||
                        !rep.chain_ok || !rep.mean_shift_ok;
      if (fail) ++failures;
      std::string branch = bounded ? "bounded" : "general";
      if (two) branch += "-two-sided";
      if (rep.vacuous) branch += "-vacuous";
      csv.row({std::to_string(i), std::to_string(inst.end.coordinates.coords()),
               fmt17(inst.p), fmt17(inst.threshold), fmt17(rep.lhs), fmt17(rep.rhs),
               fmt17(rep.slack), branch});
    }

    json summary;
    summary["seed"] = seed;
    summary["instances"] = instances;
    summary["form"] = form;
    summary["failures"] = failures;
    summary["non_vacuous"] = non_vacuous;
    summary["non_vacuous_fraction"] =
        instances ? static_cast<double>(non_vacuous) / static_cast<double>(instances) : 0.0;
    summary["policy"] = assert_mode ? "assert" : "report-only";
    save_json((out / "bounds_summary.json").string(), summary);
    return assert_mode && failures > 0 ? 1 : 0;
  }

  if (mode != "explicit") throw structural_error("config: mode must be soak or explicit");

  const MeasureFamily f = family_from_json(detail::section(cfg, "family", base));
  const RandomVector x = vector_from_json(f.space(), detail::section(cfg, "vector", base));
  if (!cfg.contains("p")) throw structural_error("config: missing \"p\"");
  const double p = cfg.at("p").get<double>();
  const bool two = cfg.value("two_sided", false);
  const bool has_eps = cfg.contains("eps");
  const bool has_x = cfg.contains("x");
  if (has_eps == has_x)
    throw structural_error(
        "config: provide exactly one of \"eps\" (bounded form) or \"x\" (general form)");

  ENDCertificate cert;
  if (f.structure() != FamilyStructure::general) {
    cert = detail::structural_certificate(f);
  } else {
    if (assert_mode)
      throw policy_error("cannot assert on an estimated constant; use --report-only");
    cert = estimate_K(f, x, MonotoneTestGrid::standard_for(x), EndDirection::both);
  }

  const BoundReport rep =
      has_eps ? verify_bounded_tail_bound(f, x, cfg.at("eps").get<double>(), p, cert, two)
              : verify_general_tail_bound(f, x, cfg.at("x").get<double>(), p, cert, two);
  save_json((out / "bound_report.json").string(), detail::bound_report_to_json(rep, cert));
  if (!assert_mode) return 0;
  if (!rep.hypotheses_ok)
    throw hypothesis_error("instance violates the bound's hypotheses; see bound_report.json");
  const bool ok = (rep.pass || rep.vacuous) && rep.chain_ok && rep.mean_shift_ok;
  return ok ? 0 : 1;
}

/// estimate-k: structural certificate for tagged families, otherwise a grid
/// search (reported as a lower bound).  Writes certificate.json.
inline int run_estimate_k(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const MeasureFamily f = family_from_json(detail::section(cfg, "family", base));
  const RandomVector x = vector_from_json(f.space(), detail::section(cfg, "vector", base));
  const EndDirection direction =
      detail::direction_from_string(cfg.value("direction", "both"));

  ENDCertificate cert;
  if (f.structure() != FamilyStructure::general) {
    cert = detail::structural_certificate(f);
    cert.direction = direction;
  } else if (cfg.contains("grid")) {
    const json& g = cfg.at("grid");
    cert = estimate_K(f, x,
                      MonotoneTestGrid::standard(g.at("lo").get<double>(),
                                                 g.at("hi").get<double>()),
                      direction);
  } else {
    cert = estimate_K(f, x, MonotoneTestGrid::standard_for(x), direction);
  }
  save_json((detail::prepare_out(opts) / "certificate.json").string(),
            certificate_to_json(cert));
  return 0;
}

/// wlln: law-of-large-numbers capacity decay for a homogeneous model.
/// Writes wlln.csv (unified experiment schema; weight column is 1) and
/// wlln_summary.json.
inline int run_wlln(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const HomogeneousModel model =
      detail::model_from_json(detail::section(cfg, "model", base));
  if (!cfg.contains("eps")) throw structural_error("config: missing \"eps\"");
  const double eps = cfg.at("eps").get<double>();
  if (!cfg.contains("n_grid")) throw structural_error("config: missing \"n_grid\"");
  std::vector<std::size_t> n_grid;
  for (const auto& v : cfg.at("n_grid")) {
    if (!v.is_number_unsigned()) throw structural_error("config: n_grid must be positive integers");
    n_grid.push_back(v.get<std::size_t>());
  }
  std::optional<double> delta;
  if (cfg.contains("delta") && !cfg.at("delta").is_null())
    delta = cfg.at("delta").get<double>();

  const WllnReport rep = wlln_experiment(model, n_grid, eps, delta);

  const std::filesystem::path out = detail::prepare_out(opts);
  CsvWriter csv((out / "wlln.csv").string(),
                {"n", "weight", "cap_low", "cap_high", "term", "partial_sum"});
  double partial = 0.0;
  for (const auto& pt : rep.points) {
    partial += pt.cap_mid;
    csv.row({std::to_string(pt.n), fmt17(1.0), fmt17(pt.cap_lo), fmt17(pt.cap_hi),
             fmt17(pt.cap_mid), fmt17(partial)});
  }

  json summary;
  summary["eps"] = rep.eps;
  summary["mu_low"] = rep.mu_low;
  summary["mu_up"] = rep.mu_up;
  summary["delta"] = rep.delta;
  summary["exact_fit"] = rep.exact_fit;
  if (!rep.points.empty()) {
    const auto& last = rep.points.back();
    summary["final_n"] = last.n;
    summary["final_cap_low"] = last.cap_lo;
    summary["final_cap_high"] = last.cap_hi;
    summary["final_cap_mid"] = last.cap_mid;
    summary["final_v_form"] = last.v_form;
  }
  save_json((out / "wlln_summary.json").string(), summary);
  return 0;
}

/// series: weighted complete-convergence series for a homogeneous model.
/// Writes series.csv and series_summary.json; hypothesis violations throw.
inline int run_series(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const HomogeneousModel model =
      detail::model_from_json(detail::section(cfg, "model", base));

  SeriesConfig scfg;
  if (!cfg.contains("p") || !cfg.contains("alpha") || !cfg.contains("eps"))
    throw structural_error("config: series needs \"p\", \"alpha\", and \"eps\"");
  scfg.p = cfg.at("p").get<double>();
  scfg.alpha = cfg.at("alpha").get<double>();
  scfg.eps = cfg.at("eps").get<double>();
  scfg.l = slowly_varying_from_json(cfg.value("l", json()));
  const std::string weights = cfg.value("weights", "constant-one");
  if (weights == "constant-one")
    scfg.weights = WeightKind::constant_one;
  else if (weights == "bounded-random")
    scfg.weights = WeightKind::bounded_random;
  else
    throw structural_error("config: weights must be constant-one or bounded-random");
  scfg.q = cfg.value("q", 2.0);
  scfg.n_max = cfg.value("n_max", std::size_t{200});
  if (cfg.contains("delta") && !cfg.at("delta").is_null())
    scfg.delta = cfg.at("delta").get<double>();
  scfg.seed = detail::resolve_seed(opts, cfg);
  scfg.two_sided = cfg.value("two_sided", false);

  const SeriesReport rep = complete_convergence_report(model, scfg);

  const std::filesystem::path out = detail::prepare_out(opts);
  CsvWriter csv((out / "series.csv").string(),
                {"n", "weight", "cap_low", "cap_high", "term", "partial_sum"});
  for (const auto& pt : rep.points)
    csv.row({std::to_string(pt.n), fmt17(pt.weight), fmt17(pt.cap_lo), fmt17(pt.cap_hi),
             fmt17(pt.term), fmt17(pt.partial_sum)});

  json summary;
  summary["regime"] = rep.regime;
  summary["alpha_p"] = rep.alpha_p;
  summary["p"] = scfg.p;
  summary["alpha"] = scfg.alpha;
  summary["eps"] = scfg.eps;
  summary["l"] = scfg.l.name();
  summary["weights"] = to_string(scfg.weights);
  summary["q"] = scfg.q;
  summary["n_max"] = scfg.n_max;
  summary["seed"] = scfg.seed;
  summary["two_sided"] = scfg.two_sided;
  summary["choquet_hypothesis"] = rep.choquet_hypothesis;
  summary["moment_p"] = rep.moment_p;
  summary["upper_mean"] = rep.upper_mean;
  summary["lower_mean"] = rep.lower_mean;
  summary["weight_C"] = rep.weight_C;
  summary["final_partial_sum"] = rep.final_partial_sum;
  summary["decay_slope"] = rep.decay_slope;
  summary["decay_fit_ok"] = rep.decay_fit_ok;
  summary["max_mean_shift"] = rep.max_mean_shift;
  summary["delta"] = rep.delta;
  summary["exact_fit"] = rep.exact_fit;
  summary["skipped_zero_support"] = rep.skipped_zero_support;
  save_json((out / "series_summary.json").string(), summary);
  return 0;
}

/// lemmas: scale-function diagnostics.  Sections are optional; those present
/// run and land in lemmas.json.  Exit 1 if an internal consistency flag
/// (term domination) fails.
inline int run_lemmas(const Options& opts) {
  std::filesystem::path base;
  const json cfg = detail::load_config(opts, base);
  const std::filesystem::path out = detail::prepare_out(opts);
  json report;
  bool ok = true;

  const SlowlyVaryingFn l = slowly_varying_from_json(cfg.value("l", json()));
  report["l"] = l.name();

  if (cfg.contains("slow_variation")) {
    const json& s = cfg.at("slow_variation");
    const SlowVariationCheck chk = check_slow_variation(
        l, s.value("lambda", 2.0), s.value("k_max", 40));
    json j;
    j["lambda"] = chk.lambda;
    j["k_max"] = chk.k_max;
    j["gap_mid"] = chk.gap_mid;
    j["gap_final"] = chk.gap_final;
    j["converging"] = chk.converging;
    json ratios = json::array();
    for (const auto& [k, r] : chk.ratios) ratios.push_back({{"k", k}, {"ratio", r}});
    j["ratios"] = ratios;
    report["slow_variation"] = j;
  }

  if (cfg.contains("dyadic_sums")) {
    const json& s = cfg.at("dyadic_sums");
    if (!s.contains("r")) throw structural_error("config: dyadic_sums needs \"r\"");
    const DyadicSumBracket chk =
        check_dyadic_sums(l, s.at("r").get<double>(), s.value("k_max", 20));
    json j;
    j["r"] = chk.r;
    j["k_max"] = chk.k_max;
    j["block_converging"] = chk.block_converging;
    j["c1"] = chk.c1;
    j["c2"] = chk.c2;
    json ratios = json::array();
    for (const auto& [k, r] : chk.series_ratio) ratios.push_back({{"k", k}, {"ratio", r}});
    j["series_ratio"] = ratios;
    report["dyadic_sums"] = j;
  }

  const bool needs_family = cfg.contains("tail_series") || cfg.contains("smoothed_moment");
  if (needs_family) {
    const MeasureFamily f = family_from_json(detail::section(cfg, "family", base));
    const RandomVector x = vector_from_json(f.space(), detail::section(cfg, "vector", base));

    if (cfg.contains("tail_series")) {
      const json& s = cfg.at("tail_series");
      if (!s.contains("p") || !s.contains("alpha"))
        throw structural_error("config: tail_series needs \"p\" and \"alpha\"");
      const TailSeriesReport chk = tail_series_check(
          f, x, s.at("p").get<double>(), s.at("alpha").get<double>(), l,
          s.value("c0", 1.0), s.value("theta", 2.0), s.value("n_limit", std::size_t{2000}));
      json j;
      j["choquet"] = chk.choquet;
      j["series"] = chk.series;
      j["nonzero_terms"] = chk.nonzero_terms;
      j["series_complete"] = chk.series_complete;
      j["theta_series"] = chk.theta_series;
      j["theta_terms"] = chk.theta_terms;
      j["note"] = chk.note;
      report["tail_series"] = j;
    }

    if (cfg.contains("smoothed_moment")) {
      const json& s = cfg.at("smoothed_moment");
      if (!s.contains("p") || !s.contains("alpha") || !s.contains("s"))
        throw structural_error("config: smoothed_moment needs \"p\", \"alpha\", \"s\"");
      const SmoothedMomentReport chk = smoothed_moment_check(
          f, x, s.at("p").get<double>(), s.at("alpha").get<double>(),
          s.at("s").get<double>(), s.value("mu", 0.5), l,
          s.value("n_terms", std::size_t{1000}));
      json j;
      j["s"] = chk.s;
      j["final_sum"] = chk.final_sum;
      j["terms"] = chk.terms;
      j["terms_bounded"] = chk.terms_bounded;
      j["tail_fraction"] = chk.tail_fraction;
      j["tail_flat"] = chk.tail_flat;
      report["smoothed_moment"] = j;
      ok = ok && chk.terms_bounded;
    }
  }

  save_json((out / "lemmas.json").string(), report);
  return ok ? 0 : 1;
}

}  // namespace sublin::cli

#endif
