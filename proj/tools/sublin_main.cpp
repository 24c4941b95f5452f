// Batch entry point.  Exit codes: 0 success, 1 verification failure,
// 2 input/domain/hypothesis error, 3 policy error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sublin/cli.hpp>

namespace {

struct SubBinding {
  CLI::App* sub = nullptr;
  std::string name;
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out = ".";
  bool assert_flag = false;
  bool report_flag = false;
};

int dispatch(const std::string& name, const sublin::cli::Options& opts) {
  if (name == "axioms") return sublin::cli::run_axioms(opts);
  if (name == "verify-bounds") return sublin::cli::run_verify_bounds(opts);
  if (name == "estimate-k") return sublin::cli::run_estimate_k(opts);
  if (name == "wlln") return sublin::cli::run_wlln(opts);
  if (name == "series") return sublin::cli::run_series(opts);
  if (name == "lemmas") return sublin::cli::run_lemmas(opts);
  std::fprintf(stderr, "error: unknown subcommand %s\n", name.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toolkit for finite sub-linear expectation spaces"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"axioms", "randomized checks of the defining properties on a family"},
      {"verify-bounds", "tail-bound soak or explicit-instance verification"},
      {"estimate-k", "dominating-constant certificate for a family"},
      {"wlln", "law-of-large-numbers capacity decay experiment"},
      {"series", "weighted complete-convergence series experiment"},
      {"lemmas", "scale-function and series diagnostics"},
  };

  std::vector<SubBinding> bindings(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    SubBinding& b = bindings[i];
    b.name = commands[i].first;
    b.sub = app.add_subcommand(commands[i].first, commands[i].second);
    b.sub->add_option("--config", b.config, "JSON config path")->required();
    b.seed_opt = b.sub->add_option("--seed", b.seed, "override the config seed");
    b.sub->add_option("--out", b.out, "output directory (created if absent)");
    if (b.name == "verify-bounds") {
      b.sub->add_flag("--assert", b.assert_flag, "fail the run on bound violations (default)");
      b.sub->add_flag("--report-only", b.report_flag, "report without gating the exit code");
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (const SubBinding& b : bindings) {
    if (!b.sub->parsed()) continue;
    sublin::cli::Options opts;
    opts.config_path = b.config;
    if (b.seed_opt->count() > 0) opts.seed = b.seed;
    opts.out_dir = b.out;
    if (b.report_flag)
      opts.assert_mode = false;
    else if (b.assert_flag)
      opts.assert_mode = true;
    try {
      return dispatch(b.name, opts);
    } catch (const sublin::policy_error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 3;
    } catch (const sublin::error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  std::fprintf(stderr, "error: no subcommand given\n");
  return 2;
}
