#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrolab/app.hpp"

namespace {

struct SharedFlags {
  std::string config;
  std::string system;
  std::string eps_grid;
  std::string methods;
  std::size_t n_max = 0;
  std::string mode;
  std::uint64_t budget = 0;
  std::string out;
  std::string format;
};

void add_shared_flags(CLI::App& cmd, SharedFlags& f) {
  cmd.add_option("--config", f.config, "JSON config file; flags override its values");
  cmd.add_option("--system", f.system, "KIND[:key=value,...], e.g. rotation:p=1,q=509");
  cmd.add_option("--eps-grid", f.eps_grid, "comma-separated grains, strictly decreasing in (0, 1]");
  cmd.add_option("--n-max", f.n_max, "largest horizon n");
  cmd.add_option("--mode", f.mode, "exact or greedy");
  cmd.add_option("--budget", f.budget, "node budget for each exact solve");
  cmd.add_option("--out", f.out, "output directory");
}

bool given(const CLI::App& cmd, const std::string& name) {
  const auto* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

entrolab::RunConfig build_config(const SharedFlags& f, const CLI::App& cmd, bool for_verify) {
  using namespace entrolab;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.system.empty()) {
    cfg.system = parse_system_arg(f.system);
    cfg.system_given = true;
  }
  if (!f.eps_grid.empty()) {
    const auto grid = parse_eps_grid_arg(f.eps_grid);
    (for_verify ? cfg.verify.eps_grid : cfg.eps_grid) = grid;
  }
  if (!f.methods.empty()) cfg.methods = parse_methods_arg(f.methods);
  if (given(cmd, "--n-max")) (for_verify ? cfg.verify.n_max : cfg.n_max) = f.n_max;
  if (!f.mode.empty()) {
    if (f.mode != "exact" && f.mode != "greedy") fail(ErrorKind::ConfigError, "mode must be exact or greedy");
    cfg.mode = f.mode == "exact" ? SolveMode::Exact : SolveMode::Greedy;
  }
  if (given(cmd, "--budget")) (for_verify ? cfg.verify.budget : cfg.budget).max_nodes = f.budget;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.format.empty()) cfg.format = parse_format(f.format);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy of finite dynamical systems by covers, spanning sets and separated sets"};
  app.require_subcommand(1);

  SharedFlags est_flags, ver_flags, cat_flags;
  auto* estimate = app.add_subcommand("estimate", "sweep grains and horizons, write tables and a summary");
  add_shared_flags(*estimate, est_flags);
  estimate->add_option("--methods", est_flags.methods, "comma-separated subset of cover,span,sep");
  estimate->add_option("--format", est_flags.format, "csv, json or both");

  auto* verify = app.add_subcommand("verify", "run the invariant suites on a system or the default corpus");
  add_shared_flags(*verify, ver_flags);

  auto* cat = app.add_subcommand("cat", "run the order-theory lemma checks");
  std::string fixtures;
  cat->add_option("--config", cat_flags.config, "JSON config file (its 'cat' section)");
  cat->add_option("--out", cat_flags.out, "output directory");
  cat->add_option("fixtures", fixtures, "fixture JSON file or directory; bundled random corpus when omitted");

  auto* report = app.add_subcommand("report", "turn sweep JSON artifacts into a tidy CSV");
  std::vector<std::string> artifacts;
  std::string report_out;
  report->add_option("artifacts", artifacts, "sweep_<method>.json files")->required();
  report->add_option("--out", report_out, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : entrolab::kExitConfig;
  }

  try {
    if (*estimate) return entrolab::cmd_estimate(build_config(est_flags, *estimate, false), std::cout);
    if (*verify) return entrolab::cmd_verify(build_config(ver_flags, *verify, true), std::cout, std::cerr);
    if (*cat) {
      const auto cfg = build_config(cat_flags, *cat, false);
      return entrolab::cmd_cat(cfg, fixtures.empty() ? std::nullopt : std::optional<std::string>(fixtures), std::cout,
                               std::cerr);
    }
    if (*report)
      return entrolab::cmd_report(artifacts,
                                  report_out.empty() ? std::nullopt : std::optional<std::string>(report_out), std::cout);
  } catch (const entrolab::Error& e) {
    std::cerr << "entrolab: " << e.what() << "\n";
    return entrolab::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "entrolab: internal error: " << e.what() << "\n";
    return entrolab::kExitInternal;
  }
  return entrolab::kExitInternal;
}
