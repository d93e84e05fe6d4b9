#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "entrolab/cat_suite.hpp"
#include "entrolab/complexity.hpp"
#include "entrolab/corpus.hpp"
#include "entrolab/error.hpp"
#include "entrolab/invariants.hpp"
#include "entrolab/serialize.hpp"
#include "entrolab/systems.hpp"

namespace entrolab {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitVerifyFailed = 4,
};

/// I/O and unreadable files map to 3, every other library error to 2.
inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::IoError:
    case ErrorKind::FileMalformed: return kExitIo;
    default: return kExitConfig;
  }
}

enum class OutputFormat { Csv, Json, Both };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  fail(ErrorKind::ConfigError, "format must be csv, json or both, not '" + s + "'");
}

struct VerifyCorpusConfig {
  std::size_t random_systems = 40;
  std::size_t min_points = 8;
  std::size_t max_points = 128;
  std::uint64_t seed = 3;
};

/// Everything a subcommand needs. Defaults reproduce the doubling-map run.
struct RunConfig {
  SystemSpec system{};
  /// True once a config file or --system names a system.
  bool system_given = false;
  std::vector<Method> methods{Method::Cover, Method::Span, Method::Sep};
  std::vector<double> eps_grid = geometric_grid(0.125, 0.5, 4);
  std::size_t n_max = 7;
  SolveMode mode = SolveMode::Exact;
  SolverBudget budget{};
  std::optional<Window> window;
  double tolerance = 0.05;
  std::string out = "entrolab_out";
  OutputFormat format = OutputFormat::Both;

  VerifyOptions verify{};
  VerifyCorpusConfig corpus{};
  CatOptions cat{};
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double_arg(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorKind::ConfigError, what + ": '" + s + "' is not a number");
  return v;
}

inline std::size_t parse_size_arg(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    fail(ErrorKind::ConfigError, what + ": '" + s + "' is not a non-negative integer");
  return v;
}

template <class T>
T json_get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::ConfigError, where + ": field '" + key + "' has the wrong type");
  }
}

inline void reject_unknown_keys(const Json& j, const std::vector<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      fail(ErrorKind::ConfigError, where + ": unknown field '" + it.key() + "'");
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || std::filesystem::path(p).is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal().string();
}

inline void set_system_param(SystemSpec& s, const std::string& key, const std::string& value,
                             const std::filesystem::path& base) {
  const std::string what = "system parameter '" + key + "'";
  if (key == "m") s.m = parse_size_arg(value, what);
  else if (key == "p") s.p = parse_size_arg(value, what);
  else if (key == "q") s.q = parse_size_arg(value, what);
  else if (key == "k") s.k = parse_size_arg(value, what);
  else if (key == "L") s.L = parse_size_arg(value, what);
  else if (key == "dist") s.dist_path = resolve_path(value, base);
  else if (key == "map") s.map_path = resolve_path(value, base);
  else if (key == "points") s.points_path = resolve_path(value, base);
  else if (key == "map_rule" || key == "rule") s.map_rule = parse_map_rule(value);
  else fail(ErrorKind::ConfigError, "unknown system parameter '" + key + "'");
}

}  // namespace detail

/// "KIND" or "KIND:key=value,key=value", e.g. "rotation:p=1,q=509".
inline SystemSpec parse_system_arg(const std::string& arg) {
  SystemSpec s;
  const auto colon = arg.find(':');
  s.kind = parse_system_kind(arg.substr(0, colon));
  if (colon == std::string::npos) return s;
  for (const auto& kv : detail::split(arg.substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, "system parameter '" + kv + "' lacks '='");
    detail::set_system_param(s, kv.substr(0, eq), kv.substr(eq + 1), {});
  }
  return s;
}

inline std::vector<double> parse_eps_grid_arg(const std::string& arg) {
  std::vector<double> g;
  for (const auto& part : detail::split(arg, ',')) g.push_back(detail::parse_double_arg(part, "eps grid entry"));
  return g;
}

inline std::vector<Method> parse_methods_arg(const std::string& arg) {
  std::vector<Method> m;
  for (const auto& part : detail::split(arg, ',')) m.push_back(parse_method(part));
  return m;
}

/// Applies a JSON config document over `cfg`. Relative input paths resolve
/// against `base` (the config file's directory).
inline void apply_config_json(RunConfig& cfg, const Json& j, const std::filesystem::path& base = {}) {
  const std::string where = "config";
  if (!j.is_object()) fail(ErrorKind::ConfigError, "config must be a JSON object");
  detail::reject_unknown_keys(j,
                              {"schema_version", "system", "methods", "eps_grid", "n_max", "mode", "budget", "window",
                               "tolerance", "out", "format", "verify", "cat"},
                              where);
  if (j.contains("schema_version") && detail::json_get<int>(j, "schema_version", where) != kSchemaVersion)
    fail(ErrorKind::ConfigError, "config schema_version must be " + std::to_string(kSchemaVersion));
  if (j.contains("system")) {
    const auto& s = j["system"];
    if (!s.is_object() || !s.contains("kind")) fail(ErrorKind::ConfigError, "config: 'system' needs a 'kind'");
    SystemSpec spec;
    spec.kind = parse_system_kind(detail::json_get<std::string>(s, "kind", "system"));
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (it.key() == "kind") continue;
      const std::string value = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
      detail::set_system_param(spec, it.key(), value, base);
    }
    cfg.system = spec;
    cfg.system_given = true;
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j["methods"]) {
      if (!m.is_string()) fail(ErrorKind::ConfigError, "config: methods must be strings");
      cfg.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  if (j.contains("eps_grid")) cfg.eps_grid = detail::json_get<std::vector<double>>(j, "eps_grid", where);
  if (j.contains("n_max")) cfg.n_max = detail::json_get<std::size_t>(j, "n_max", where);
  if (j.contains("mode")) {
    const auto m = detail::json_get<std::string>(j, "mode", where);
    if (m != "exact" && m != "greedy") fail(ErrorKind::ConfigError, "mode must be exact or greedy");
    cfg.mode = m == "exact" ? SolveMode::Exact : SolveMode::Greedy;
  }
  if (j.contains("budget")) cfg.budget.max_nodes = detail::json_get<std::uint64_t>(j, "budget", where);
  if (j.contains("window")) {
    const auto w = detail::json_get<std::vector<std::size_t>>(j, "window", where);
    if (w.size() != 2) fail(ErrorKind::ConfigError, "window must be [lo, hi]");
    cfg.window = Window{w[0], w[1]};
  }
  if (j.contains("tolerance")) cfg.tolerance = detail::json_get<double>(j, "tolerance", where);
  if (j.contains("out")) cfg.out = detail::resolve_path(detail::json_get<std::string>(j, "out", where), base);
  if (j.contains("format")) cfg.format = parse_format(detail::json_get<std::string>(j, "format", where));
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    const std::string w = "verify";
    detail::reject_unknown_keys(v,
                                {"eps_grid", "n_max", "budget", "max_points", "seed", "random_systems", "min_points",
                                 "max_random_points", "max_cover_pieces", "grain_covers"},
                                w);
    if (v.contains("eps_grid")) cfg.verify.eps_grid = detail::json_get<std::vector<double>>(v, "eps_grid", w);
    if (v.contains("n_max")) cfg.verify.n_max = detail::json_get<std::size_t>(v, "n_max", w);
    if (v.contains("budget")) cfg.verify.budget.max_nodes = detail::json_get<std::uint64_t>(v, "budget", w);
    if (v.contains("max_points")) cfg.verify.max_points = detail::json_get<std::size_t>(v, "max_points", w);
    if (v.contains("max_cover_pieces"))
      cfg.verify.max_cover_pieces = detail::json_get<std::size_t>(v, "max_cover_pieces", w);
    if (v.contains("grain_covers")) cfg.verify.grain_covers = detail::json_get<bool>(v, "grain_covers", w);
    if (v.contains("seed")) cfg.corpus.seed = detail::json_get<std::uint64_t>(v, "seed", w);
    if (v.contains("random_systems")) cfg.corpus.random_systems = detail::json_get<std::size_t>(v, "random_systems", w);
    if (v.contains("min_points")) cfg.corpus.min_points = detail::json_get<std::size_t>(v, "min_points", w);
    if (v.contains("max_random_points"))
      cfg.corpus.max_points = detail::json_get<std::size_t>(v, "max_random_points", w);
  }
  if (j.contains("cat")) {
    const auto& c = j["cat"];
    const std::string w = "cat";
    detail::reject_unknown_keys(c, {"preorders", "max_objects", "entangle_instances", "seed"}, w);
    if (c.contains("preorders")) cfg.cat.preorders = detail::json_get<std::size_t>(c, "preorders", w);
    if (c.contains("max_objects")) cfg.cat.max_objects = detail::json_get<std::size_t>(c, "max_objects", w);
    if (c.contains("entangle_instances"))
      cfg.cat.entangle_instances = detail::json_get<std::size_t>(c, "entangle_instances", w);
    if (c.contains("seed")) cfg.cat.seed = detail::json_get<std::uint64_t>(c, "seed", w);
  }
}

inline Json read_json_file(const std::string& path, ErrorKind parse_kind) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, path + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(parse_kind, path + ": " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  const Json j = read_json_file(path, ErrorKind::ConfigError);
  apply_config_json(cfg, j, std::filesystem::path(path).parent_path());
  return cfg;
}

inline void validate_run_config(const RunConfig& cfg) {
  if (cfg.methods.empty()) fail(ErrorKind::ConfigError, "no methods selected");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (cfg.methods[i] == cfg.methods[k])
        fail(ErrorKind::ConfigError, std::string("method '") + to_string(cfg.methods[i]) + "' is listed twice");
  for (std::size_t i = 0; i < cfg.eps_grid.size(); ++i)
    if (!(cfg.eps_grid[i] > 0.0 && cfg.eps_grid[i] <= 1.0))
      fail(ErrorKind::InvalidGrain, "eps grid entry " + std::to_string(i) + " (" + format_real(cfg.eps_grid[i]) +
                                        ") is outside (0, 1]");
  validate_eps_grid(cfg.eps_grid);
  if (cfg.n_max < 2) fail(ErrorKind::ConfigError, "n_max must be at least 2");
  if (cfg.budget.max_nodes == 0) fail(ErrorKind::ConfigError, "budget must be positive");
  if (!(cfg.tolerance >= 0.0)) fail(ErrorKind::ConfigError, "tolerance must be non-negative");
  if (cfg.window && (cfg.window->lo < 1 || cfg.window->lo > cfg.window->hi || cfg.window->hi > cfg.n_max))
    fail(ErrorKind::WindowEmpty, "window must satisfy 1 <= lo <= hi <= n_max");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, path.string() + ": cannot write");
  out << text;
  if (!out) fail(ErrorKind::IoError, path.string() + ": write failed");
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, dir + ": cannot create directory (" + ec.message() + ")");
}

/// Largest pairwise gap between the methods' extrapolated values.
inline Json discrepancy_json(const std::map<Method, Extrapolation>& x) {
  Json pairs = Json::array();
  double worst = 0.0;
  for (auto a = x.begin(); a != x.end(); ++a)
    for (auto b = std::next(a); b != x.end(); ++b) {
      const double d = std::abs(a->second.value - b->second.value);
      worst = std::max(worst, d);
      pairs.push_back({{"a", to_string(a->first)}, {"b", to_string(b->first)}, {"value", d}});
    }
  return {{"max", worst}, {"pairs", pairs}};
}

/// Runs the sweep and writes sweep_<method>.{csv,json} plus summary.json.
inline int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  validate_run_config(cfg);
  const DynamicalSystem sys = build_system(cfg.system);
  SweepOptions so;
  so.mode = cfg.mode;
  so.budget = cfg.budget;
  so.window = cfg.window;
  const auto sweep = pressure_sweep(sys.space, sys.map, cfg.methods, cfg.eps_grid, cfg.n_max, so);

  ensure_dir(cfg.out);
  const std::filesystem::path dir(cfg.out);
  std::map<Method, Extrapolation> extrapolations;
  Json estimates = Json::object();
  for (auto m : cfg.methods) {
    const auto& ests = sweep.at(m);
    const std::string stem = std::string("sweep_") + to_string(m);
    if (cfg.format != OutputFormat::Json) write_text_file(dir / (stem + ".csv"), sweep_csv_header() + sweep_csv_rows(ests));
    if (cfg.format != OutputFormat::Csv) {
      std::map<Method, std::vector<EntropyEstimate>> one{{m, ests}};
      write_text_file(dir / (stem + ".json"), sweep_json(one).dump(2) + "\n");
    }
    Json e;
    bool all_exact = true;
    for (const auto& est : ests)
      for (bool x : est.exact) all_exact = all_exact && x;
    e["mode"] = all_exact ? "exact" : (cfg.mode == SolveMode::Exact ? "mixed" : "greedy");
    if (ests.size() >= 3) {
      const auto x = entropy_extrapolate(ests, cfg.tolerance);
      extrapolations[m] = x;
      e["extrapolation"] = to_json(x);
    } else {
      e["extrapolation"] = nullptr;
      e["note"] = "fewer than three grains; no extrapolation";
    }
    if (m == Method::Cover && !ests.empty() && ests.back().catalogue_loglim)
      e["catalogue_loglim"] = *ests.back().catalogue_loglim;
    estimates[to_string(m)] = std::move(e);
  }

  Json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["system"] = {{"name", sys.name},
                       {"points", sys.space.size()},
                       {"scale_factor", sys.space.scale_factor()},
                       {"warnings", sys.warnings}};
  Json grid = Json::array();
  for (double e : cfg.eps_grid) grid.push_back(e);
  summary["eps_grid"] = grid;
  summary["n_max"] = cfg.n_max;
  summary["mode"] = to_string(cfg.mode);
  summary["budget"] = cfg.budget.max_nodes;
  const Window w = cfg.window.value_or(default_window(cfg.n_max));
  summary["window"] = {w.lo, w.hi};
  summary["estimates"] = std::move(estimates);
  if (extrapolations.size() >= 2) summary["discrepancy"] = discrepancy_json(extrapolations);
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");

  out << sys.name << " (" << sys.space.size() << " points), n <= " << cfg.n_max << "\n";
  for (auto m : cfg.methods) {
    out << "  " << std::left << std::setw(6) << to_string(m);
    for (const auto& est : sweep.at(m)) out << " eps=" << format_real(est.eps) << ":" << format_real(est.loglim);
    out << "\n";
  }
  if (summary.contains("discrepancy")) out << "  max discrepancy " << format_real(summary["discrepancy"]["max"].get<double>()) << "\n";
  out << "wrote " << cfg.out << "\n";
  return kExitOk;
}

/// Runs every invariant suite over the configured system, or over the
/// default corpus when none is given. Exit 4 on the first failing invariant.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  VerifyOptions vo = cfg.verify;
  validate_eps_grid(vo.eps_grid);
  if (vo.n_max < 1) fail(ErrorKind::ConfigError, "verify n_max must be at least 1");
  if (vo.budget.max_nodes == 0) fail(ErrorKind::ConfigError, "verify budget must be positive");
  std::vector<DynamicalSystem> systems;
  if (cfg.system_given) {
    systems.push_back(build_system(cfg.system));
  } else {
    if (cfg.corpus.min_points < 2 || cfg.corpus.min_points > cfg.corpus.max_points)
      fail(ErrorKind::ConfigError, "verify corpus needs 2 <= min_points <= max_random_points");
    systems = default_corpus(cfg.corpus.random_systems, cfg.corpus.min_points, cfg.corpus.max_points, cfg.corpus.seed);
  }
  for (const auto& s : systems)
    if (s.space.size() > vo.max_points)
      fail(ErrorKind::ConfigError, "verify guard |X| <= " + std::to_string(vo.max_points) + ": " + s.name + " has " +
                                       std::to_string(s.space.size()) + " points");

  InvariantLedger ledger;
  Json names = Json::array();
  for (const auto& s : systems) {
    verify_system(s, vo, ledger);
    names.push_back(s.name);
  }
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["systems"] = names;
  report["eps_grid"] = vo.eps_grid;
  report["n_max"] = vo.n_max;
  report["budget"] = vo.budget.max_nodes;
  report["skipped_cells"] = ledger.budget_exhausted();
  report["invariants"] = ledger.to_json();
  report["passed"] = ledger.all_passed();
  ensure_dir(cfg.out);
  write_text_file(std::filesystem::path(cfg.out) / "verify_report.json", report.dump(2) + "\n");

  for (const auto& r : ledger.reports())
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.instances << " instances, " << r.failures
        << " failures)\n";
  out << "skipped cells (budget or size cap): " << ledger.budget_exhausted() << "\n";
  if (const auto* f = ledger.first_failure()) {
    err << "entrolab: invariant '" << f->name << "' failed; first counterexample:\n" << f->first_failure.dump(2) << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

/// Runs the order-theory lemma battery on bundled random preorders, or on a
/// fixture file or directory.
inline int cmd_cat(const RunConfig& cfg, const std::optional<std::string>& fixtures, std::ostream& out,
                   std::ostream& err) {
  if (cfg.cat.max_objects < 1 || cfg.cat.max_objects > 6)
    fail(ErrorKind::ConfigError, "cat max_objects must lie in [1, 6]");
  std::optional<CatFixture> fx;
  if (fixtures) fx = load_cat_fixtures(*fixtures);
  const InvariantLedger ledger = run_cat_suite(cfg.cat, fx ? &*fx : nullptr);
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["source"] = fx ? Json(fx->sources) : Json("bundled");
  report["lemmas"] = ledger.to_json();
  report["passed"] = ledger.all_passed();
  ensure_dir(cfg.out);
  write_text_file(std::filesystem::path(cfg.out) / "cat_report.json", report.dump(2) + "\n");
  for (const auto& r : ledger.reports())
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.instances << " instances)\n";
  if (const auto* f = ledger.first_failure()) {
    err << "entrolab: lemma check '" << f->name << "' found a counterexample:\n" << f->first_failure.dump(2) << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

/// Tidy rows method,eps,n,log_rate from one or more sweep JSON artifacts.
inline std::string tidy_csv(const std::vector<std::string>& artifacts) {
  std::string csv = "method,eps,n,log_rate\n";
  for (const auto& path : artifacts) {
    const Json j = read_json_file(path, ErrorKind::FileMalformed);
    if (!j.is_object() || !j.contains("methods") || !j["methods"].is_object())
      fail(ErrorKind::FileMalformed, path + ": not a sweep artifact (no 'methods' object)");
    try {
      for (auto m = j["methods"].begin(); m != j["methods"].end(); ++m)
        for (auto e = m.value().begin(); e != m.value().end(); ++e) {
          const auto rates = e.value().at("log_rates").get<std::vector<double>>();
          for (std::size_t n = 0; n < rates.size(); ++n)
            csv += m.key() + ',' + e.key() + ',' + std::to_string(n + 1) + ',' + format_real(rates[n]) + '\n';
        }
    } catch (const Json::exception& e) {
      fail(ErrorKind::FileMalformed, path + ": " + e.what());
    }
  }
  return csv;
}

inline int cmd_report(const std::vector<std::string>& artifacts, const std::optional<std::string>& out_path,
                      std::ostream& out) {
  if (artifacts.empty()) fail(ErrorKind::ConfigError, "report needs at least one sweep artifact");
  const std::string csv = tidy_csv(artifacts);
  if (out_path) write_text_file(*out_path, csv);
  else out << csv;
  return kExitOk;
}

}  // namespace entrolab
