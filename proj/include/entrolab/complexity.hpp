#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entrolab/covers.hpp"
#include "entrolab/error.hpp"
#include "entrolab/independent_set.hpp"
#include "entrolab/metric.hpp"
#include "entrolab/parallel.hpp"
#include "entrolab/point_set.hpp"
#include "entrolab/set_cover.hpp"

namespace entrolab {

/// Sentinel separation of a one-point set; above every grain in [0, 1].
inline constexpr double kSingletonSeparation = 2.0;

inline double metric_span(const PointSet& a, const DistanceMatrix& d) {
  if (a.none()) fail(ErrorKind::EmptySubset, "metric_span of an empty set");
  const auto members = a.members();
  double worst = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    const auto row = d.row(x);
    double nearest = std::numeric_limits<double>::infinity();
    for (auto m : members) nearest = std::min(nearest, row[m]);
    worst = std::max(worst, nearest);
  }
  return worst;
}

inline double metric_sep(const PointSet& a, const DistanceMatrix& d) {
  if (a.none()) fail(ErrorKind::EmptySubset, "metric_sep of an empty set");
  const auto m = a.members();
  if (m.size() == 1) return kSingletonSeparation;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) best = std::min(best, d(m[i], m[j]));
  return best;
}

struct CountResult {
  std::size_t value = 0;
  bool exact = false;
  std::uint64_t nodes = 0;
};

namespace detail {

inline void require_grain(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) fail(ErrorKind::InvalidGrain, "grain must be a finite value >= 0");
}

}  // namespace detail

/// Closed d-balls of radius eps around every point.
inline std::vector<PointSet> closed_balls(const DistanceMatrix& d, double eps) {
  std::vector<PointSet> balls;
  balls.reserve(d.size());
  for (std::size_t x = 0; x < d.size(); ++x) balls.push_back(detail::ball(d, x, eps));
  return balls;
}

/// Graph joining distinct points at distance <= eps.
inline Graph closeness_graph(const DistanceMatrix& d, double eps) {
  Graph g(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto row = d.row(i);
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (row[j] <= eps) g.add_edge(i, j);
  }
  return g;
}

/// Smallest A with metric_span(A, d) <= eps, i.e. a minimum dominating set.
inline CountResult spanning_count(const DistanceMatrix& d, double eps, SolveMode mode = SolveMode::Exact,
                                  const SolverBudget& budget = {}) {
  detail::require_grain(eps);
  const auto r = solve_set_cover(d.size(), closed_balls(d, eps), mode, budget);
  return {r.value, r.exact, r.nodes};
}

/// Largest A with metric_sep(A, d) > eps, i.e. a maximum independent set of
/// the closeness graph.
inline CountResult separated_count(const DistanceMatrix& d, double eps, SolveMode mode = SolveMode::Exact,
                                   const SolverBudget& budget = {}) {
  detail::require_grain(eps);
  const auto r = solve_independent_set(closeness_graph(d, eps), mode, budget);
  return {r.value, r.exact, r.nodes};
}

inline CountResult min_spanning_count(const FiniteMetricSpace& space, const EndoMap& map, std::size_t n, double eps,
                                      SolveMode mode = SolveMode::Exact, const SolverBudget& budget = {}) {
  return spanning_count(bowen_metric(space, map, n).matrix(), eps, mode, budget);
}

inline CountResult max_separated_count(const FiniteMetricSpace& space, const EndoMap& map, std::size_t n, double eps,
                                       SolveMode mode = SolveMode::Exact, const SolverBudget& budget = {}) {
  return separated_count(bowen_metric(space, map, n).matrix(), eps, mode, budget);
}

/// CovNum of the n-step refinement of a.
inline SubcoverResult cover_complexity(const EndoMap& map, std::size_t n, const Cover& a,
                                       SolveMode mode = SolveMode::Exact, const SolverBudget& budget = {}) {
  return min_subcover_size(dyn_refine_reduced(map, n, a), mode, budget);
}

/// Non-decreasing sequence a_1..a_N of positive counts.
class RateSequence {
 public:
  RateSequence() = default;
  explicit RateSequence(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) fail(ErrorKind::InvalidRates, "rate sequence is empty");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] < 1) fail(ErrorKind::InvalidRates, "a_" + std::to_string(i + 1) + " is zero");
      if (i > 0 && counts_[i] < counts_[i - 1])
        fail(ErrorKind::InvalidRates, "a_" + std::to_string(i + 1) + " < a_" + std::to_string(i));
    }
  }

  std::size_t horizon() const noexcept { return counts_.size(); }
  /// 1-based access: a_n.
  std::size_t operator[](std::size_t n) const { return counts_.at(n - 1); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }

 private:
  std::vector<std::size_t> counts_;
};

/// Entry n-1 holds ln(a_n) / n.
inline std::vector<double> log_rate(const RateSequence& rates) {
  std::vector<double> out(rates.horizon());
  for (std::size_t n = 1; n <= rates.horizon(); ++n)
    out[n - 1] = std::log(static_cast<double>(rates[n])) / static_cast<double>(n);
  return out;
}

/// Inclusive 1-based range of horizons.
struct Window {
  std::size_t lo = 1;
  std::size_t hi = 1;
  friend bool operator==(const Window&, const Window&) = default;
};

/// Upper half of 1..N.
inline Window default_window(std::size_t horizon) { return {horizon / 2 + 1, std::max<std::size_t>(horizon, 1)}; }

inline double log_lim(const RateSequence& rates, Window w) {
  if (w.lo < 1 || w.lo > w.hi || w.hi > rates.horizon())
    fail(ErrorKind::WindowEmpty, "window [" + std::to_string(w.lo) + "," + std::to_string(w.hi) +
                                     "] is not inside 1.." + std::to_string(rates.horizon()));
  const auto lr = log_rate(rates);
  return *std::max_element(lr.begin() + static_cast<std::ptrdiff_t>(w.lo - 1),
                           lr.begin() + static_cast<std::ptrdiff_t>(w.hi));
}

inline double log_lim(const RateSequence& rates) { return log_lim(rates, default_window(rates.horizon())); }

enum class Method { Cover, Span, Sep };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Cover: return "cover";
    case Method::Span: return "span";
    case Method::Sep: return "sep";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "cover") return Method::Cover;
  if (s == "span") return Method::Span;
  if (s == "sep") return Method::Sep;
  fail(ErrorKind::ConfigError, "unknown method '" + s + "'");
}

struct EntropyEstimate {
  Method method = Method::Span;
  double eps = 0.0;
  RateSequence rates;
  /// Solver output before the running-max envelope.
  std::vector<std::size_t> raw_counts;
  std::vector<double> log_rates;
  double loglim = 0.0;
  Window window;
  std::vector<bool> exact;
  /// True when greedy fallbacks broke monotonicity in n and the running
  /// maximum was substituted.
  bool envelope_applied = false;
  /// Cover method only: best loglim over the grid's uniform disk covers whose
  /// diameter is at least eps.
  std::optional<double> catalogue_loglim;
};

struct SweepOptions {
  SolveMode mode = SolveMode::Exact;
  SolverBudget budget{};
  std::optional<Window> window;
  /// 0 means worker_count().
  std::size_t threads = 0;
};

inline void validate_eps_grid(const std::vector<double>& grid) {
  if (grid.empty()) fail(ErrorKind::InvalidGrain, "grain grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0))
      fail(ErrorKind::InvalidGrain, "grain " + std::to_string(grid[i]) + " is outside (0, 1]");
    if (i > 0 && !(grid[i] < grid[i - 1]))
      fail(ErrorKind::InvalidGrain, "grain grid is not strictly decreasing at entry " + std::to_string(i));
  }
}

/// Geometric grid start, start*ratio, ... with `count` entries.
inline std::vector<double> geometric_grid(double start, double ratio, std::size_t count) {
  std::vector<double> g;
  double v = start;
  for (std::size_t i = 0; i < count; ++i, v *= ratio) g.push_back(v);
  return g;
}

namespace detail {

struct Cell {
  std::size_t value = 0;
  bool exact = false;
};

template <class Solve>
Cell solve_with_fallback(SolveMode mode, Solve&& solve) {
  if (mode == SolveMode::Exact) {
    try {
      const auto r = solve(SolveMode::Exact);
      return {r.value, r.exact};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactBudgetExceeded) throw;
    }
  }
  const auto r = solve(SolveMode::Greedy);
  return {r.value, false};
}

inline EntropyEstimate assemble(Method method, double eps, const std::vector<Cell>& cells, Window window) {
  EntropyEstimate e;
  e.method = method;
  e.eps = eps;
  std::vector<std::size_t> env;
  for (const auto& c : cells) {
    e.raw_counts.push_back(c.value);
    e.exact.push_back(c.exact);
    const std::size_t v = env.empty() ? c.value : std::max(env.back(), c.value);
    if (v != c.value) e.envelope_applied = true;
    env.push_back(v);
  }
  e.rates = RateSequence(std::move(env));
  e.log_rates = log_rate(e.rates);
  e.window = window;
  e.loglim = log_lim(e.rates, window);
  return e;
}

}  // namespace detail

/// Fills the (eps, n) table for each requested method. Cells at one horizon
/// run in parallel; all cells share one Bowen matrix per horizon.
/// Results are keyed by method, one estimate per grain in grid order.
inline std::map<Method, std::vector<EntropyEstimate>> pressure_sweep(const FiniteMetricSpace& space,
                                                                     const EndoMap& map,
                                                                     const std::vector<Method>& methods,
                                                                     const std::vector<double>& grid,
                                                                     std::size_t n_max, const SweepOptions& opt = {}) {
  validate_eps_grid(grid);
  if (n_max < 2) fail(ErrorKind::InvalidHorizon, "sweep horizon must be >= 2");
  if (methods.empty()) fail(ErrorKind::ConfigError, "no methods requested");
  if (map.size() != space.size()) fail(ErrorKind::SpaceMismatch, "map and space sizes differ");
  const Window window = opt.window.value_or(default_window(n_max));
  if (window.lo < 1 || window.lo > window.hi || window.hi > n_max)
    fail(ErrorKind::WindowEmpty, "window does not fit the horizon");
  const std::size_t workers = opt.threads ? opt.threads : worker_count();

  std::vector<Method> order;
  for (auto m : {Method::Cover, Method::Span, Method::Sep})
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) order.push_back(m);

  const std::size_t g = grid.size();
  // table[method slot][eps index][n-1]
  std::vector<std::vector<std::vector<detail::Cell>>> table(order.size(),
                                                            std::vector<std::vector<detail::Cell>>(g));
  std::vector<Cover> seeds, refined;
  const bool want_cover = std::find(order.begin(), order.end(), Method::Cover) != order.end();
  if (want_cover) {
    for (double e : grid) seeds.push_back(reduce_to_maximal(free_udc(space, e).cover));
    refined = seeds;
  }

  BowenMetric bowen = BowenMetric::first(space, map);
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > 1) {
      if (want_cover) {
        parallel_for(g, workers, [&](std::size_t i) {
          refined[i] = Cover(space, detail::maximal_pieces(detail::join_pieces(
                                        seeds[i].pieces(), detail::pullback_pieces(map, refined[i].pieces()))));
        });
      }
      if (order.size() > 1 || !want_cover) bowen = bowen.next();
    }
    const std::size_t cells = order.size() * g;
    std::vector<detail::Cell> out(cells);
    parallel_for(cells, workers, [&](std::size_t c) {
      const Method m = order[c / g];
      const std::size_t i = c % g;
      const double eps = grid[i];
      switch (m) {
        case Method::Cover:
          out[c] = detail::solve_with_fallback(
              opt.mode, [&](SolveMode sm) { return min_subcover_size(refined[i], sm, opt.budget); });
          break;
        case Method::Span:
          out[c] = detail::solve_with_fallback(
              opt.mode, [&](SolveMode sm) { return spanning_count(bowen.matrix(), eps, sm, opt.budget); });
          break;
        case Method::Sep:
          out[c] = detail::solve_with_fallback(
              opt.mode, [&](SolveMode sm) { return separated_count(bowen.matrix(), eps, sm, opt.budget); });
          break;
      }
    });
    for (std::size_t c = 0; c < cells; ++c) table[c / g][c % g].push_back(out[c]);
  }

  std::map<Method, std::vector<EntropyEstimate>> result;
  for (std::size_t s = 0; s < order.size(); ++s) {
    auto& ests = result[order[s]];
    for (std::size_t i = 0; i < g; ++i) ests.push_back(detail::assemble(order[s], grid[i], table[s][i], window));
  }
  if (want_cover) {
    auto& ests = result[Method::Cover];
    std::vector<double> diam(g);
    for (std::size_t i = 0; i < g; ++i) diam[i] = diameter(seeds[i]);
    for (std::size_t i = 0; i < g; ++i) {
      std::optional<double> best;
      for (std::size_t j = 0; j < g; ++j)
        if (diam[j] >= grid[i]) best = std::max(best.value_or(ests[j].loglim), ests[j].loglim);
      ests[i].catalogue_loglim = best;
    }
  }
  return result;
}

inline std::vector<EntropyEstimate> pressure_sweep(const FiniteMetricSpace& space, const EndoMap& map, Method method,
                                                   const std::vector<double>& grid, std::size_t n_max,
                                                   const SweepOptions& opt = {}) {
  return pressure_sweep(space, map, std::vector<Method>{method}, grid, n_max, opt).at(method);
}

struct Extrapolation {
  double value = 0.0;
  double spread = 0.0;
  bool stabilized = false;
  double tolerance = 0.05;
  /// loglim per grain, in grid order.
  std::vector<double> loglims;
};

/// Reads the plateau across grains: the loglim at the smallest grain, and the
/// spread (max - min) of the loglims at the last three grains.
inline Extrapolation entropy_extrapolate(const std::vector<EntropyEstimate>& estimates, double tolerance = 0.05) {
  if (estimates.size() < 3) fail(ErrorKind::InsufficientGrid, "need at least three grains to extrapolate");
  for (std::size_t i = 1; i < estimates.size(); ++i)
    if (!(estimates[i].eps < estimates[i - 1].eps))
      fail(ErrorKind::InsufficientGrid, "estimates are not ordered by decreasing grain");
  Extrapolation x;
  x.tolerance = tolerance;
  for (const auto& e : estimates) x.loglims.push_back(e.loglim);
  x.value = x.loglims.back();
  const auto tail = x.loglims.end() - 3;
  const auto [lo, hi] = std::minmax_element(tail, x.loglims.end());
  x.spread = *hi - *lo;
  x.stabilized = x.spread <= tolerance;
  return x;
}

}  // namespace entrolab
