#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "entrolab/complexity.hpp"
#include "entrolab/corpus.hpp"
#include "entrolab/cover_lattice.hpp"
#include "entrolab/covers.hpp"
#include "entrolab/metric.hpp"
#include "entrolab/serialize.hpp"
#include "entrolab/systems.hpp"

namespace entrolab {

struct InvariantReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  /// Minimal reproducing instance of the first failure.
  Json first_failure;

  bool passed() const noexcept { return failures == 0; }
};

/// Accumulates pass/fail counts per invariant, in first-use order.
class InvariantLedger {
 public:
  template <class Detail>
  void record(const std::string& name, bool ok, Detail&& detail) {
    auto& r = find(name);
    ++r.instances;
    if (!ok && r.failures++ == 0) r.first_failure = detail();
  }

  void touch(const std::string& name) { find(name); }

  /// Counts an exact solve abandoned at the node budget; its checks are skipped.
  void note_budget_exhausted() { ++budget_exhausted_; }
  std::size_t budget_exhausted() const noexcept { return budget_exhausted_; }

  const std::vector<InvariantReport>& reports() const noexcept { return reports_; }

  bool all_passed() const {
    return std::all_of(reports_.begin(), reports_.end(), [](const auto& r) { return r.passed(); });
  }

  const InvariantReport* first_failure() const {
    for (const auto& r : reports_)
      if (!r.passed()) return &r;
    return nullptr;
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& r : reports_) {
      Json j;
      j["name"] = r.name;
      j["instances"] = r.instances;
      j["failures"] = r.failures;
      j["passed"] = r.passed();
      if (!r.passed()) j["first_failure"] = r.first_failure;
      arr.push_back(std::move(j));
    }
    return arr;
  }

 private:
  InvariantReport& find(const std::string& name) {
    for (auto& r : reports_)
      if (r.name == name) return r;
    reports_.push_back(InvariantReport{name, 0, 0, Json()});
    return reports_.back();
  }

  std::vector<InvariantReport> reports_;
  std::size_t budget_exhausted_ = 0;
};

struct VerifyOptions {
  std::vector<double> eps_grid{0.5, 0.25, 0.125, 0.0625};
  std::size_t n_max = 5;
  SolverBudget budget{200'000};
  /// Exact solvers are only trusted up to this many points.
  std::size_t max_points = 256;
  std::uint64_t seed = 7;
  /// Runs the free disk cover of every grain through the cover suites. Those
  /// covers have many pieces at coarse grains, so this is the slow part.
  bool grain_covers = true;
  /// Random partition covers drawn per grain for the cover suites.
  std::size_t random_covers = 2;
  /// A refined cover with more pieces than this is dropped from later checks.
  std::size_t max_cover_pieces = 5000;
  /// Cap on enumerated small subsets per cover in the Lebesgue lemma check.
  std::size_t lebesgue_subset_limit = 200'000;
};

/// JSON dump of a system small enough to paste into a fixture.
inline Json system_dump(const DynamicalSystem& sys) {
  Json j;
  j["system"] = sys.name;
  j["points"] = sys.space.size();
  if (sys.space.size() <= 32) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < sys.space.size(); ++i) {
      const auto r = sys.space.matrix().row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["dist"] = std::move(rows);
    j["map"] = sys.map.image();
  }
  return j;
}

struct LebesgueCheck {
  bool holds = true;
  bool truncated = false;
  std::size_t subsets = 0;
  std::vector<std::size_t> witness;
};

/// diam(b) < Leb(a) => a coarser than b, for every cover b at once: walks
/// all subsets of diameter < Leb(a) (a down-closed family) and checks each
/// lies inside a piece of a.
inline LebesgueCheck lebesgue_lemma_check(const Cover& a, std::size_t limit = 200'000) {
  LebesgueCheck r;
  const double leb = lebesgue_number(a);
  const auto& d = a.space().matrix();
  const std::size_t n = d.size();
  std::vector<std::size_t> members;
  PointSet current(n);
  auto inside_piece = [&] {
    return std::any_of(a.pieces().begin(), a.pieces().end(), [&](const PointSet& p) { return current.is_subset_of(p); });
  };
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!r.holds || r.truncated) return;
    for (std::size_t x = start; x < n; ++x) {
      bool small = true;
      for (auto m : members)
        if (!(d(m, x) < leb)) {
          small = false;
          break;
        }
      if (!small) continue;
      members.push_back(x);
      current.set(x);
      if (++r.subsets > limit) {
        r.truncated = true;
      } else if (!inside_piece()) {
        r.holds = false;
        r.witness = members;
      } else {
        self(self, x + 1);
      }
      current.reset(x);
      members.pop_back();
      if (!r.holds || r.truncated) return;
    }
  };
  rec(rec, 0);
  return r;
}

namespace detail {

/// Nearest-center partition around k random centers.
inline Cover random_partition(const FiniteMetricSpace& space, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = space.size();
  std::vector<std::size_t> centers(n);
  std::iota(centers.begin(), centers.end(), std::size_t{0});
  std::shuffle(centers.begin(), centers.end(), rng);
  centers.resize(std::min(k, n));
  std::vector<PointSet> pieces(centers.size(), PointSet(n));
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < centers.size(); ++c)
      if (space(x, centers[c]) < space(x, centers[best])) best = c;
    pieces[best].set(x);
  }
  std::vector<PointSet> nonempty;
  for (auto& p : pieces)
    if (p.any()) nonempty.push_back(std::move(p));
  return Cover(space, nonempty);
}

inline Cover relabel_cover(const Cover& a, const FiniteMetricSpace& space, const std::vector<std::size_t>& perm) {
  std::vector<PointSet> pieces;
  for (const auto& p : a.pieces()) {
    PointSet q(space.size());
    p.for_each([&](std::size_t x) { q.set(perm[x]); });
    pieces.push_back(std::move(q));
  }
  return Cover(space, pieces);
}

/// One refinement step b -> base v f*(b), reduced to maximal pieces, or
/// nothing once the piece count passes `cap`.
inline std::optional<Cover> refine_capped(const Cover& base, const std::optional<Cover>& prev, const EndoMap& f,
                                          std::size_t cap) {
  if (!prev || base.pieces().size() * prev->pieces().size() > cap * 64) return std::nullopt;
  auto pieces = maximal_pieces(join_pieces(base.pieces(), pullback_pieces(f, prev->pieces())));
  if (pieces.size() > cap) return std::nullopt;
  return Cover(base.space(), pieces);
}

}  // namespace detail

/// The system relabeled by perm: point i becomes perm[i].
inline DynamicalSystem relabel(const DynamicalSystem& sys, const std::vector<std::size_t>& perm) {
  const std::size_t n = sys.space.size();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.at(perm[i], perm[j]) = sys.space(i, j);
  std::vector<std::size_t> img(n);
  for (std::size_t i = 0; i < n; ++i) img[perm[i]] = perm[sys.map(i)];
  DynamicalSystem out;
  out.space = trusted_space(std::move(d));
  out.map = EndoMap(std::move(img), n);
  out.name = sys.name + "/relabeled";
  return out;
}

/// Runs every invariant suite on one system and records the outcomes.
inline void verify_system(const DynamicalSystem& sys, const VerifyOptions& opt, InvariantLedger& ledger) {
  const auto& space = sys.space;
  const auto& map = sys.map;
  const std::size_t n_pts = space.size();
  if (n_pts > opt.max_points)
    fail(ErrorKind::ConfigError, "verify guard: " + sys.name + " has " + std::to_string(n_pts) +
                                     " points, more than the limit of " + std::to_string(opt.max_points));
  const auto& grid = opt.eps_grid;
  const std::size_t g = grid.size();
  const double log_bound = 1.0 + std::log(static_cast<double>(n_pts));
  std::mt19937_64 rng(opt.seed ^ (n_pts * 0x9e3779b97f4a7c15ULL));

  auto fail_detail = [&](Json extra) {
    return [&sys, extra = std::move(extra)] {
      Json j = system_dump(sys);
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
      return j;
    };
  };
  auto exact_or_none = [&](auto&& solve) -> std::optional<std::size_t> {
    try {
      return solve().value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExactBudgetExceeded) throw;
      ledger.note_budget_exhausted();
      return std::nullopt;
    }
  };

  // Seed covers per grain: two uniform disk covers strictly finer than the
  // grain, random partitions of small diameter, and the singletons.
  std::vector<std::vector<Cover>> seeds(g);
  for (std::size_t i = 0; i < g; ++i) {
    for (double f : {0.45, 0.2}) {
      Cover c = reduce_to_maximal(free_udc(space, f * grid[i]).cover);
      if (diameter(c) < grid[i]) seeds[i].push_back(std::move(c));
    }
    for (std::size_t k = 0; k < opt.random_covers; ++k) {
      const std::size_t centers = std::max<std::size_t>(1, n_pts / (2 + k * 3));
      Cover c = detail::random_partition(space, centers, rng);
      if (diameter(c) < grid[i]) seeds[i].push_back(std::move(c));
    }
    seeds[i].push_back(Cover::singletons(space));
  }
  std::vector<std::vector<std::optional<Cover>>> refined(g);
  for (std::size_t i = 0; i < g; ++i) refined[i].assign(seeds[i].begin(), seeds[i].end());
  std::vector<std::vector<std::optional<std::size_t>>> prev_cov(g);
  for (std::size_t i = 0; i < g; ++i) prev_cov[i].assign(seeds[i].size(), std::nullopt);

  std::vector<Cover> udc(g);
  for (std::size_t i = 0; i < g; ++i) udc[i] = reduce_to_maximal(free_udc(space, grid[i]).cover);
  std::vector<std::optional<Cover>> udc_refined(udc.begin(), udc.end());
  if (!opt.grain_covers) udc_refined.assign(g, std::nullopt);

  // Per (grain, n) exact values for the monotonicity checks.
  std::vector<std::vector<std::optional<std::size_t>>> span_tab(g), sep_tab(g), cov_tab(g);
  const bool isometric = is_isometry(space, map);

  ledger.touch("bowen_metric");
  ledger.touch("sandwich_a");
  ledger.touch("sandwich_b");
  ledger.touch("monotone_in_n");
  ledger.touch("monotone_in_eps");
  ledger.touch("cover_monotone_in_seed");
  ledger.touch("isometry_nullity");
  ledger.touch("greedy_bracketing");
  ledger.touch("conjugacy");
  ledger.touch("lebesgue_lemma");
  ledger.touch("expansion");

  BowenMetric bowen = BowenMetric::first(space, map);
  std::optional<DistanceMatrix> previous;
  for (std::size_t n = 1; n <= opt.n_max; ++n) {
    if (n > 1) {
      bowen = bowen.next();
      for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t s = 0; s < seeds[i].size(); ++s) {
          const bool had = refined[i][s].has_value();
          refined[i][s] = detail::refine_capped(seeds[i][s], refined[i][s], map, opt.max_cover_pieces);
          if (had && !refined[i][s]) ledger.note_budget_exhausted();
        }
        const bool had = udc_refined[i].has_value();
        udc_refined[i] = detail::refine_capped(udc[i], udc_refined[i], map, opt.max_cover_pieces);
        if (had && !udc_refined[i]) ledger.note_budget_exhausted();
      }
    }
    const DistanceMatrix& dn = bowen.matrix();
    {
      bool ok = true;
      try {
        check_metric(dn);
      } catch (const Error&) {
        ok = false;
      }
      if (previous)
        for (std::size_t k = 0; k < dn.data().size() && ok; ++k) ok = dn.data()[k] >= previous->data()[k];
      ledger.record("bowen_metric", ok, fail_detail({{"n", n}}));
      previous = dn;
    }

    for (std::size_t i = 0; i < g; ++i) {
      const double eps = grid[i];
      const auto span = exact_or_none([&] { return spanning_count(dn, eps, SolveMode::Exact, opt.budget); });
      const auto span_half = exact_or_none([&] { return spanning_count(dn, eps / 2, SolveMode::Exact, opt.budget); });
      const auto sep = exact_or_none([&] { return separated_count(dn, eps, SolveMode::Exact, opt.budget); });
      const auto cov = udc_refined[i] ? exact_or_none([&] {
        return min_subcover_size(*udc_refined[i], SolveMode::Exact, opt.budget);
      }) : std::optional<std::size_t>{};
      span_tab[i].push_back(span);
      sep_tab[i].push_back(sep);
      cov_tab[i].push_back(cov);
      Json where = {{"eps", eps}, {"n", n}};

      if (span && sep && span_half) {
        Json j = where;
        j["span"] = *span;
        j["sep"] = *sep;
        j["span_half"] = *span_half;
        ledger.record("sandwich_a", *span <= *sep && *sep <= *span_half, fail_detail(j));
      }

      for (std::size_t s = 0; s < seeds[i].size(); ++s) {
        const Cover& a = seeds[i][s];
        if (!refined[i][s]) continue;
        const auto c = exact_or_none([&] { return min_subcover_size(*refined[i][s], SolveMode::Exact, opt.budget); });
        if (!c) continue;
        const double leb = lebesgue_number(a);
        const auto upper = exact_or_none([&] { return spanning_count(dn, leb / 2, SolveMode::Exact, opt.budget); });
        if (sep && upper) {
          Json j = where;
          j["seed"] = to_json(a);
          j["sep"] = *sep;
          j["cov"] = *c;
          j["span_leb_half"] = *upper;
          ledger.record("sandwich_b", *sep <= *c && *c <= *upper, fail_detail(j));
        }
        if (prev_cov[i][s]) {
          Json j = where;
          j["seed"] = to_json(a);
          ledger.record("monotone_in_n", *prev_cov[i][s] <= *c, fail_detail(j));
        }
        prev_cov[i][s] = c;
      }

      const auto gspan = spanning_count(dn, eps, SolveMode::Greedy);
      const auto gsep = separated_count(dn, eps, SolveMode::Greedy);
      const auto gcov = udc_refined[i] ? min_subcover_size(*udc_refined[i], SolveMode::Greedy) : SubcoverResult{};
      if (span) {
        Json j = where;
        j["exact_span"] = *span;
        j["greedy_span"] = gspan.value;
        ledger.record("greedy_bracketing",
                      gspan.value >= *span && static_cast<double>(gspan.value) <= *span * log_bound, fail_detail(j));
      }
      if (sep) {
        Json j = where;
        j["exact_sep"] = *sep;
        j["greedy_sep"] = gsep.value;
        ledger.record("greedy_bracketing", gsep.value <= *sep, fail_detail(j));
      }
      if (cov) {
        Json j = where;
        j["exact_cov"] = *cov;
        j["greedy_cov"] = gcov.value;
        ledger.record("greedy_bracketing",
                      gcov.value >= *cov && static_cast<double>(gcov.value) <= *cov * log_bound, fail_detail(j));
      }
    }
  }

  for (std::size_t i = 0; i < g; ++i) {
    for (auto* tab : {&span_tab, &sep_tab, &cov_tab}) {
      const auto& row = (*tab)[i];
      for (std::size_t n = 1; n < row.size(); ++n)
        if (row[n - 1] && row[n])
          ledger.record("monotone_in_n", *row[n - 1] <= *row[n],
                        fail_detail({{"eps", grid[i]}, {"n", n + 1}, {"before", *row[n - 1]}, {"after", *row[n]}}));
      if (i > 0) {
        const auto& coarser = (*tab)[i - 1];
        for (std::size_t n = 0; n < row.size(); ++n)
          if (coarser[n] && row[n])
            ledger.record("monotone_in_eps", *coarser[n] <= *row[n],
                          fail_detail({{"eps", grid[i]}, {"n", n + 1}, {"coarser", *coarser[n]}, {"finer", *row[n]}}));
      }
    }
    if (i > 0 && coarser_than(udc[i - 1], udc[i]))
      for (std::size_t n = 0; n < cov_tab[i].size(); ++n)
        if (cov_tab[i - 1][n] && cov_tab[i][n])
          ledger.record("cover_monotone_in_seed", *cov_tab[i - 1][n] <= *cov_tab[i][n],
                        fail_detail({{"eps", grid[i]}, {"n", n + 1}}));
    if (isometric)
      for (auto* tab : {&span_tab, &sep_tab}) {
        const auto& row = (*tab)[i];
        for (std::size_t n = 1; n < row.size(); ++n)
          if (row[0] && row[n])
            ledger.record("isometry_nullity", *row[0] == *row[n],
                          fail_detail({{"eps", grid[i]}, {"n", n + 1}, {"first", *row[0]}, {"value", *row[n]}}));
      }
  }

  {
    std::vector<std::size_t> perm(n_pts);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const DynamicalSystem twin = relabel(sys, perm);
    const std::size_t horizon = std::min<std::size_t>(opt.n_max, 3);
    for (std::size_t i = 0; i < g; ++i) {
      const Cover twin_seed = detail::relabel_cover(udc[i], twin.space, perm);
      for (std::size_t n = 1; n <= horizon; ++n) {
        const auto a = exact_or_none([&] { return min_spanning_count(twin.space, twin.map, n, grid[i], SolveMode::Exact, opt.budget); });
        const auto b = exact_or_none([&] { return max_separated_count(twin.space, twin.map, n, grid[i], SolveMode::Exact, opt.budget); });
        const auto c = cov_tab[i][n - 1] ? exact_or_none([&] {
          return cover_complexity(twin.map, n, twin_seed, SolveMode::Exact, opt.budget);
        }) : std::optional<std::size_t>{};
        Json where = {{"eps", grid[i]}, {"n", n}};
        if (a && span_tab[i][n - 1]) ledger.record("conjugacy", *a == *span_tab[i][n - 1], fail_detail(where));
        if (b && sep_tab[i][n - 1]) ledger.record("conjugacy", *b == *sep_tab[i][n - 1], fail_detail(where));
        if (c && cov_tab[i][n - 1]) ledger.record("conjugacy", *c == *cov_tab[i][n - 1], fail_detail(where));
      }
    }
  }

  if (n_pts <= SmallCoverLattice::kMaxPoints) {
    const auto rep = lebesgue_lemma_exhaustive(SmallCoverLattice(space));
    ledger.record("lebesgue_lemma", rep.violations == 0,
                  fail_detail({{"counterexample", rep.counterexample.value_or("")}}));
  } else {
    for (std::size_t i = 0; i < g; ++i)
      for (const auto& a : seeds[i]) {
        const auto r = lebesgue_lemma_check(a, opt.lebesgue_subset_limit);
        if (r.truncated) continue;
        Json j;
        j["cover"] = to_json(a);
        j["subset"] = r.witness;
        ledger.record("lebesgue_lemma", r.holds, fail_detail(j));
      }
  }

  for (std::size_t i = 0; i < g; ++i) {
    const double leb = lebesgue_number(expand(free_udc(space, grid[i])).cover);
    ledger.record("expansion", leb >= grid[i], fail_detail({{"eps", grid[i]}, {"lebesgue", leb}}));
  }
}

}  // namespace entrolab
