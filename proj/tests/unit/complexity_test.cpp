#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "entrolab/complexity.hpp"
#include "entrolab/corpus.hpp"
#include "support/oracles.hpp"

using namespace entrolab;

namespace {

DynamicalSystem doubling_system(std::size_t m) {
  SystemSpec s;
  s.kind = SystemKind::DyadicDoubling;
  s.m = m;
  return build_system(s);
}

double min_positive(const DistanceMatrix& d) {
  double best = 2.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (d(i, j) > 0.0) best = std::min(best, d(i, j));
  return best;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidEntry;
}

}  // namespace

TEST(MetricSpan, Examples) {
  const auto s = oracle::line({0, 1.0 / 3, 2.0 / 3, 1});
  EXPECT_EQ(metric_span(PointSet::full(4), s.matrix()), 0.0);
  EXPECT_DOUBLE_EQ(metric_span(PointSet(4, {1}), s.matrix()), 2.0 / 3);
  // Endpoints: the inner points are 1/3 from their nearest endpoint.
  double want = 0.0;
  for (std::size_t x = 0; x < 4; ++x) want = std::max(want, std::min(s(x, 0), s(x, 3)));
  EXPECT_DOUBLE_EQ(metric_span(PointSet(4, {0, 3}), s.matrix()), want);
  EXPECT_DOUBLE_EQ(want, 1.0 / 3);
  EXPECT_EQ(kind_of([&] { metric_span(PointSet(4), s.matrix()); }), ErrorKind::EmptySubset);
}

TEST(MetricSep, Examples) {
  const auto s = oracle::line({0, 0.2, 0.7, 1});
  EXPECT_EQ(metric_sep(PointSet(4, {2}), s.matrix()), kSingletonSeparation);
  EXPECT_EQ(kSingletonSeparation, 2.0);
  EXPECT_DOUBLE_EQ(metric_sep(PointSet(4, {1, 2}), s.matrix()), 0.5);
  double want = 2.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) want = std::min(want, s(a, b));
  EXPECT_DOUBLE_EQ(metric_sep(PointSet::full(4), s.matrix()), want);
  EXPECT_EQ(kind_of([&] { metric_sep(PointSet(4), s.matrix()); }), ErrorKind::EmptySubset);
}

TEST(SpanningCount, Examples) {
  const auto sys = doubling_system(3);
  EXPECT_EQ(min_spanning_count(sys.space, sys.map, 2, 1.0).value, 1u);
  const auto d2 = bowen_metric(sys.space, sys.map, 2);
  const double below = 0.5 * min_positive(d2.matrix());
  EXPECT_EQ(min_spanning_count(sys.space, sys.map, 2, below).value, 8u);
  const auto oracle_d2 = oracle::bowen(oracle::dense(sys.space.matrix()), sys.map.image(), 2);
  const auto r = min_spanning_count(sys.space, sys.map, 2, 0.3);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.value, oracle::min_spanning(oracle_d2, 0.3));
}

TEST(SeparatedCount, Examples) {
  const auto sys = doubling_system(3);
  EXPECT_EQ(max_separated_count(sys.space, sys.map, 2, 1.0).value, 1u);
  EXPECT_EQ(max_separated_count(sys.space, sys.map, 2, 1e-9).value, 8u);
  const auto oracle_d2 = oracle::bowen(oracle::dense(sys.space.matrix()), sys.map.image(), 2);
  const auto r = max_separated_count(sys.space, sys.map, 2, 0.3);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.value, oracle::max_separated(oracle_d2, 0.3));
}

TEST(Counts, GrainAndHorizonDomains) {
  const auto sys = doubling_system(3);
  EXPECT_EQ(kind_of([&] { min_spanning_count(sys.space, sys.map, 1, -0.1); }), ErrorKind::InvalidGrain);
  EXPECT_EQ(kind_of([&] { max_separated_count(sys.space, sys.map, 1, std::nan("")); }), ErrorKind::InvalidGrain);
  // Grains outside (0, 1] are still meaningful for a single count.
  EXPECT_EQ(max_separated_count(sys.space, sys.map, 2, 0.0).value, 8u);
  EXPECT_EQ(max_separated_count(sys.space, sys.map, 2, 1.5).value, 1u);
  EXPECT_EQ(min_spanning_count(sys.space, sys.map, 2, 0.0).value, 8u);
  EXPECT_EQ(kind_of([&] { min_spanning_count(sys.space, sys.map, 0, 0.5); }), ErrorKind::InvalidHorizon);
}

TEST(CoverComplexity, Examples) {
  const auto sys = doubling_system(3);
  EXPECT_EQ(cover_complexity(sys.map, 1, Cover::trivial(sys.space)).value, 1u);

  const auto a = free_udc(sys.space, 0.25).cover;
  const auto self = join(a, a);
  for (std::size_t n = 1; n <= 4; ++n)
    EXPECT_EQ(cover_complexity(EndoMap::identity(8), n, a).value,
              oracle::min_cover(8, oracle::masks(self.pieces())));

  // Two arcs under doubling: the n-step cylinders are the 2^n dyadic blocks.
  const Cover arcs(sys.space, std::vector<std::vector<std::size_t>>{{0, 1, 2, 3}, {4, 5, 6, 7}});
  std::set<std::vector<int>> words;
  for (std::size_t x = 0; x < 8; ++x) {
    std::vector<int> w;
    std::size_t y = x;
    for (int t = 0; t < 3; ++t, y = sys.map(y)) w.push_back(static_cast<int>(y / 4));
    words.insert(w);
  }
  EXPECT_EQ(words.size(), 8u);
  EXPECT_EQ(cover_complexity(sys.map, 3, arcs).value, words.size());
}

TEST(RateSequence, Invariants) {
  EXPECT_EQ(kind_of([] { RateSequence(std::vector<std::size_t>{}); }), ErrorKind::InvalidRates);
  EXPECT_EQ(kind_of([] { RateSequence(std::vector<std::size_t>{1, 0}); }), ErrorKind::InvalidRates);
  EXPECT_EQ(kind_of([] { RateSequence(std::vector<std::size_t>{3, 2}); }), ErrorKind::InvalidRates);
  const RateSequence r({1, 2, 2, 5});
  EXPECT_EQ(r[1], 1u);
  EXPECT_EQ(r[4], 5u);
}

TEST(LogRate, Examples) {
  EXPECT_EQ(log_rate(RateSequence({1, 1, 1})), (std::vector<double>{0, 0, 0}));
  for (double v : log_rate(RateSequence({2, 4, 8, 16, 32}))) EXPECT_NEAR(v, std::log(2.0), 1e-15);
  const auto lr = log_rate(RateSequence({2, 5, 9}));
  EXPECT_EQ(lr[0], std::log(2.0));
  EXPECT_EQ(lr[1], std::log(5.0) / 2);
  EXPECT_EQ(lr[2], std::log(9.0) / 3);
}

TEST(LogLim, Examples) {
  const RateSequence constant({4, 4, 4, 4, 4, 4});
  EXPECT_EQ(default_window(6).lo, 4u);
  EXPECT_EQ(default_window(6).hi, 6u);
  EXPECT_DOUBLE_EQ(log_lim(constant), std::log(4.0) / 4);
  EXPECT_NEAR(log_lim(RateSequence({2, 4, 8, 16})), std::log(2.0), 1e-15);
  const RateSequence mixed({1, 3, 3, 20, 21});
  double want = -1;
  for (std::size_t n = 2; n <= 5; ++n) want = std::max(want, std::log(static_cast<double>(mixed[n])) / n);
  EXPECT_DOUBLE_EQ(log_lim(mixed, {2, 5}), want);
  EXPECT_EQ(kind_of([&] { log_lim(mixed, {4, 3}); }), ErrorKind::WindowEmpty);
  EXPECT_EQ(kind_of([&] { log_lim(mixed, {1, 6}); }), ErrorKind::WindowEmpty);
}

TEST(Extrapolate, Examples) {
  auto est = [](double eps, double loglim) {
    EntropyEstimate e;
    e.eps = eps;
    e.loglim = loglim;
    return e;
  };
  const auto flat = entropy_extrapolate({est(0.5, 0.7), est(0.25, 0.7), est(0.125, 0.7)});
  EXPECT_EQ(flat.value, 0.7);
  EXPECT_TRUE(flat.stabilized);
  EXPECT_EQ(flat.spread, 0.0);
  const auto rising = entropy_extrapolate({est(0.5, 0.1), est(0.25, 0.3), est(0.125, 0.6), est(0.0625, 0.9)});
  EXPECT_FALSE(rising.stabilized);
  EXPECT_DOUBLE_EQ(rising.spread, 0.6);
  EXPECT_EQ(rising.value, 0.9);
  EXPECT_EQ(kind_of([&] { entropy_extrapolate({est(0.5, 0), est(0.25, 0)}); }), ErrorKind::InsufficientGrid);
  EXPECT_EQ(kind_of([&] { entropy_extrapolate({est(0.5, 0), est(0.5, 0), est(0.25, 0)}); }),
            ErrorKind::InsufficientGrid);
}

TEST(Sweep, RejectsBadGridsAndHorizons) {
  const auto sys = doubling_system(3);
  EXPECT_EQ(kind_of([&] { pressure_sweep(sys.space, sys.map, Method::Span, {0.5, 0.5}, 3); }), ErrorKind::InvalidGrain);
  EXPECT_EQ(kind_of([&] { pressure_sweep(sys.space, sys.map, Method::Span, {1.5}, 3); }), ErrorKind::InvalidGrain);
  EXPECT_EQ(kind_of([&] { pressure_sweep(sys.space, sys.map, Method::Span, {0.5}, 1); }), ErrorKind::InvalidHorizon);
  SweepOptions o;
  o.window = Window{3, 5};
  EXPECT_EQ(kind_of([&] { pressure_sweep(sys.space, sys.map, Method::Span, {0.5}, 4, o); }), ErrorKind::WindowEmpty);
}

TEST(Sweep, IsometrySpanIsConstantInN) {
  SystemSpec s;
  s.kind = SystemKind::Rotation;
  s.p = 3;
  s.q = 40;
  const auto sys = build_system(s);
  for (const auto& e : pressure_sweep(sys.space, sys.map, Method::Span, geometric_grid(0.5, 0.5, 4), 6))
    for (std::size_t n = 2; n <= 6; ++n) EXPECT_EQ(e.rates[n], e.rates[1]) << "eps " << e.eps;
}

TEST(Sweep, UnitGrainGivesAllOnes) {
  const auto sys = doubling_system(5);
  const auto r = pressure_sweep(sys.space, sys.map, {Method::Cover, Method::Span, Method::Sep}, {1.0, 0.5}, 4);
  for (const auto& [m, ests] : r)
    for (auto c : ests.front().rates.counts()) EXPECT_EQ(c, 1u) << to_string(m);
}

TEST(Sweep, DoublingSeparatedCountsRoughlyDouble) {
  const auto sys = doubling_system(8);
  const double eps = 1.0 / 16;
  const auto e = pressure_sweep(sys.space, sys.map, Method::Sep, {eps}, 6).front();
  const auto base = oracle::dense(sys.space.matrix());
  BowenMetric b = BowenMetric::first(sys.space, sys.map);
  for (std::size_t n = 1; n <= 6; ++n, b = b.next()) {
    EXPECT_TRUE(e.exact[n - 1]);
    EXPECT_EQ(e.raw_counts[n - 1], separated_count(b.matrix(), eps).value);
    EXPECT_EQ(oracle::dense(b.matrix()), oracle::bowen(base, sys.map.image(), n));
  }
  // Each step multiplies the count by 1.5 to 2 until every point is separated.
  std::size_t growing = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    if (e.rates[n - 1] == sys.space.size()) {
      EXPECT_EQ(e.rates[n], sys.space.size());
      continue;
    }
    ++growing;
    const double ratio = static_cast<double>(e.rates[n]) / static_cast<double>(e.rates[n - 1]);
    EXPECT_GE(ratio, 1.4) << "n=" << n;
    EXPECT_LE(ratio, 2.2) << "n=" << n;
  }
  EXPECT_GE(growing, 3u);
}

TEST(Sweep, IndependentOfThreadCount) {
  CorpusGenerator gen(17);
  const auto sys = gen.random_system(40, 4);
  const std::vector<Method> all{Method::Cover, Method::Span, Method::Sep};
  SweepOptions one, many;
  one.threads = 1;
  many.threads = 6;
  const auto grid = geometric_grid(0.5, 0.5, 4);
  const auto a = pressure_sweep(sys.space, sys.map, all, grid, 4, one);
  const auto b = pressure_sweep(sys.space, sys.map, all, grid, 4, many);
  for (auto m : all)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_EQ(a.at(m)[i].raw_counts, b.at(m)[i].raw_counts);
      EXPECT_EQ(a.at(m)[i].loglim, b.at(m)[i].loglim);
      EXPECT_EQ(a.at(m)[i].catalogue_loglim, b.at(m)[i].catalogue_loglim);
    }
}

TEST(Sweep, GreedyModeFlagsEveryCellInexact) {
  const auto sys = doubling_system(5);
  SweepOptions g;
  g.mode = SolveMode::Greedy;
  for (const auto& [m, ests] : pressure_sweep(sys.space, sys.map, {Method::Span, Method::Sep}, {0.25, 0.125}, 3, g))
    for (const auto& e : ests)
      for (bool x : e.exact) EXPECT_FALSE(x);
}

TEST(Sweep, BudgetExhaustionFallsBackToGreedy) {
  CorpusGenerator gen(18);
  const auto sys = gen.random_system(90, 1);
  SweepOptions o;
  o.budget = SolverBudget{1};
  const auto ests = pressure_sweep(sys.space, sys.map, Method::Sep, {0.3, 0.15, 0.08}, 3, o);
  bool any_greedy = false;
  for (const auto& e : ests) {
    for (bool x : e.exact) any_greedy = any_greedy || !x;
    for (std::size_t n = 1; n < e.rates.horizon(); ++n) EXPECT_LE(e.rates[n], e.rates[n + 1]);
  }
  EXPECT_TRUE(any_greedy);
}

TEST(Sweep, CountsGrowAsTheGrainShrinks) {
  CorpusGenerator gen(19);
  for (std::size_t v = 0; v < 9; ++v) {
    const auto sys = gen.random_system(24, v);
    const auto r = pressure_sweep(sys.space, sys.map, {Method::Cover, Method::Span, Method::Sep},
                                  geometric_grid(0.5, 0.5, 4), 4);
    for (const auto& [m, ests] : r)
      for (std::size_t i = 1; i < ests.size(); ++i)
        for (std::size_t n = 1; n <= 4; ++n) EXPECT_LE(ests[i - 1].rates[n], ests[i].rates[n]) << to_string(m);
  }
}

// ---------------------------------------------------------------------------
// Relations between the three counts, checked against brute-force oracles on
// small random systems.

class CountRelations : public ::testing::TestWithParam<int> {};

TEST_P(CountRelations, SandwichesMonotonicityAndGreedyBracketing) {
  CorpusGenerator gen(100 + static_cast<std::uint64_t>(GetParam()));
  for (std::size_t v = 0; v < 9; ++v) {
    const std::size_t n_pts = 5 + gen.uniform_index(9);
    const auto sys = gen.random_system(n_pts, v);
    const auto base = oracle::dense(sys.space.matrix());
    for (double eps : {0.6, 0.4, 0.25, 0.15}) {
      std::size_t prev_span = 0, prev_sep = 0, prev_cov = 0;
      for (std::size_t n = 1; n <= 4; ++n) {
        const auto dn = oracle::bowen(base, sys.map.image(), n);
        const auto span = min_spanning_count(sys.space, sys.map, n, eps).value;
        const auto sep = max_separated_count(sys.space, sys.map, n, eps).value;
        const auto span_half = min_spanning_count(sys.space, sys.map, n, eps / 2).value;
        ASSERT_EQ(span, oracle::min_spanning(dn, eps));
        ASSERT_EQ(sep, oracle::max_separated(dn, eps));
        ASSERT_LE(span, sep);
        ASSERT_LE(sep, span_half);
        ASSERT_GE(span, prev_span);
        ASSERT_GE(sep, prev_sep);
        ASSERT_GE(min_spanning_count(sys.space, sys.map, n, eps, SolveMode::Greedy).value, span);
        ASSERT_LE(max_separated_count(sys.space, sys.map, n, eps, SolveMode::Greedy).value, sep);

        // Sandwich B with seed covers of diameter below eps.
        for (double r : {0.2 * eps, 0.45 * eps}) {
          const auto a = free_udc(sys.space, r).cover;
          if (!(diameter(a) < eps)) continue;
          const auto cov = cover_complexity(sys.map, n, a).value;
          const auto refined = dyn_refine(sys.map, n, a);
          ASSERT_EQ(cov, oracle::min_cover(n_pts, oracle::masks(reduce_to_maximal(refined).pieces())));
          ASSERT_LE(sep, cov);
          const double leb = lebesgue_number(a);
          ASSERT_LE(cov, min_spanning_count(sys.space, sys.map, n, std::min(leb / 2, 1.0)).value);
          if (r == 0.45 * eps) {
            ASSERT_GE(cov, prev_cov);
            prev_cov = cov;
          }
        }
        prev_span = span;
        prev_sep = sep;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CountRelations, ::testing::Range(0, 4));

TEST(CountRelations, IsometryCountsIgnoreTheHorizon) {
  SystemSpec s;
  s.kind = SystemKind::Rotation;
  for (auto [p, q] : {std::pair<std::size_t, std::size_t>{1, 7}, {2, 9}, {5, 12}}) {
    s.p = p;
    s.q = q;
    const auto sys = build_system(s);
    for (double eps : {0.5, 0.3, 0.1})
      for (std::size_t n = 2; n <= 5; ++n) {
        EXPECT_EQ(min_spanning_count(sys.space, sys.map, n, eps).value,
                  min_spanning_count(sys.space, sys.map, 1, eps).value);
        EXPECT_EQ(max_separated_count(sys.space, sys.map, n, eps).value,
                  max_separated_count(sys.space, sys.map, 1, eps).value);
      }
  }
}

TEST(CountRelations, ConjugateSystemsShareCounts) {
  CorpusGenerator gen(31);
  for (std::size_t v = 0; v < 9; ++v) {
    const auto sys = gen.random_system(14, v);
    const std::size_t n = sys.space.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen.rng());
    // Relabel x -> perm[x]: d'(perm x, perm y) = d(x, y), f'(perm x) = perm f(x).
    DistanceMatrix d(n);
    std::vector<std::size_t> img(n);
    for (std::size_t x = 0; x < n; ++x) {
      img[perm[x]] = perm[sys.map(x)];
      for (std::size_t y = 0; y < n; ++y) d.at(perm[x], perm[y]) = sys.space(x, y);
    }
    const auto space2 = validate_space(std::move(d));
    const EndoMap map2(img, n);
    for (double eps : {0.5, 0.2})
      for (std::size_t h = 1; h <= 3; ++h) {
        EXPECT_EQ(min_spanning_count(sys.space, sys.map, h, eps).value, min_spanning_count(space2, map2, h, eps).value);
        EXPECT_EQ(max_separated_count(sys.space, sys.map, h, eps).value,
                  max_separated_count(space2, map2, h, eps).value);
        EXPECT_EQ(cover_complexity(sys.map, h, free_udc(sys.space, eps).cover).value,
                  cover_complexity(map2, h, free_udc(space2, eps).cover).value);
      }
  }
}
