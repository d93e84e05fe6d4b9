#include <gtest/gtest.h>

#include <random>

#include "entrolab/set_cover.hpp"
#include "support/oracles.hpp"

using namespace entrolab;

namespace {

std::vector<PointSet> sets(std::size_t n, const std::vector<std::vector<std::size_t>>& idx) {
  std::vector<PointSet> out;
  for (const auto& v : idx) out.push_back(PointSet::from_indices(n, v));
  return out;
}

bool covers_all(std::size_t n, const std::vector<PointSet>& pieces, const std::vector<std::size_t>& chosen) {
  PointSet u(n);
  for (auto i : chosen) u |= pieces[i];
  return u.all();
}

}  // namespace

TEST(ExactSetCover, SinglePieceUniverse) {
  const auto p = sets(4, {{0, 1, 2, 3}});
  EXPECT_EQ(exact_set_cover(4, p).value, 1u);
}

TEST(ExactSetCover, FullPieceAmongOthers) {
  const auto p = sets(4, {{0, 1}, {2}, {0, 1, 2, 3}, {3}});
  const auto r = exact_set_cover(4, p);
  EXPECT_EQ(r.value, 1u);
  EXPECT_EQ(r.chosen, (std::vector<std::size_t>{2}));
}

TEST(ExactSetCover, FourCycleNeedsTwo) {
  const auto p = sets(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const auto r = exact_set_cover(4, p);
  EXPECT_EQ(r.value, 2u);
  EXPECT_EQ(oracle::min_cover(4, oracle::masks(p)), 2u);
  EXPECT_TRUE(covers_all(4, p, r.chosen));
}

TEST(ExactSetCover, GreedyTrapInstance) {
  // Greedy takes the big middle piece first and needs three; two halves suffice.
  const auto p = sets(6, {{0, 1, 2}, {3, 4, 5}, {1, 2, 3, 4}, {0}, {5}});
  EXPECT_EQ(greedy_set_cover(6, p).value, 3u);
  EXPECT_EQ(exact_set_cover(6, p).value, 2u);
}

TEST(ExactSetCover, RejectsNonCovering) {
  const auto p = sets(4, {{0, 1}, {2}});
  try {
    exact_set_cover(4, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidCover);
  }
}

TEST(ExactSetCover, BudgetExhaustionIsReported) {
  std::mt19937_64 rng(3);
  const auto p = oracle::random_pieces(rng, 60, 200, 0.08);
  try {
    exact_set_cover(60, p, SolverBudget{1});
    FAIL() << "expected the budget to run out";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExactBudgetExceeded);
  }
}

TEST(GreedySetCover, TiesGoToTheLowestIndex) {
  const auto p = sets(4, {{0, 1}, {2, 3}, {0, 1}, {1, 2}});
  const auto r = greedy_set_cover(4, p);
  EXPECT_EQ(r.chosen, (std::vector<std::size_t>{0, 1}));
}

TEST(GreedySetCover, Deterministic) {
  std::mt19937_64 rng(8);
  const auto p = oracle::random_pieces(rng, 40, 60, 0.15);
  EXPECT_EQ(greedy_set_cover(40, p).chosen, greedy_set_cover(40, p).chosen);
}

class SetCoverOracle : public ::testing::TestWithParam<int> {};

TEST_P(SetCoverOracle, ExactMatchesSubfamilyEnumeration) {
  std::mt19937_64 rng(1000 + GetParam());
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng() % 20;
    const std::size_t k = 2 + rng() % 14;
    const double density = 0.1 + 0.05 * static_cast<double>(rng() % 8);
    const auto p = oracle::random_pieces(rng, n, k, density);
    if (p.size() > 20) continue;
    const auto want = oracle::min_cover(n, oracle::masks(p));
    const auto exact = exact_set_cover(n, p);
    const auto greedy = greedy_set_cover(n, p);
    ASSERT_EQ(exact.value, want) << "n=" << n << " k=" << p.size();
    ASSERT_TRUE(exact.exact);
    ASSERT_EQ(exact.chosen.size(), exact.value);
    ASSERT_TRUE(covers_all(n, p, exact.chosen));
    ASSERT_GE(greedy.value, exact.value);
    ASSERT_TRUE(covers_all(n, p, greedy.chosen));
    ASSERT_LE(static_cast<double>(greedy.value),
              static_cast<double>(exact.value) * (1.0 + std::log(static_cast<double>(n))));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SetCoverOracle, ::testing::Range(0, 6));

TEST(ExactSetCover, DuplicateAndNestedPiecesDoNotChangeTheOptimum) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = oracle::random_pieces(rng, 12, 8, 0.3);
    const auto base = exact_set_cover(12, p).value;
    const auto extra = p;
    for (const auto& s : extra) {
      p.push_back(s);
      PointSet sub(12);
      sub.set(s.first());
      p.push_back(sub);
    }
    EXPECT_EQ(exact_set_cover(12, p).value, base);
  }
}

TEST(ExactSetCover, ElementDominanceShrinksTheUniverse) {
  // Element 0 only sits in pieces that also hold 1 and 2, so 1 and 2 drop out.
  const auto p = sets(5, {{0, 1, 2}, {1, 2, 3}, {0, 1, 2, 4}, {3, 4}});
  const auto r = detail::reduce_instance(5, p);
  EXPECT_LT(r.universe, 5u);
  const auto exact = exact_set_cover(5, p);
  EXPECT_EQ(exact.value, 2u);
  EXPECT_TRUE(covers_all(5, p, exact.chosen));
}

TEST(ExactSetCover, ReductionKeepsChosenIndicesValid) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 14;
    const auto p = oracle::random_pieces(rng, n, 3 + rng() % 12, 0.35);
    const auto r = detail::reduce_instance(n, p);
    ASSERT_EQ(r.pieces.size(), r.origin.size());
    for (auto o : r.origin) ASSERT_LT(o, p.size());
    const auto exact = exact_set_cover(n, p);
    ASSERT_EQ(exact.value, oracle::min_cover(n, oracle::masks(p)));
    ASSERT_TRUE(covers_all(n, p, exact.chosen));
  }
}
