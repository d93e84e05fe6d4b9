#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "entrolab/corpus.hpp"
#include "entrolab/invariants.hpp"
#include "support/oracles.hpp"

using namespace entrolab;

namespace {

VerifyOptions quick() {
  VerifyOptions o;
  o.eps_grid = {0.5, 0.25, 0.125};
  o.n_max = 3;
  return o;
}

const std::vector<std::string> kSuites{"bowen_metric",   "sandwich_a",       "sandwich_b",
                                       "monotone_in_n",  "monotone_in_eps",  "isometry_nullity",
                                       "greedy_bracketing", "conjugacy",     "expansion",
                                       "lebesgue_lemma", "cover_monotone_in_seed"};

}  // namespace

TEST(Ledger, CountsInstancesAndKeepsTheFirstFailure) {
  InvariantLedger l;
  int calls = 0;
  auto detail = [&](int k) {
    return [&calls, k] {
      ++calls;
      return Json{{"k", k}};
    };
  };
  l.record("a", true, detail(0));
  l.record("b", false, detail(1));
  l.record("b", false, detail(2));
  l.touch("c");
  EXPECT_EQ(calls, 1);
  ASSERT_EQ(l.reports().size(), 3u);
  EXPECT_EQ(l.reports()[1].instances, 2u);
  EXPECT_EQ(l.reports()[1].failures, 2u);
  EXPECT_EQ(l.reports()[1].first_failure["k"], 1);
  EXPECT_EQ(l.reports()[2].instances, 0u);
  EXPECT_FALSE(l.all_passed());
  EXPECT_EQ(l.first_failure()->name, "b");
  const auto j = l.to_json();
  EXPECT_EQ(j[0]["passed"], true);
  EXPECT_FALSE(j[0].contains("first_failure"));
  EXPECT_EQ(j[1]["first_failure"]["k"], 1);
}

TEST(LebesgueCheck, HoldsOnSmallCovers) {
  const auto s = oracle::line({0, 0.25, 0.5, 0.75, 1});
  const Cover a(s, std::vector<std::vector<std::size_t>>{{0, 1, 2}, {2, 3, 4}});
  const auto r = lebesgue_lemma_check(a);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.truncated);
  // The shared point 2 is a quarter away from both complements, so only singletons qualify.
  EXPECT_DOUBLE_EQ(lebesgue_number(a), 0.25);
  EXPECT_EQ(r.subsets, 5u);
}

TEST(LebesgueCheck, TruncatesAtTheLimit) {
  const auto s = oracle::line({0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1});
  const auto r = lebesgue_lemma_check(Cover::trivial(s), 50);
  EXPECT_TRUE(r.truncated);
  EXPECT_TRUE(r.holds);
}

TEST(Relabel, PreservesDistancesAndDynamics) {
  CorpusGenerator gen(4);
  const auto sys = gen.random_system(12, 3);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), gen.rng());
  const auto r = relabel(sys, perm);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(r.map(perm[i]), perm[sys.map(i)]);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(r.space(perm[i], perm[j]), sys.space(i, j));
  }
}

TEST(VerifySystem, BuiltInsPassEverySuite) {
  for (const auto& sys : builtin_corpus()) {
    if (sys.space.size() > 40) continue;
    InvariantLedger ledger;
    verify_system(sys, quick(), ledger);
    for (const auto& r : ledger.reports())
      EXPECT_TRUE(r.passed()) << sys.name << " " << r.name << ": " << r.first_failure.dump();
  }
}

TEST(VerifySystem, RandomSystemsPassAndTouchEverySuite) {
  CorpusGenerator gen(12);
  InvariantLedger ledger;
  for (std::size_t v = 0; v < 9; ++v) verify_system(gen.random_system(10 + v, v), quick(), ledger);
  // Random maps are almost never isometries, so add one rotation.
  SystemSpec rot;
  rot.kind = SystemKind::Rotation;
  rot.p = 2;
  rot.q = 11;
  verify_system(build_system(rot), quick(), ledger);
  for (const auto& name : kSuites) {
    const auto it = std::find_if(ledger.reports().begin(), ledger.reports().end(),
                                 [&](const auto& r) { return r.name == name; });
    ASSERT_NE(it, ledger.reports().end()) << name;
    EXPECT_GT(it->instances, 0u) << name;
    EXPECT_TRUE(it->passed()) << name << ": " << it->first_failure.dump();
  }
}

TEST(VerifySystem, GuardRejectsLargeSpaces) {
  SystemSpec s;
  s.kind = SystemKind::DyadicDoubling;
  s.m = 6;
  const auto sys = build_system(s);
  auto o = quick();
  o.max_points = 32;
  InvariantLedger ledger;
  try {
    verify_system(sys, o, ledger);
    FAIL() << "guard did not fire";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(VerifySystem, SystemDumpCarriesSmallInstances) {
  SystemSpec s;
  s.kind = SystemKind::Rotation;
  s.q = 5;
  const auto j = system_dump(build_system(s));
  EXPECT_EQ(j["points"], 5);
  EXPECT_EQ(j["map"], Json::parse("[1,2,3,4,0]"));
  EXPECT_EQ(j["dist"].size(), 5u);
}
