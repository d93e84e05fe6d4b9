#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entrolab/corpus.hpp"
#include "entrolab/serialize.hpp"
#include "support/oracles.hpp"

using namespace entrolab;

namespace {

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

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.1), "0.1");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(CoverJson, RoundTrip) {
  CorpusGenerator gen(5);
  for (int i = 0; i < 20; ++i) {
    const auto space = gen.euclidean_space(6 + gen.uniform_index(10));
    const auto c = free_udc(space, 0.1 + 0.8 * gen.uniform_real()).cover;
    const auto j = to_json(c);
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    const auto back = cover_from_json(space, Json::parse(j.dump()));
    EXPECT_EQ(back.piece_indices(), c.piece_indices());
  }
}

TEST(CoverJson, Layout) {
  const auto space = oracle::line({0, 0.5, 1});
  const Cover c(space, std::vector<std::vector<std::size_t>>{{0, 1}, {1, 2}});
  EXPECT_EQ(to_json(c).dump(), R"({"schema_version":1,"pieces":[[0,1],[1,2]]})");
  EXPECT_EQ(kind_of([&] { cover_from_json(space, Json::parse(R"({"schema_version":1})")); }),
            ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([&] { cover_from_json(space, Json::parse(R"({"pieces":[[0,1]]})")); }),
            ErrorKind::InvalidCover);
}

TEST(SubcoverJson, Layout) {
  const auto space = oracle::line({0, 0.5, 1});
  const auto r = min_subcover_size(Cover::singletons(space));
  EXPECT_EQ(to_json(r).dump(), R"({"schema_version":1,"value":3,"mode":"exact","exact":true})");
}

TEST(PreorderJson, RoundTrip) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.3);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<std::pair<std::size_t, std::size_t>> gens;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (coin(rng)) gens.emplace_back(a, b);
    const auto p = FinitePreorder::generated_by(n, gens);
    EXPECT_EQ(preorder_from_json(Json::parse(to_json(p).dump())), p);
  }
}

TEST(PreorderJson, AcceptsIntegersAndRejectsNonPreorders) {
  const auto p = preorder_from_json(Json::parse(R"({"leq":[[1,1],[0,1]]})"));
  EXPECT_EQ(p, FinitePreorder::chain(2));
  EXPECT_EQ(kind_of([] { preorder_from_json(Json::parse(R"({"leq":[[0,1],[0,1]]})")); }), ErrorKind::NotAPreorder);
  EXPECT_EQ(kind_of([] { preorder_from_json(Json::parse(R"({"rows":[]})")); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([] { preorder_from_json(Json::parse(R"({"leq":[[true,"x"],[false,true]]})")); }),
            ErrorKind::FileMalformed);
}

TEST(MonotoneMapJson, RoundTrip) {
  const auto c3 = FinitePreorder::chain(3);
  for (const auto& f : all_monotone_maps(c3, c3))
    EXPECT_EQ(monotone_map_from_json(Json::parse(to_json(f).dump()), c3, c3), f);
  EXPECT_EQ(kind_of([&] { monotone_map_from_json(Json::parse(R"({"values":[2,1,0]})"), c3, c3); }),
            ErrorKind::NotMonotone);
}

TEST(ChainMapJson, RoundTripWithInfinities) {
  const auto c3 = FinitePreorder::chain(3);
  const ChainMap up(c3, {ChainValue::neg_inf(), 0.25, ChainValue::pos_inf()}, Orientation::Ascending);
  const auto j = to_json(up);
  EXPECT_EQ(j.dump(), R"({"schema_version":1,"values":["-inf",0.25,"+inf"],"orientation":"ascending"})");
  EXPECT_EQ(chain_map_from_json(Json::parse(j.dump()), c3), up);
  const ChainMap down(c3, {0.9, 0.5, 0.1}, Orientation::Descending);
  EXPECT_EQ(chain_map_from_json(Json::parse(to_json(down).dump()), c3), down);
  EXPECT_EQ(chain_value_from_json("inf"), ChainValue::pos_inf());
  EXPECT_EQ(kind_of([] { chain_value_from_json("nan"); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([] { chain_value_from_json(Json::array()); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([&] { chain_map_from_json(Json::parse(R"({"values":[1,2,3],"orientation":"sideways"})"), c3); }),
            ErrorKind::FileMalformed);
}

TEST(SweepOutput, CsvAndJsonLayout) {
  SystemSpec s;
  s.kind = SystemKind::DyadicDoubling;
  s.m = 3;
  const auto sys = build_system(s);
  const auto sweep = pressure_sweep(sys.space, sys.map, {Method::Span, Method::Sep}, {0.5, 0.25}, 3);
  EXPECT_EQ(sweep_csv_header(), "method,eps,n,count,exact,log_rate\n");
  const auto rows = sweep_csv_rows(sweep.at(Method::Span));
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 6);
  EXPECT_EQ(rows.rfind("span,0.5,1,", 0), 0u);
  const auto first_line = rows.substr(0, rows.find('\n'));
  EXPECT_EQ(std::count(first_line.begin(), first_line.end(), ','), 5);

  const auto j = sweep_json(sweep);
  EXPECT_EQ(j["schema_version"], 1);
  ASSERT_TRUE(j["methods"].contains("span"));
  ASSERT_TRUE(j["methods"].contains("sep"));
  EXPECT_FALSE(j["methods"].contains("cover"));
  const auto& cell = j["methods"]["sep"]["0.25"];
  for (const char* key : {"counts", "raw_counts", "exact", "log_rates", "loglim", "window", "envelope_applied"})
    EXPECT_TRUE(cell.contains(key)) << key;
  EXPECT_EQ(cell["counts"].size(), 3u);
  EXPECT_EQ(cell["window"], Json::parse("[2,3]"));

  const auto x = to_json(entropy_extrapolate(pressure_sweep(sys.space, sys.map, Method::Cover, {0.5, 0.25, 0.125}, 3)));
  for (const char* key : {"value", "spread", "stabilized", "tolerance", "loglims"}) EXPECT_TRUE(x.contains(key)) << key;
}
