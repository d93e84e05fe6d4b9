#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "entrolab/error.hpp"
#include "entrolab/invariants.hpp"
#include "entrolab/order.hpp"
#include "entrolab/serialize.hpp"

namespace entrolab {

struct CatOptions {
  std::size_t preorders = 1000;
  std::size_t max_objects = 6;
  std::size_t entangle_instances = 200;
  /// Maps per side in the nat-trans comparison; all pairs are checked.
  std::size_t maps_per_side = 24;
  std::uint64_t seed = 11;
};

/// Preorders and maps loaded from fixture files. Every map indexes into
/// `preorders` for its domain and codomain.
struct CatFixture {
  struct Map {
    std::size_t dom = 0;
    std::size_t cod = 0;
    MonotoneMap map;
  };
  std::vector<FinitePreorder> preorders;
  std::vector<Map> maps;
  std::vector<std::string> sources;
};

inline CatFixture load_cat_fixture_json(const Json& j, const std::string& source, CatFixture into = {}) {
  auto where = [&](const std::string& what) { return source + ": " + what; };
  if (!j.is_object()) fail(ErrorKind::FileMalformed, where("fixture must be a JSON object"));
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    fail(ErrorKind::ConfigError, where("unsupported schema_version"));
  if (!j.contains("preorders") || !j["preorders"].is_array() || j["preorders"].empty())
    fail(ErrorKind::FileMalformed, where("fixture needs a non-empty 'preorders' array"));
  const std::size_t base = into.preorders.size();
  std::size_t k = 0;
  for (const auto& p : j["preorders"]) {
    try {
      into.preorders.push_back(preorder_from_json(p));
    } catch (const Error& e) {
      fail(e.kind(), where("preorder " + std::to_string(k) + ": " + e.what()));
    }
    ++k;
  }
  if (j.contains("maps")) {
    if (!j["maps"].is_array()) fail(ErrorKind::FileMalformed, where("'maps' must be an array"));
    k = 0;
    for (const auto& m : j["maps"]) {
      if (!m.contains("dom") || !m.contains("cod") || !m["dom"].is_number_unsigned() || !m["cod"].is_number_unsigned())
        fail(ErrorKind::FileMalformed, where("map " + std::to_string(k) + " needs integer 'dom' and 'cod'"));
      const std::size_t d = base + m["dom"].get<std::size_t>();
      const std::size_t c = base + m["cod"].get<std::size_t>();
      if (d >= into.preorders.size() || c >= into.preorders.size())
        fail(ErrorKind::IndexOutOfRange, where("map " + std::to_string(k) + " names a missing preorder"));
      try {
        into.maps.push_back({d, c, monotone_map_from_json(m, into.preorders[d], into.preorders[c])});
      } catch (const Error& e) {
        fail(e.kind(), where("map " + std::to_string(k) + ": " + e.what()));
      } catch (const Json::exception& e) {
        fail(ErrorKind::FileMalformed, where("map " + std::to_string(k) + ": " + e.what()));
      }
      ++k;
    }
  }
  into.sources.push_back(source);
  return into;
}

/// Loads every *.json file of a directory (sorted by name), or one file.
inline CatFixture load_cat_fixtures(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path, ec)) fail(ErrorKind::IoError, path.string() + ": no such file or directory");
  std::vector<fs::path> files;
  if (fs::is_directory(path, ec)) {
    for (const auto& e : fs::directory_iterator(path, ec))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorKind::ConfigError, path.string() + ": fixture directory holds no .json files");
  } else {
    files.push_back(path);
  }
  CatFixture fx;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) fail(ErrorKind::IoError, f.string() + ": cannot open");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::FileMalformed, f.string() + ": " + e.what());
    }
    fx = load_cat_fixture_json(j, f.string(), std::move(fx));
  }
  return fx;
}

namespace detail {

inline Json map_json(const MonotoneMap& m) {
  Json j;
  j["dom"] = to_json(m.dom())["leq"];
  j["cod"] = to_json(m.cod())["leq"];
  j["values"] = m.values();
  return j;
}

inline Json chain_json(const ChainMap& m) {
  Json j = to_json(m);
  j.erase("schema_version");
  j["dom"] = to_json(m.dom())["leq"];
  return j;
}

/// Existence of a natural transformation F => G found the long way: pick
/// one arrow F(x) -> G(x) per object from the explicit hom-sets, then check
/// every naturality square by composing arrows as (source, target) pairs.
inline bool nat_trans_brute_force(const MonotoneMap& f, const MonotoneMap& g) {
  const auto& c = f.cod();
  const std::size_t n = f.dom().size();
  using Arrow = std::pair<std::size_t, std::size_t>;
  auto hom = [&](std::size_t a, std::size_t b) {
    std::vector<Arrow> out;
    if (c.leq(a, b)) out.emplace_back(a, b);
    return out;
  };
  auto compose_arrows = [](Arrow second, Arrow first) -> std::optional<Arrow> {
    if (first.second != second.first) return std::nullopt;
    return Arrow{first.first, second.second};
  };
  std::vector<Arrow> eta(n);
  auto rec = [&](auto&& self, std::size_t x) -> bool {
    if (x == n) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (!f.dom().leq(a, b)) continue;
          const Arrow fab{f(a), f(b)}, gab{g(a), g(b)};
          const auto left = compose_arrows(gab, eta[a]);
          const auto right = compose_arrows(eta[b], fab);
          if (!left || !right || *left != *right) return false;
        }
      return true;
    }
    for (const auto& arrow : hom(f(x), g(x))) {
      eta[x] = arrow;
      if (self(self, x + 1)) return true;
    }
    return false;
  };
  return rec(rec, 0);
}

}  // namespace detail

/// Random preorders and maps plus the lemma battery run over them.
class CatSuite {
 public:
  CatSuite(const CatOptions& opt, InvariantLedger& ledger) : opt_(opt), ledger_(ledger), rng_(opt.seed) {
    for (const char* name : {"od30_nat_trans", "kan_left_universal", "kan_right_universal", "post_adjoint_search",
                             "sd40_colim_preservation", "df30_colim_pullback", "qlf_actn_reflection",
                             "lim_qual_colim", "ddkw_colim_bound", "ddp3_composition", "lp4d9_division",
                             "entangle_scc"})
      ledger_.touch(name);
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  FinitePreorder random_preorder(std::size_t max_objects) {
    const std::size_t n = uniform(1, max_objects);
    switch (uniform(0, 5)) {
      case 0: return FinitePreorder::chain(n);
      case 1: return FinitePreorder::antichain(n);
      default: break;
    }
    const double p = 0.1 + 0.1 * static_cast<double>(uniform(0, 4));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && coin(p)) pairs.emplace_back(i, j);
    return FinitePreorder::generated_by(n, pairs);
  }

  /// Uniform choice at each step of a randomized backtracking search; every
  /// monotone map has positive probability.
  MonotoneMap random_monotone(const FinitePreorder& dom, const FinitePreorder& cod) {
    std::vector<std::size_t> v(dom.size());
    std::vector<std::size_t> order(cod.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rec = [&](auto&& self, std::size_t i) -> bool {
      if (i == dom.size()) return true;
      std::vector<std::size_t> cand = order;
      std::shuffle(cand.begin(), cand.end(), rng_);
      for (auto c : cand) {
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) {
          if (dom.leq(j, i) && !cod.leq(v[j], c)) ok = false;
          if (dom.leq(i, j) && !cod.leq(c, v[j])) ok = false;
        }
        if (!ok) continue;
        v[i] = c;
        if (self(self, i + 1)) return true;
      }
      return false;
    };
    if (!rec(rec, 0)) fail(ErrorKind::PreconditionFailed, "no monotone map into an empty codomain");
    return MonotoneMap(dom, cod, std::move(v));
  }

  ChainMap random_chain_map(const FinitePreorder& dom, std::size_t levels, Orientation o = Orientation::Ascending) {
    const auto ranks = random_monotone(dom, FinitePreorder::chain(levels));
    std::vector<ChainValue> vals;
    for (auto r : ranks.values()) {
      const double v = static_cast<double>(r);
      vals.emplace_back(o == Orientation::Ascending ? v : -v);
    }
    return ChainMap(dom, std::move(vals), o);
  }

  /// Up to maps_per_side maps: all of them when few, else a random sample.
  std::vector<MonotoneMap> sample_maps(const FinitePreorder& dom, const FinitePreorder& cod) {
    auto all = all_monotone_maps(dom, cod, opt_.maps_per_side + 1);
    if (all.size() <= opt_.maps_per_side) return all;
    std::vector<MonotoneMap> out;
    for (std::size_t i = 0; i < opt_.maps_per_side; ++i) out.push_back(random_monotone(dom, cod));
    return out;
  }

  void check_od30(const FinitePreorder& p) {
    const auto q = random_preorder(4);
    const auto maps = sample_maps(p, q);
    for (const auto& f : maps)
      for (const auto& g : maps) {
        const bool fast = nat_trans_exists(f, g);
        const bool slow = detail::nat_trans_brute_force(f, g);
        ledger_.record("od30_nat_trans", fast == slow, [&] {
          return Json{{"F", detail::map_json(f)}, {"G", detail::map_json(g)}, {"fast", fast}, {"brute", slow}};
        });
      }
  }

  /// Universal property of both pointwise Kan extensions against every
  /// monotone H : D -> C, where C holds F's values and the two sentinels.
  void check_kan(const FinitePreorder& p0, Orientation o) {
    FinitePreorder x = p0;
    if (x.size() > 5) {
      std::vector<std::size_t> keep(5);
      std::iota(keep.begin(), keep.end(), std::size_t{0});
      x = x.restrict_to(keep);
    }
    const auto d = random_preorder(4);
    const auto k = random_monotone(x, d);
    const auto f = random_chain_map(x, 4, o);
    const ValueOrder ord{o};
    std::vector<ChainValue> values = f.values();
    values.push_back(ord.bottom());
    values.push_back(ord.top());
    std::sort(values.begin(), values.end(), [&](auto a, auto b) { return ord.leq(a, b) && !(a == b); });
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const auto chain = FinitePreorder::chain(values.size());

    const auto lan = left_kan(f, k);
    const auto ran = right_kan(f, k);
    bool lan_ok = true, ran_ok = true;
    bool lan_seen = false, ran_seen = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lan_ok = lan_ok && ord.leq(f(i), lan(k(i)));
      ran_ok = ran_ok && ord.leq(ran(k(i)), f(i));
    }
    for (const auto& h_idx : all_monotone_maps(d, chain)) {
      bool below = true, above = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        below = below && ord.leq(f(i), values[h_idx(k(i))]);
        above = above && ord.leq(values[h_idx(k(i))], f(i));
      }
      bool equal = true;
      for (std::size_t y = 0; y < d.size(); ++y) {
        const ChainValue h = values[h_idx(y)];
        if (below && !ord.leq(lan(y), h)) lan_ok = false;
        if (above && !ord.leq(h, ran(y))) ran_ok = false;
        equal = equal && h == lan(y);
      }
      lan_seen = lan_seen || (below && equal);
      equal = true;
      for (std::size_t y = 0; y < d.size(); ++y) equal = equal && values[h_idx(y)] == ran(y);
      ran_seen = ran_seen || (above && equal);
    }
    auto dump = [&] { return Json{{"F", detail::chain_json(f)}, {"K", detail::map_json(k)}}; };
    ledger_.record("kan_left_universal", lan_ok && lan_seen, dump);
    ledger_.record("kan_right_universal", ran_ok && ran_seen, dump);
  }

  /// post_right_adjoint against exhaustive search, then the colimit lemmas.
  void check_adjoint_lemmas(const MonotoneMap& t) {
    const auto& a = t.dom();
    const auto& b = t.cod();
    bool brute = false;
    for (const auto& s : all_monotone_maps(b, a))
      if (is_post_right_adjoint(t, s)) {
        brute = true;
        break;
      }
    const auto found = post_right_adjoint(t);
    const bool valid = !found || is_post_right_adjoint(t, *found);
    ledger_.record("post_adjoint_search", brute == found.has_value() && valid, [&] {
      return Json{{"T", detail::map_json(t)}, {"brute_force", brute}, {"search", found.has_value()}};
    });
    for (int rep = 0; rep < 3; ++rep) {
      const auto o = coin(0.5) ? Orientation::Ascending : Orientation::Descending;
      const auto m = random_chain_map(b, 5, o);
      const bool df = m.order().leq(colim_chain(compose(m, t)), colim_chain(m));
      ledger_.record("df30_colim_pullback", df, [&] { return Json{{"T", detail::map_json(t)}, {"m", detail::chain_json(m)}}; });
      if (found) {
        const bool ok = check_colim_preservation(m, t);
        ledger_.record("sd40_colim_preservation", ok,
                       [&] { return Json{{"T", detail::map_json(t)}, {"R", detail::chain_json(m)}}; });
      }
    }
  }

  void check_ddp3(const FinitePreorder& a) {
    const auto b = random_preorder(5);
    const auto c = random_preorder(5);
    const auto t1 = random_monotone(a, b);
    const auto t2 = random_monotone(b, c);
    if (!post_right_adjoint(t1) || !post_right_adjoint(t2)) return;
    const auto composite = compose_post_rae(t1, t2);
    ledger_.record("ddp3_composition", composite && is_post_right_adjoint(compose(t2, t1), *composite),
                   [&] { return Json{{"T1", detail::map_json(t1)}, {"T2", detail::map_json(t2)}}; });
  }

  /// Qualifying F, G and F F' <= G G' pointwise force F' <= G' pointwise.
  void check_qlf_actn(const FinitePreorder& c) {
    std::vector<std::pair<MonotoneMap, MonotoneMap>> pairs;
    pairs.emplace_back(MonotoneMap::identity(c), MonotoneMap::identity(c));
    const auto d = random_preorder(5);
    for (int i = 0; i < 12; ++i) {
      auto f = random_monotone(c, d);
      auto g = coin(0.5) ? f : random_monotone(c, d);
      if (is_qualifying_pair(f, g)) pairs.emplace_back(std::move(f), std::move(g));
    }
    for (const auto& [f, g] : pairs) {
      const auto e = random_preorder(4);
      for (int i = 0; i < 8; ++i) {
        const auto f1 = random_monotone(e, c);
        const auto g1 = coin(0.3) ? f1 : random_monotone(e, c);
        if (!nat_trans_exists(compose(f, f1), compose(g, g1))) continue;
        ledger_.record("qlf_actn_reflection", nat_trans_exists(f1, g1), [&] {
          return Json{{"F", detail::map_json(f)}, {"G", detail::map_json(g)}, {"F'", detail::map_json(f1)},
                      {"G'", detail::map_json(g1)}};
        });
      }
    }
  }

  /// (L, D) qualifying into E and a sequence P : chain -> C with D P
  /// post-r.a.e.: colim Lan_D m equals colim m P and is bounded by the max
  /// of m along P.
  void check_lim_qual(const FinitePreorder& c) {
    std::optional<std::pair<MonotoneMap, MonotoneMap>> ld;
    if (coin(0.5)) {
      ld.emplace(MonotoneMap::identity(c), MonotoneMap::identity(c));
    } else {
      const auto e = FinitePreorder::chain(uniform(2, 6));
      for (int i = 0; i < 20 && !ld; ++i) {
        auto l = random_monotone(c, e);
        auto d = coin(0.5) ? l : random_monotone(c, e);
        if (is_qualifying_pair(l, d)) ld.emplace(std::move(l), std::move(d));
      }
    }
    if (!ld) return;
    const auto& d = ld->second;
    const auto seq_dom = FinitePreorder::chain(uniform(1, 6));
    for (int i = 0; i < 10; ++i) {
      const auto p = random_monotone(seq_dom, c);
      if (!post_right_adjoint(compose(d, p))) continue;
      const auto o = coin(0.5) ? Orientation::Ascending : Orientation::Descending;
      const auto m = random_chain_map(c, 5, o);
      const ChainValue kan = colim_chain(left_kan(m, d));
      const ChainValue along = colim_chain(compose(m, p));
      auto dump = [&] {
        return Json{{"L", detail::map_json(ld->first)}, {"D", detail::map_json(d)}, {"P", detail::map_json(p)},
                    {"m", detail::chain_json(m)}};
      };
      ledger_.record("lim_qual_colim", kan == along, dump);
      ChainValue best = m.order().bottom();
      for (auto idx : p.values()) best = m.order().join(best, m(idx));
      ledger_.record("ddkw_colim_bound", m.order().leq(kan, best), dump);
      return;
    }
  }

  void check_lp4d9() {
    const std::vector<double> grid = geometric_grid(1.0, 0.5, 12);
    for (double a : {1.0, 1.5, 2.0, 2.01, 3.0, 10.0}) {
      const auto r = verify_scale_adjoint(grid, a);
      ledger_.record("lp4d9_division", r.monotone && r.post_right_adjoint && r.right_inverse,
                     [&] { return Json{{"a", a}}; });
    }
  }

  /// One three-node instance by rejection sampling: node maps take values in
  /// {0, 1, 2}; each edge samples F_ij, G_ij until F_ij has a post-right
  /// adjoint and the pointwise witness holds. Returns false when a draw fails.
  bool try_entangle_instance(bool cycle) {
    std::vector<ChainMap> nodes;
    const auto o = coin(0.5) ? Orientation::Ascending : Orientation::Descending;
    for (int i = 0; i < 3; ++i) nodes.push_back(random_chain_map(random_preorder(4), 3, o));
    std::vector<std::pair<std::size_t, std::size_t>> shape{{0, 1}, {1, 2}};
    if (cycle) shape.emplace_back(2, 0);
    std::vector<EntangleEdge> edges;
    for (auto [i, j] : shape) {
      bool done = false;
      for (int attempt = 0; attempt < 60 && !done; ++attempt) {
        const auto a = random_preorder(4);
        auto f = random_monotone(a, nodes[i].dom());
        if (!post_right_adjoint(f)) continue;
        auto g = random_monotone(a, nodes[j].dom());
        if (!nat_trans_exists(compose(nodes[i], f), compose(nodes[j], g))) continue;
        edges.push_back({i, j, std::move(f), std::move(g)});
        done = true;
      }
      if (!done) return false;
    }
    const auto v = entangle_check(nodes, edges);
    ledger_.record("entangle_scc", v.all_hold, [&] {
      Json ns = Json::array();
      for (const auto& n : nodes) ns.push_back(detail::chain_json(n));
      Json es = Json::array();
      for (const auto& e : edges)
        es.push_back(Json{{"from", e.from}, {"to", e.to}, {"F", detail::map_json(e.f)}, {"G", detail::map_json(e.g)}});
      return Json{{"nodes", ns}, {"edges", es}};
    });
    return true;
  }

  void check_entangle() {
    std::size_t accepted = 0;
    for (std::size_t draws = 0; accepted < opt_.entangle_instances && draws < opt_.entangle_instances * 200; ++draws)
      if (try_entangle_instance(accepted % 3 != 2)) ++accepted;
  }

  void run_preorder(const FinitePreorder& p) {
    check_od30(p);
    check_kan(p, coin(0.5) ? Orientation::Ascending : Orientation::Descending);
    check_adjoint_lemmas(random_monotone(p, random_preorder(opt_.max_objects)));
    check_adjoint_lemmas(random_monotone(random_preorder(opt_.max_objects), p));
    check_ddp3(p);
    check_qlf_actn(p);
    check_lim_qual(p);
  }

  void run_bundled() {
    for (std::size_t i = 0; i < opt_.preorders; ++i) run_preorder(random_preorder(opt_.max_objects));
    check_lp4d9();
    check_entangle();
  }

  void run_fixture(const CatFixture& fx) {
    for (const auto& p : fx.preorders) run_preorder(p);
    for (const auto& m : fx.maps) check_adjoint_lemmas(m.map);
    check_lp4d9();
    check_entangle();
  }

 private:
  CatOptions opt_;
  InvariantLedger& ledger_;
  std::mt19937_64 rng_;
};

inline InvariantLedger run_cat_suite(const CatOptions& opt, const CatFixture* fixture = nullptr) {
  InvariantLedger ledger;
  CatSuite suite(opt, ledger);
  if (fixture) suite.run_fixture(*fixture);
  else suite.run_bundled();
  return ledger;
}

}  // namespace entrolab
