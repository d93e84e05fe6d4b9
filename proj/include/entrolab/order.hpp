#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entrolab/error.hpp"

namespace entrolab {

/// Reflexive, transitive relation on objects 0..n-1.
class FinitePreorder {
 public:
  FinitePreorder() = default;

  /// Validates reflexivity and transitivity of a row-major relation.
  FinitePreorder(std::size_t n, std::vector<char> leq) : n_(n), leq_(std::move(leq)) {
    if (leq_.size() != n_ * n_) fail(ErrorKind::NotAPreorder, "relation matrix has the wrong size");
    for (std::size_t i = 0; i < n_; ++i)
      if (!leq_[i * n_ + i]) fail(ErrorKind::NotAPreorder, "object " + std::to_string(i) + " is not <= itself");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        if (!leq_[i * n_ + j]) continue;
        for (std::size_t k = 0; k < n_; ++k)
          if (leq_[j * n_ + k] && !leq_[i * n_ + k])
            fail(ErrorKind::NotAPreorder, std::to_string(i) + "<=" + std::to_string(j) + "<=" + std::to_string(k) +
                                              " but not " + std::to_string(i) + "<=" + std::to_string(k));
      }
  }

  static FinitePreorder from_rows(const std::vector<std::vector<bool>>& rows) {
    const std::size_t n = rows.size();
    std::vector<char> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) fail(ErrorKind::NotAPreorder, "row " + std::to_string(i) + " has the wrong length");
      for (std::size_t j = 0; j < n; ++j) leq[i * n + j] = rows[i][j];
    }
    return FinitePreorder(n, std::move(leq));
  }

  /// Reflexive-transitive closure of the given pairs.
  static FinitePreorder generated_by(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<char> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    for (auto [a, b] : pairs) {
      if (a >= n || b >= n) fail(ErrorKind::IndexOutOfRange, "generator names a missing object");
      leq[a * n + b] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq[i * n + k])
          for (std::size_t j = 0; j < n; ++j)
            if (leq[k * n + j]) leq[i * n + j] = 1;
    return FinitePreorder(n, std::move(leq));
  }

  /// 0 < 1 < ... < n-1.
  static FinitePreorder chain(std::size_t n) {
    std::vector<char> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) leq[i * n + j] = 1;
    return FinitePreorder(n, std::move(leq));
  }

  static FinitePreorder antichain(std::size_t n) {
    std::vector<char> leq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = 1;
    return FinitePreorder(n, std::move(leq));
  }

  FinitePreorder opposite() const {
    std::vector<char> op(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) op[i * n_ + j] = leq_[j * n_ + i];
    FinitePreorder p;
    p.n_ = n_;
    p.leq_ = std::move(op);
    return p;
  }

  /// The induced preorder on the listed objects, in list order.
  FinitePreorder restrict_to(const std::vector<std::size_t>& objects) const {
    const std::size_t m = objects.size();
    std::vector<char> sub(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sub[i * m + j] = leq(objects[i], objects[j]);
    FinitePreorder p;
    p.n_ = m;
    p.leq_ = std::move(sub);
    return p;
  }

  std::size_t size() const noexcept { return n_; }
  bool leq(std::size_t i, std::size_t j) const noexcept { return leq_[i * n_ + j]; }
  bool equivalent(std::size_t i, std::size_t j) const noexcept { return leq(i, j) && leq(j, i); }
  bool less(std::size_t i, std::size_t j) const noexcept { return leq(i, j) && !leq(j, i); }
  const std::vector<char>& relation() const noexcept { return leq_; }

  friend bool operator==(const FinitePreorder&, const FinitePreorder&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<char> leq_;
};

/// Order-preserving map between finite preorders.
class MonotoneMap {
 public:
  MonotoneMap() = default;
  MonotoneMap(FinitePreorder dom, FinitePreorder cod, std::vector<std::size_t> values)
      : dom_(std::move(dom)), cod_(std::move(cod)), values_(std::move(values)) {
    if (values_.size() != dom_.size())
      fail(ErrorKind::NotMonotone, "map has " + std::to_string(values_.size()) + " values for " +
                                       std::to_string(dom_.size()) + " objects");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] >= cod_.size()) fail(ErrorKind::IndexOutOfRange, "value of object " + std::to_string(i));
    for (std::size_t i = 0; i < dom_.size(); ++i)
      for (std::size_t j = 0; j < dom_.size(); ++j)
        if (dom_.leq(i, j) && !cod_.leq(values_[i], values_[j]))
          fail(ErrorKind::NotMonotone, std::to_string(i) + "<=" + std::to_string(j) + " is not preserved");
  }

  static MonotoneMap identity(const FinitePreorder& p) {
    std::vector<std::size_t> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return MonotoneMap(p, p, std::move(v));
  }

  static MonotoneMap constant(const FinitePreorder& dom, const FinitePreorder& cod, std::size_t value) {
    return MonotoneMap(dom, cod, std::vector<std::size_t>(dom.size(), value));
  }

  const FinitePreorder& dom() const noexcept { return dom_; }
  const FinitePreorder& cod() const noexcept { return cod_; }
  const std::vector<std::size_t>& values() const noexcept { return values_; }
  std::size_t operator()(std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const MonotoneMap&, const MonotoneMap&) = default;

 private:
  FinitePreorder dom_, cod_;
  std::vector<std::size_t> values_;
};

/// g after f.
inline MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
  if (!(f.cod() == g.dom())) fail(ErrorKind::SignatureMismatch, "composition of non-matching maps");
  std::vector<std::size_t> v(f.dom().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(f(i));
  return MonotoneMap(f.dom(), g.cod(), std::move(v));
}

/// Exhaustive list of monotone maps dom -> cod (backtracking with pruning).
inline std::vector<MonotoneMap> all_monotone_maps(const FinitePreorder& dom, const FinitePreorder& cod,
                                                  std::size_t limit = 1'000'000) {
  std::vector<MonotoneMap> out;
  std::vector<std::size_t> v(dom.size());
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (out.size() >= limit) return;
    if (i == dom.size()) {
      out.emplace_back(dom, cod, v);
      return;
    }
    for (std::size_t c = 0; c < cod.size(); ++c) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (dom.leq(j, i) && !cod.leq(v[j], c)) ok = false;
        if (dom.leq(i, j) && !cod.leq(c, v[j])) ok = false;
      }
      if (!ok) continue;
      v[i] = c;
      self(self, i + 1);
    }
  };
  if (cod.size() > 0 || dom.size() == 0) rec(rec, 0);
  return out;
}

/// An extended real: any double except NaN, so -inf and +inf are available.
struct ChainValue {
  double v = 0.0;

  ChainValue() = default;
  constexpr ChainValue(double x) : v(x) {}  // NOLINT(google-explicit-constructor)

  static constexpr ChainValue neg_inf() { return ChainValue(-std::numeric_limits<double>::infinity()); }
  static constexpr ChainValue pos_inf() { return ChainValue(std::numeric_limits<double>::infinity()); }

  friend constexpr auto operator<=>(ChainValue a, ChainValue b) { return a.v <=> b.v; }
  friend constexpr bool operator==(ChainValue a, ChainValue b) { return a.v == b.v; }
};

/// Which way the numeric order runs in a value chain.
enum class Orientation {
  /// Smaller numbers are lower.
  Ascending,
  /// Larger numbers are lower (grains ordered by >=).
  Descending,
};

/// Comparison and lattice operations on the extended reals under an orientation.
struct ValueOrder {
  Orientation orientation = Orientation::Ascending;

  bool leq(ChainValue a, ChainValue b) const noexcept {
    return orientation == Orientation::Ascending ? a.v <= b.v : a.v >= b.v;
  }
  ChainValue bottom() const noexcept {
    return orientation == Orientation::Ascending ? ChainValue::neg_inf() : ChainValue::pos_inf();
  }
  ChainValue top() const noexcept {
    return orientation == Orientation::Ascending ? ChainValue::pos_inf() : ChainValue::neg_inf();
  }
  ChainValue join(ChainValue a, ChainValue b) const noexcept { return leq(a, b) ? b : a; }
  ChainValue meet(ChainValue a, ChainValue b) const noexcept { return leq(a, b) ? a : b; }

  friend bool operator==(const ValueOrder&, const ValueOrder&) = default;
};

/// Monotone map from a finite preorder into the extended reals.
class ChainMap {
 public:
  ChainMap() = default;
  ChainMap(FinitePreorder dom, std::vector<ChainValue> values, Orientation o = Orientation::Ascending)
      : dom_(std::move(dom)), values_(std::move(values)), order_{o} {
    if (values_.size() != dom_.size()) fail(ErrorKind::NotMonotone, "value count does not match the domain");
    for (auto x : values_)
      if (std::isnan(x.v)) fail(ErrorKind::InvalidEntry, "chain value is NaN");
    for (std::size_t i = 0; i < dom_.size(); ++i)
      for (std::size_t j = 0; j < dom_.size(); ++j)
        if (dom_.leq(i, j) && !order_.leq(values_[i], values_[j]))
          fail(ErrorKind::NotMonotone, std::to_string(i) + "<=" + std::to_string(j) + " is not preserved");
  }

  const FinitePreorder& dom() const noexcept { return dom_; }
  const std::vector<ChainValue>& values() const noexcept { return values_; }
  ChainValue operator()(std::size_t i) const noexcept { return values_[i]; }
  ValueOrder order() const noexcept { return order_; }
  Orientation orientation() const noexcept { return order_.orientation; }

  friend bool operator==(const ChainMap&, const ChainMap&) = default;

 private:
  FinitePreorder dom_;
  std::vector<ChainValue> values_;
  ValueOrder order_;
};

/// R after T.
inline ChainMap compose(const ChainMap& r, const MonotoneMap& t) {
  if (!(t.cod() == r.dom())) fail(ErrorKind::SignatureMismatch, "composition of non-matching maps");
  std::vector<ChainValue> v(t.dom().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = r(t(i));
  return ChainMap(t.dom(), std::move(v), r.orientation());
}

/// The finite chain of distinct values of f, ordered by f's orientation,
/// and f re-expressed as a MonotoneMap into it.
inline MonotoneMap as_monotone_map(const ChainMap& f) {
  std::vector<ChainValue> distinct = f.values();
  const ValueOrder ord = f.order();
  std::sort(distinct.begin(), distinct.end(), [&](auto a, auto b) { return ord.leq(a, b) && !(a == b); });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> idx(f.dom().size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    idx[i] = static_cast<std::size_t>(std::find(distinct.begin(), distinct.end(), f(i)) - distinct.begin());
  return MonotoneMap(f.dom(), FinitePreorder::chain(distinct.size()), std::move(idx));
}

/// Two chain maps re-expressed over the common chain of their values.
inline std::pair<MonotoneMap, MonotoneMap> as_monotone_pair(const ChainMap& f, const ChainMap& g) {
  if (!(f.dom() == g.dom()) || f.orientation() != g.orientation())
    fail(ErrorKind::SignatureMismatch, "maps do not share domain and orientation");
  const ValueOrder ord = f.order();
  std::vector<ChainValue> distinct = f.values();
  distinct.insert(distinct.end(), g.values().begin(), g.values().end());
  std::sort(distinct.begin(), distinct.end(), [&](auto a, auto b) { return ord.leq(a, b) && !(a == b); });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  auto index = [&](ChainValue x) {
    return static_cast<std::size_t>(std::find(distinct.begin(), distinct.end(), x) - distinct.begin());
  };
  std::vector<std::size_t> fi(f.dom().size()), gi(g.dom().size());
  for (std::size_t i = 0; i < fi.size(); ++i) {
    fi[i] = index(f(i));
    gi[i] = index(g(i));
  }
  const auto chain = FinitePreorder::chain(distinct.size());
  return {MonotoneMap(f.dom(), chain, std::move(fi)), MonotoneMap(g.dom(), chain, std::move(gi))};
}

namespace detail {

inline void require_parallel(const MonotoneMap& f, const MonotoneMap& g) {
  if (!(f.dom() == g.dom()) || !(f.cod() == g.cod()))
    fail(ErrorKind::SignatureMismatch, "maps do not share domain and codomain");
}

}  // namespace detail

/// A natural transformation F => G exists iff F(x) <= G(x) for every x.
inline bool nat_trans_exists(const MonotoneMap& f, const MonotoneMap& g) {
  detail::require_parallel(f, g);
  for (std::size_t x = 0; x < f.dom().size(); ++x)
    if (!f.cod().leq(f(x), g(x))) return false;
  return true;
}

inline bool nat_trans_exists(const ChainMap& f, const ChainMap& g) {
  if (!(f.dom() == g.dom()) || f.orientation() != g.orientation())
    fail(ErrorKind::SignatureMismatch, "maps do not share domain and orientation");
  for (std::size_t x = 0; x < f.dom().size(); ++x)
    if (!f.order().leq(f(x), g(x))) return false;
  return true;
}

/// Objects (d, e) of the comma preorder F/G: F(d) <= G(e).
inline std::vector<std::pair<std::size_t, std::size_t>> comma_objects(const MonotoneMap& f, const MonotoneMap& g) {
  if (!(f.cod() == g.cod())) fail(ErrorKind::CodomainMismatch, "maps have different codomains");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t d = 0; d < f.dom().size(); ++d)
    for (std::size_t e = 0; e < g.dom().size(); ++e)
      if (f.cod().leq(f(d), g(e))) out.emplace_back(d, e);
  return out;
}

/// F => G, and F(c1) <= G(c2) forces c1 <= c2.
inline bool is_qualifying_pair(const MonotoneMap& f, const MonotoneMap& g) {
  if (!nat_trans_exists(f, g)) return false;
  for (auto [c1, c2] : comma_objects(f, g))
    if (!f.dom().leq(c1, c2)) return false;
  return true;
}

/// First pair (c1, c2) with F(c1) <= G(c2) but not c1 <= c2, or the first x
/// with F(x) not <= G(x) reported as (x, x).
inline std::optional<std::pair<std::size_t, std::size_t>> qualifying_counterexample(const MonotoneMap& f,
                                                                                     const MonotoneMap& g) {
  detail::require_parallel(f, g);
  for (std::size_t x = 0; x < f.dom().size(); ++x)
    if (!f.cod().leq(f(x), g(x))) return std::pair{x, x};
  for (auto [c1, c2] : comma_objects(f, g))
    if (!f.dom().leq(c1, c2)) return std::pair{c1, c2};
  return std::nullopt;
}

/// Pointwise left Kan extension of F along K: d -> sup { F(x) : K(x) <= d }.
inline ChainMap left_kan(const ChainMap& f, const MonotoneMap& k) {
  if (!(f.dom() == k.dom())) fail(ErrorKind::SignatureMismatch, "F and K have different domains");
  const ValueOrder ord = f.order();
  const auto& d = k.cod();
  std::vector<ChainValue> out(d.size(), ord.bottom());
  for (std::size_t y = 0; y < d.size(); ++y)
    for (std::size_t x = 0; x < f.dom().size(); ++x)
      if (d.leq(k(x), y)) out[y] = ord.join(out[y], f(x));
  return ChainMap(d, std::move(out), f.orientation());
}

/// Pointwise right Kan extension of F along K: d -> inf { F(x) : d <= K(x) }.
inline ChainMap right_kan(const ChainMap& f, const MonotoneMap& k) {
  if (!(f.dom() == k.dom())) fail(ErrorKind::SignatureMismatch, "F and K have different domains");
  const ValueOrder ord = f.order();
  const auto& d = k.cod();
  std::vector<ChainValue> out(d.size(), ord.top());
  for (std::size_t y = 0; y < d.size(); ++y)
    for (std::size_t x = 0; x < f.dom().size(); ++x)
      if (d.leq(y, k(x))) out[y] = ord.meet(out[y], f(x));
  return ChainMap(d, std::move(out), f.orientation());
}

/// sup of the image, in the map's orientation; the bottom sentinel when the
/// domain is empty.
inline ChainValue colim_chain(const ChainMap& f) {
  const ValueOrder ord = f.order();
  ChainValue s = ord.bottom();
  for (auto v : f.values()) s = ord.join(s, v);
  return s;
}

/// inf of the image, in the map's orientation.
inline ChainValue lim_chain(const ChainMap& f) {
  const ValueOrder ord = f.order();
  ChainValue s = ord.top();
  for (auto v : f.values()) s = ord.meet(s, v);
  return s;
}

/// Does S : B -> A satisfy b <= T(S(b)) for all b?
inline bool is_post_right_adjoint(const MonotoneMap& t, const MonotoneMap& s) {
  if (!(s.dom() == t.cod()) || !(s.cod() == t.dom())) return false;
  for (std::size_t b = 0; b < t.cod().size(); ++b)
    if (!t.cod().leq(b, t(s(b)))) return false;
  return true;
}

struct AdjointSearchOptions {
  /// Exhaustive search runs only when the product of candidate-set sizes is
  /// below this.
  std::uint64_t max_candidates = 1'000'000;
};

/// Some monotone T* : B -> A with b <= T(T*(b)) for all b, if one exists.
///
/// First tries the canonical choice: per b, the least element of
/// {a : b <= T(a)} when it has one, else its first minimal element. When that
/// choice is not monotone, searches all choices by backtracking.
inline std::optional<MonotoneMap> post_right_adjoint(const MonotoneMap& t, const AdjointSearchOptions& opt = {}) {
  const auto& a = t.dom();
  const auto& b = t.cod();
  std::vector<std::vector<std::size_t>> candidates(b.size());
  for (std::size_t y = 0; y < b.size(); ++y) {
    for (std::size_t x = 0; x < a.size(); ++x)
      if (b.leq(y, t(x))) candidates[y].push_back(x);
    if (candidates[y].empty()) return std::nullopt;
  }

  std::vector<std::size_t> canonical(b.size());
  for (std::size_t y = 0; y < b.size(); ++y) {
    const auto& c = candidates[y];
    std::optional<std::size_t> least, minimal;
    for (auto x : c) {
      bool below_all = true, has_strictly_below = false;
      for (auto z : c) {
        if (!a.leq(x, z)) below_all = false;
        if (a.less(z, x)) has_strictly_below = true;
      }
      if (below_all && !least) least = x;
      if (!has_strictly_below && !minimal) minimal = x;
    }
    canonical[y] = least ? *least : *minimal;
  }
  auto monotone = [&](const std::vector<std::size_t>& v) {
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (b.leq(i, j) && !a.leq(v[i], v[j])) return false;
    return true;
  };
  if (monotone(canonical)) return MonotoneMap(b, a, canonical);

  double product = 1.0;
  for (const auto& c : candidates) product *= static_cast<double>(c.size());
  if (product >= static_cast<double>(opt.max_candidates)) return std::nullopt;

  std::vector<std::size_t> v(b.size());
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == b.size()) return true;
    for (auto x : candidates[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        if (b.leq(j, i) && !a.leq(v[j], x)) ok = false;
        if (b.leq(i, j) && !a.leq(x, v[j])) ok = false;
      }
      if (!ok) continue;
      v[i] = x;
      if (self(self, i + 1)) return true;
    }
    return false;
  };
  if (rec(rec, 0)) return MonotoneMap(b, a, v);
  return std::nullopt;
}

/// colim R == colim (R after T). Throws AdjointMissing when T has no
/// post-right adjoint.
inline bool check_colim_preservation(const ChainMap& r, const MonotoneMap& t) {
  if (!post_right_adjoint(t)) fail(ErrorKind::AdjointMissing, "T has no post-right adjoint");
  return colim_chain(r) == colim_chain(compose(r, t));
}

/// T1* after T2*, returned only when it is a post-right adjoint of T2 after T1.
inline std::optional<MonotoneMap> compose_post_rae(const MonotoneMap& t1, const MonotoneMap& t1_star,
                                                   const MonotoneMap& t2, const MonotoneMap& t2_star) {
  if (!(t1.cod() == t2.dom())) fail(ErrorKind::SignatureMismatch, "T1 and T2 do not compose");
  const MonotoneMap composite = compose(t2, t1);
  MonotoneMap candidate = compose(t1_star, t2_star);
  if (!is_post_right_adjoint(composite, candidate)) return std::nullopt;
  return candidate;
}

inline std::optional<MonotoneMap> compose_post_rae(const MonotoneMap& t1, const MonotoneMap& t2) {
  const auto s1 = post_right_adjoint(t1);
  const auto s2 = post_right_adjoint(t2);
  if (!s1 || !s2) return std::nullopt;
  return compose_post_rae(t1, *s1, t2, *s2);
}

/// Edge i -> j of an entanglement graph: F_ij : A -> C_i with a post-right
/// adjoint, G_ij : A -> C_j, and F_i F_ij <= F_j G_ij pointwise.
struct EntangleEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  MonotoneMap f;
  MonotoneMap g;
};

struct EntanglePair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool reachable = false;
  bool same_component = false;
  bool holds = true;
};

struct EntangleVerdict {
  std::vector<ChainValue> colims;
  std::vector<std::size_t> component;
  std::vector<EntanglePair> pairs;
  bool all_hold = true;
};

/// Strongly connected component id per node (ids in order of first node).
inline std::vector<std::size_t> strongly_connected(std::size_t n, const std::vector<std::vector<char>>& reach) {
  std::vector<std::size_t> comp(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != n) continue;
    for (std::size_t j = i; j < n; ++j)
      if (comp[j] == n && reach[i][j] && reach[j][i]) comp[j] = next;
    ++next;
  }
  return comp;
}

/// Checks every edge precondition, then compares node colimits along paths
/// (<=) and within strongly connected components (==).
inline EntangleVerdict entangle_check(const std::vector<ChainMap>& nodes, const std::vector<EntangleEdge>& edges) {
  const std::size_t n = nodes.size();
  std::string bad;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    const std::string tag = "edge " + std::to_string(ed.from) + "->" + std::to_string(ed.to);
    if (ed.from >= n || ed.to >= n) fail(ErrorKind::PreconditionFailed, tag + " names a missing node");
    if (nodes[ed.from].orientation() != nodes[ed.to].orientation())
      fail(ErrorKind::PreconditionFailed, tag + " joins nodes of different orientation");
    if (!(ed.f.cod() == nodes[ed.from].dom()) || !(ed.g.cod() == nodes[ed.to].dom()) || !(ed.f.dom() == ed.g.dom())) {
      bad += (bad.empty() ? "" : "; ") + tag + " has mismatched signatures";
      continue;
    }
    if (!post_right_adjoint(ed.f)) bad += (bad.empty() ? "" : "; ") + tag + " has no post-right adjoint";
    if (!nat_trans_exists(compose(nodes[ed.from], ed.f), compose(nodes[ed.to], ed.g)))
      bad += (bad.empty() ? "" : "; ") + tag + " fails the pointwise witness";
  }
  if (!bad.empty()) fail(ErrorKind::PreconditionFailed, bad);

  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
  for (const auto& ed : edges) reach[ed.from][ed.to] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  EntangleVerdict v;
  v.component = strongly_connected(n, reach);
  for (const auto& f : nodes) v.colims.push_back(colim_chain(f));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !reach[i][j]) continue;
      EntanglePair p{i, j, true, v.component[i] == v.component[j], true};
      const ValueOrder ord = nodes[i].order();
      p.holds = p.same_component ? v.colims[i] == v.colims[j] : ord.leq(v.colims[i], v.colims[j]);
      v.all_hold = v.all_hold && p.holds;
      v.pairs.push_back(p);
    }
  }
  return v;
}

/// x -> min(a x, 1) on grains.
inline double scale_eps(double x, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::ParamOutOfRange, "scale factor must be positive");
  if (!(x > 0.0 && x <= 1.0)) fail(ErrorKind::InvalidGrain, "grain must lie in (0, 1]");
  return std::min(a * x, 1.0);
}

/// y -> min(y / a, 1), the candidate post-right adjoint of scale_eps(., a).
inline double divide_eps(double y, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::ParamOutOfRange, "scale factor must be positive");
  if (!(y > 0.0 && y <= 1.0)) fail(ErrorKind::InvalidGrain, "grain must lie in (0, 1]");
  return std::min(y / a, 1.0);
}

struct ScaleAdjointReport {
  bool monotone = true;
  /// y <= scale(divide(y)) for every grid grain.
  bool post_right_adjoint = true;
  /// scale(divide(y)) == y for every grid grain.
  bool right_inverse = true;
};

/// Comparisons allow a relative rounding slack of `rel_tol`: x * a / a need
/// not reproduce x exactly in binary floating point.
inline ScaleAdjointReport verify_scale_adjoint(const std::vector<double>& grid, double a, double rel_tol = 1e-12) {
  ScaleAdjointReport r;
  std::vector<double> g = grid;
  std::sort(g.begin(), g.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double back = scale_eps(divide_eps(g[i], a), a);
    const double slack = rel_tol * g[i];
    if (back < g[i] - slack) r.post_right_adjoint = false;
    if (std::abs(back - g[i]) > slack) r.right_inverse = false;
    if (i > 0) {
      if (divide_eps(g[i - 1], a) > divide_eps(g[i], a)) r.monotone = false;
      if (scale_eps(g[i - 1], a) > scale_eps(g[i], a)) r.monotone = false;
    }
  }
  return r;
}

}  // namespace entrolab
