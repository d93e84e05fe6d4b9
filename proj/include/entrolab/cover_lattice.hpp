#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "entrolab/covers.hpp"
#include "entrolab/error.hpp"
#include "entrolab/metric.hpp"
#include "entrolab/order.hpp"

namespace entrolab {

/// Exhaustive cover machinery for spaces of at most six points.
///
/// Coarseness, diameter and Lebesgue number only depend on the maximal pieces
/// of a cover, so every cover is order-equivalent to exactly one antichain
/// cover (a covering family of pairwise incomparable subsets). Subsets are
/// bitmasks over points; families of subsets are 64-bit masks over subsets.
class SmallCoverLattice {
 public:
  static constexpr std::size_t kMaxPoints = 6;

  explicit SmallCoverLattice(FiniteMetricSpace space) : space_(std::move(space)) {
    n_ = space_.size();
    if (n_ > kMaxPoints) fail(ErrorKind::ParamOutOfRange, "exhaustive cover lattice needs at most 6 points");
    subsets_ = std::size_t{1} << n_;
    full_ = static_cast<unsigned>(subsets_ - 1);
    diam_.assign(subsets_, 0.0);
    gap_.assign(subsets_ * n_, 0.0);
    down_.assign(subsets_, 0);
    comparable_.assign(subsets_, 0);
    for (unsigned s = 1; s < subsets_; ++s) {
      for (std::size_t a = 0; a < n_; ++a) {
        if (!(s >> a & 1U)) continue;
        for (std::size_t b = a + 1; b < n_; ++b)
          if (s >> b & 1U) diam_[s] = std::max(diam_[s], space_(a, b));
        double g = 1.0;
        if (s != full_)
          for (std::size_t y = 0; y < n_; ++y)
            if (!(s >> y & 1U)) g = std::min(g, space_(a, y));
        gap_[s * n_ + a] = g;
      }
      for (unsigned t = 1; t < subsets_; ++t) {
        if ((t & s) == t) down_[s] |= std::uint64_t{1} << t;
        if ((t & s) == t || (t & s) == s) comparable_[s] |= std::uint64_t{1} << t;
      }
    }
  }

  std::size_t points() const noexcept { return n_; }
  const FiniteMetricSpace& space() const noexcept { return space_; }

  /// Subsets (as a family mask) with diameter < bound, or <= bound.
  std::uint64_t small_subsets(double bound, bool inclusive) const {
    std::uint64_t m = 0;
    for (unsigned s = 1; s < subsets_; ++s)
      if (inclusive ? diam_[s] <= bound : diam_[s] < bound) m |= std::uint64_t{1} << s;
    return m;
  }

  double subset_diameter(unsigned s) const { return diam_[s]; }

  /// Calls visit(pieces, down_mask, lebesgue, diameter) once per antichain
  /// cover. `pieces` are point bitmasks in increasing order. Returning false
  /// from visit stops the enumeration.
  template <class Visit>
  std::size_t for_each_antichain_cover(Visit&& visit) const {
    std::vector<unsigned> pieces;
    std::array<double, kMaxPoints> best{};
    std::size_t count = 0;
    bool stop = false;
    auto rec = [&](auto&& self, unsigned start, std::uint64_t blocked, std::uint64_t down, unsigned covered,
                   double diam) -> void {
      if (stop) return;
      if (covered == full_ && !pieces.empty()) {
        ++count;
        double leb = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < n_; ++x) leb = std::min(leb, best[x]);
        if (!visit(pieces, down, leb, diam)) {
          stop = true;
          return;
        }
      }
      for (unsigned s = start; s < subsets_; ++s) {
        if (blocked >> s & 1U) continue;
        const auto saved = best;
        for (std::size_t x = 0; x < n_; ++x)
          if (s >> x & 1U) best[x] = std::max(best[x], gap_[s * n_ + x]);
        pieces.push_back(s);
        self(self, s + 1, blocked | comparable_[s], down | down_[s], covered | s, std::max(diam, diam_[s]));
        pieces.pop_back();
        best = saved;
        if (stop) return;
      }
    };
    rec(rec, 1, 0, 0, 0, 0.0);
    return count;
  }

  /// Materializes every antichain cover as a Cover.
  std::vector<Cover> all_covers() const {
    std::vector<Cover> out;
    for_each_antichain_cover([&](const std::vector<unsigned>& pieces, std::uint64_t, double, double) {
      out.push_back(to_cover(pieces));
      return true;
    });
    return out;
  }

  Cover to_cover(const std::vector<unsigned>& pieces) const {
    std::vector<PointSet> sets;
    for (auto s : pieces) {
      PointSet p(n_);
      for (std::size_t x = 0; x < n_; ++x)
        if (s >> x & 1U) p.set(x);
      sets.push_back(std::move(p));
    }
    return Cover(space_, sets);
  }

  std::string describe(const std::vector<unsigned>& pieces) const {
    std::string out = "{";
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      out += i ? ",{" : "{";
      bool first = true;
      for (std::size_t x = 0; x < n_; ++x)
        if (pieces[i] >> x & 1U) {
          out += (first ? "" : ",") + std::to_string(x);
          first = false;
        }
      out += "}";
    }
    return out + "}";
  }

 private:
  FiniteMetricSpace space_;
  std::size_t n_ = 0;
  std::size_t subsets_ = 0;
  unsigned full_ = 0;
  std::vector<double> diam_;
  std::vector<double> gap_;
  std::vector<std::uint64_t> down_;
  std::vector<std::uint64_t> comparable_;
};

struct LebesgueLemmaReport {
  std::size_t covers = 0;
  std::size_t violations = 0;
  std::optional<std::string> counterexample;
};

/// Checks diam(b) < Leb(a) => a coarser than b for every pair of covers.
///
/// For fixed a the covers b with diam(b) < Leb(a) are exactly the families of
/// subsets of diameter < Leb(a), so the pair condition reduces to: every such
/// subset lies in a piece of a.
inline LebesgueLemmaReport lebesgue_lemma_exhaustive(const SmallCoverLattice& lat) {
  LebesgueLemmaReport r;
  r.covers = lat.for_each_antichain_cover([&](const std::vector<unsigned>& pieces, std::uint64_t down, double leb,
                                              double) {
    const std::uint64_t need = lat.small_subsets(leb, false);
    if ((need & ~down) != 0) {
      ++r.violations;
      if (!r.counterexample) {
        const unsigned s = static_cast<unsigned>(std::countr_zero(need & ~down));
        r.counterexample = "a=" + lat.describe(pieces) + " Leb=" + std::to_string(leb) + " misses subset " +
                           lat.describe({s}) + " of diameter " + std::to_string(lat.subset_diameter(s));
      }
    }
    return true;
  });
  return r;
}

struct QualifyingReport {
  std::size_t covers = 0;
  bool qualifying = true;
  std::optional<std::string> counterexample;
};

/// Is (Leb, diam) a qualifying pair on the cover preorder of the space, with
/// grains ordered by >=? That needs (a) Leb(c) >= diam(c) for all c, and (b)
/// Leb(c1) >= diam(c2) => c1 coarser than c2. Condition (b) reduces per c1 as
/// in lebesgue_lemma_exhaustive, with a non-strict bound. Stops at the first
/// counterexample.
inline QualifyingReport leb_diam_qualifying(const SmallCoverLattice& lat) {
  QualifyingReport r;
  lat.for_each_antichain_cover([&](const std::vector<unsigned>& pieces, std::uint64_t down, double leb, double diam) {
    ++r.covers;
    if (leb < diam) {
      r.qualifying = false;
      r.counterexample = "c=" + lat.describe(pieces) + " has Leb " + std::to_string(leb) + " < diam " +
                         std::to_string(diam);
      return false;
    }
    const std::uint64_t need = lat.small_subsets(leb, true);
    if ((need & ~down) != 0) {
      const unsigned s = static_cast<unsigned>(std::countr_zero(need & ~down));
      r.qualifying = false;
      r.counterexample = "c1=" + lat.describe(pieces) + " has Leb " + std::to_string(leb) +
                         " >= diam of a cover holding " + lat.describe({s}) + " yet is not coarser than it";
      return false;
    }
    return true;
  });
  return r;
}

/// The cover preorder on the given covers (i <= j iff covers[i] is coarser
/// than covers[j]) with Leb and diam as maps into grains ordered by >=.
struct CoverPreorder {
  FinitePreorder order;
  ChainMap lebesgue;
  ChainMap diameter;
};

inline CoverPreorder cover_preorder(const std::vector<Cover>& covers) {
  const std::size_t n = covers.size();
  std::vector<char> leq(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) leq[i * n + j] = coarser_than(covers[i], covers[j]);
  FinitePreorder p(n, std::move(leq));
  std::vector<ChainValue> leb, diam;
  for (const auto& c : covers) {
    leb.emplace_back(lebesgue_number(c));
    diam.emplace_back(entrolab::diameter(c));
  }
  ChainMap l(p, std::move(leb), Orientation::Descending);
  ChainMap d(p, std::move(diam), Orientation::Descending);
  return {std::move(p), std::move(l), std::move(d)};
}

}  // namespace entrolab
