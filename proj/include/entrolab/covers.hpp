#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "entrolab/error.hpp"
#include "entrolab/metric.hpp"
#include "entrolab/point_set.hpp"
#include "entrolab/set_cover.hpp"

namespace entrolab {

/// A finite family of non-empty subsets whose union is the whole space.
/// Pieces are stored deduplicated, in first-occurrence order.
class Cover {
 public:
  Cover() = default;
  Cover(FiniteMetricSpace space, const std::vector<PointSet>& pieces) : space_(std::move(space)) {
    const std::size_t n = space_.size();
    PointSet u(n);
    std::unordered_set<PointSet, PointSetHash> seen;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& p = pieces[i];
      if (p.size() != n) fail(ErrorKind::SpaceMismatch, "piece " + std::to_string(i) + " has the wrong width");
      if (p.none()) fail(ErrorKind::InvalidCover, "piece " + std::to_string(i) + " is empty");
      if (seen.insert(p).second) pieces_.push_back(p);
      u |= p;
    }
    if (!u.all()) fail(ErrorKind::InvalidCover, "pieces miss point " + std::to_string(u.complement().first()));
  }

  Cover(FiniteMetricSpace space, const std::vector<std::vector<std::size_t>>& pieces)
      : Cover(space, to_sets(space.size(), pieces)) {}

  static Cover trivial(const FiniteMetricSpace& space) { return Cover(space, {PointSet::full(space.size())}); }

  static Cover singletons(const FiniteMetricSpace& space) {
    std::vector<PointSet> p;
    for (std::size_t i = 0; i < space.size(); ++i) p.push_back(PointSet(space.size(), {i}));
    return Cover(space, p);
  }

  const FiniteMetricSpace& space() const noexcept { return space_; }
  const std::vector<PointSet>& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }

  std::vector<std::vector<std::size_t>> piece_indices() const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back(p.members());
    return out;
  }

 private:
  static std::vector<PointSet> to_sets(std::size_t n, const std::vector<std::vector<std::size_t>>& pieces) {
    std::vector<PointSet> out;
    out.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      PointSet s(n);
      for (auto m : pieces[i]) {
        if (m >= n) fail(ErrorKind::IndexOutOfRange, "piece " + std::to_string(i) + " names point " + std::to_string(m));
        s.set(m);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  FiniteMetricSpace space_;
  std::vector<PointSet> pieces_;
};

/// All closed balls of one radius, one per center.
struct UniformDiskCover {
  Cover cover;
  double grain = 0.0;
};

namespace detail {

inline void require_same_space(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  if (!a.same_space(b)) fail(ErrorKind::SpaceMismatch, "operands live on different spaces");
}

inline void require_map_on(const FiniteMetricSpace& s, const EndoMap& f) {
  if (f.size() != s.size()) fail(ErrorKind::SpaceMismatch, "map and cover live on different spaces");
}

inline PointSet ball(const DistanceMatrix& d, std::size_t center, double radius) {
  PointSet b(d.size());
  const auto row = d.row(center);
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] <= radius) b.set(j);
  return b;
}

inline double piece_diameter(const DistanceMatrix& d, const PointSet& piece) {
  double best = 0.0;
  const auto m = piece.members();
  for (std::size_t a = 0; a < m.size(); ++a) {
    const auto row = d.row(m[a]);
    for (std::size_t b = a + 1; b < m.size(); ++b) best = std::max(best, row[m[b]]);
  }
  return best;
}

inline std::vector<PointSet> join_pieces(const std::vector<PointSet>& a, const std::vector<PointSet>& b) {
  std::vector<PointSet> out;
  std::unordered_set<PointSet, PointSetHash> seen;
  for (const auto& sa : a) {
    for (const auto& sb : b) {
      if (!sa.intersects(sb)) continue;
      PointSet s = sa & sb;
      if (seen.insert(s).second) out.push_back(std::move(s));
    }
  }
  return out;
}

inline std::vector<PointSet> pullback_pieces(const EndoMap& f, const std::vector<PointSet>& pieces) {
  std::vector<PointSet> out;
  std::unordered_set<PointSet, PointSetHash> seen;
  const std::size_t n = f.size();
  for (const auto& s : pieces) {
    PointSet pre(n);
    for (std::size_t x = 0; x < n; ++x)
      if (s.test(f(x))) pre.set(x);
    if (pre.any() && seen.insert(pre).second) out.push_back(std::move(pre));
  }
  return out;
}

inline std::vector<PointSet> maximal_pieces(const std::vector<PointSet>& pieces) {
  std::vector<PointSet> out;
  for (auto i : maximal_piece_indices(pieces)) out.push_back(pieces[i]);
  return out;
}

}  // namespace detail

/// a is coarser than b: every piece of b lies inside some piece of a.
inline bool coarser_than(const Cover& a, const Cover& b) {
  detail::require_same_space(a.space(), b.space());
  for (const auto& sb : b.pieces()) {
    bool inside = false;
    for (const auto& sa : a.pieces()) {
      if (sb.is_subset_of(sa)) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

/// Mutual coarseness, i.e. isomorphism in the cover preorder.
inline bool order_equivalent(const Cover& a, const Cover& b) { return coarser_than(a, b) && coarser_than(b, a); }

inline Cover join(const Cover& a, const Cover& b) {
  detail::require_same_space(a.space(), b.space());
  return Cover(a.space(), detail::join_pieces(a.pieces(), b.pieces()));
}

inline Cover pullback(const EndoMap& f, const Cover& a) {
  detail::require_map_on(a.space(), f);
  return Cover(a.space(), detail::pullback_pieces(f, a.pieces()));
}

/// The cover keeping only pieces not strictly contained in another piece.
/// It is order-equivalent to the input and has the same minimal subcover size.
inline Cover reduce_to_maximal(const Cover& a) { return Cover(a.space(), detail::maximal_pieces(a.pieces())); }

/// a^(n) = a v f*a v ... v (f^{n-1})*a, built as a^(k+1) = a v f*(a^(k)).
inline Cover dyn_refine(const EndoMap& f, std::size_t n, const Cover& a) {
  if (n == 0) fail(ErrorKind::InvalidHorizon, "refinement horizon must be >= 1");
  detail::require_map_on(a.space(), f);
  std::vector<PointSet> current = a.pieces();
  for (std::size_t k = 1; k < n; ++k) current = detail::join_pieces(a.pieces(), detail::pullback_pieces(f, current));
  return Cover(a.space(), current);
}

/// The same refinement with non-maximal pieces discarded after every step.
/// Cheaper, and order-equivalent to dyn_refine.
inline Cover dyn_refine_reduced(const EndoMap& f, std::size_t n, const Cover& a) {
  if (n == 0) fail(ErrorKind::InvalidHorizon, "refinement horizon must be >= 1");
  detail::require_map_on(a.space(), f);
  const auto base = detail::maximal_pieces(a.pieces());
  std::vector<PointSet> current = base;
  for (std::size_t k = 1; k < n; ++k)
    current = detail::maximal_pieces(detail::join_pieces(base, detail::pullback_pieces(f, current)));
  return Cover(a.space(), current);
}

struct SubcoverResult {
  std::size_t value = 0;
  SolveMode mode = SolveMode::Exact;
  /// False when the value is only the greedy upper bound.
  bool exact = false;
  std::uint64_t nodes = 0;
};

inline SubcoverResult min_subcover_size(const Cover& a, SolveMode mode = SolveMode::Exact,
                                        const SolverBudget& budget = {}) {
  const auto r = solve_set_cover(a.space().size(), a.pieces(), mode, budget);
  return {r.value, mode, r.exact, r.nodes};
}

inline double diameter(const Cover& a) {
  double best = 0.0;
  for (const auto& p : a.pieces()) best = std::max(best, detail::piece_diameter(a.space().matrix(), p));
  return best;
}

/// min over x of max over pieces S containing x of dist(x, X \ S),
/// where a piece equal to X contributes 1.
inline double lebesgue_number(const Cover& a) {
  const auto& d = a.space().matrix();
  const std::size_t n = d.size();
  double result = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = d.row(x);
    double best = 0.0;
    for (const auto& s : a.pieces()) {
      if (!s.test(x)) continue;
      double gap = 1.0;
      for (std::size_t y = 0; y < n; ++y)
        if (!s.test(y)) gap = std::min(gap, row[y]);
      best = std::max(best, gap);
    }
    result = std::min(result, best);
  }
  return result;
}

inline UniformDiskCover free_udc(const FiniteMetricSpace& space, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::InvalidGrain, "grain must lie in (0, 1], got " + std::to_string(eps));
  std::vector<PointSet> balls;
  balls.reserve(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) balls.push_back(detail::ball(space.matrix(), x, eps));
  return {Cover(space, balls), eps};
}

inline UniformDiskCover expand(const UniformDiskCover& udc, double factor = 2.01) {
  if (!(factor > 1.0)) fail(ErrorKind::ParamOutOfRange, "expansion factor must exceed 1");
  return free_udc(udc.cover.space(), std::min(factor * udc.grain, 1.0));
}

}  // namespace entrolab
