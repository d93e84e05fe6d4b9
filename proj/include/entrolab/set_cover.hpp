#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "entrolab/error.hpp"
#include "entrolab/point_set.hpp"

namespace entrolab {

enum class SolveMode { Exact, Greedy };

inline const char* to_string(SolveMode m) { return m == SolveMode::Exact ? "exact" : "greedy"; }

struct SolverBudget {
  std::uint64_t max_nodes = 10'000'000;
};

struct SetCoverResult {
  std::size_t value = 0;
  bool exact = false;
  std::uint64_t nodes = 0;
  /// Indices into the caller's piece list.
  std::vector<std::size_t> chosen;
};

namespace detail {

inline void require_covering(std::size_t universe, const std::vector<PointSet>& pieces) {
  PointSet u(universe);
  for (const auto& p : pieces) {
    if (p.size() != universe) fail(ErrorKind::SpaceMismatch, "piece width differs from universe size");
    u |= p;
  }
  if (!u.all()) fail(ErrorKind::InvalidCover, "pieces do not cover the universe");
}

/// Indices of pieces that survive deduplication and removal of pieces
/// contained in another piece; the first occurrence wins. A piece can only be
/// contained in pieces that hold its rarest element, so candidates come from
/// that element's incidence list.
inline std::vector<std::size_t> maximal_piece_indices(const std::vector<PointSet>& pieces) {
  std::vector<std::size_t> uniq;
  {
    std::unordered_set<PointSet, PointSetHash> seen;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (pieces[i].any() && seen.insert(pieces[i]).second) uniq.push_back(i);
  }
  if (uniq.empty()) return uniq;
  const std::size_t width = pieces[uniq.front()].size();
  std::vector<std::vector<std::size_t>> incidence(width);
  std::vector<std::size_t> counts(pieces.size(), 0);
  for (auto i : uniq) {
    counts[i] = pieces[i].count();
    pieces[i].for_each([&](std::size_t e) { incidence[e].push_back(i); });
  }
  std::vector<std::size_t> kept;
  kept.reserve(uniq.size());
  for (auto i : uniq) {
    std::size_t rare = width;
    pieces[i].for_each([&](std::size_t e) {
      if (rare == width || incidence[e].size() < incidence[rare].size()) rare = e;
    });
    bool dominated = false;
    for (auto k : incidence[rare]) {
      if (k != i && counts[k] > counts[i] && pieces[i].is_subset_of(pieces[k])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(i);
  }
  return kept;
}

/// A set cover instance after reductions: pieces over a compressed universe
/// and, per reduced piece, its index in the caller's list.
struct ReducedInstance {
  std::size_t universe = 0;
  std::vector<PointSet> pieces;
  std::vector<std::size_t> origin;
};

/// Alternates two reductions until neither applies. Pieces inside another
/// piece are dropped. An element f is dropped when some other element e lies
/// only in pieces that also hold f, since covering e then covers f.
inline ReducedInstance reduce_instance(std::size_t universe, const std::vector<PointSet>& pieces) {
  ReducedInstance r;
  r.universe = universe;
  r.pieces = pieces;
  r.origin.resize(pieces.size());
  std::iota(r.origin.begin(), r.origin.end(), std::size_t{0});
  while (true) {
    const auto keep = maximal_piece_indices(r.pieces);
    std::vector<PointSet> kept;
    std::vector<std::size_t> origin;
    for (auto i : keep) {
      kept.push_back(std::move(r.pieces[i]));
      origin.push_back(r.origin[i]);
    }
    r.pieces = std::move(kept);
    r.origin = std::move(origin);

    std::vector<PointSet> holders(r.universe, PointSet(r.pieces.size()));
    for (std::size_t p = 0; p < r.pieces.size(); ++p) r.pieces[p].for_each([&](std::size_t e) { holders[e].set(p); });
    std::vector<char> dropped(r.universe, 0);
    std::size_t drops = 0;
    for (std::size_t f = 0; f < r.universe; ++f)
      for (std::size_t e = 0; e < r.universe; ++e) {
        if (e == f || dropped[e] || !holders[e].is_subset_of(holders[f])) continue;
        // Equal holder sets: only the later element goes.
        if (e > f && holders[f].is_subset_of(holders[e])) continue;
        dropped[f] = 1;
        ++drops;
        break;
      }
    if (drops == 0) return r;

    std::vector<std::size_t> renumber(r.universe, 0);
    std::size_t next = 0;
    for (std::size_t e = 0; e < r.universe; ++e)
      if (!dropped[e]) renumber[e] = next++;
    for (auto& p : r.pieces) {
      PointSet q(next);
      p.for_each([&](std::size_t e) {
        if (!dropped[e]) q.set(renumber[e]);
      });
      p = std::move(q);
    }
    r.universe = next;
  }
}

class SetCoverSearch {
 public:
  SetCoverSearch(std::size_t universe, std::vector<PointSet> pieces, std::uint64_t max_nodes)
      : universe_(universe),
        pieces_(std::move(pieces)),
        max_nodes_(max_nodes),
        incidence_(universe),
        members_(pieces_.size()) {
    for (std::size_t p = 0; p < pieces_.size(); ++p)
      pieces_[p].for_each([&](std::size_t e) {
        incidence_[e].push_back(p);
        members_[p].push_back(e);
      });
    excluded_.assign(pieces_.size(), 0);
    live_mark_.assign(pieces_.size(), 0);
    in_play_.assign(universe_, 0);
  }

  /// Runs the search with `upper` as the incumbent (a known feasible size).
  /// Returns the optimum and the chosen pieces (empty when nothing beat the incumbent).
  std::size_t solve(std::size_t upper, std::vector<std::size_t>& best_choice) {
    best_ = upper;
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> live(pieces_.size());
    std::iota(live.begin(), live.end(), std::size_t{0});
    std::vector<std::size_t> elements(universe_);
    std::iota(elements.begin(), elements.end(), std::size_t{0});
    std::vector<double> y(universe_, 0.0);
    for (std::size_t e = 0; e < universe_; ++e) {
      std::size_t widest = 1;
      for (auto p : incidence_[e]) widest = std::max(widest, members_[p].size());
      y[e] = 1.0 / static_cast<double>(widest);
    }
    if (universe_ > 0 && best_ > 1) {
      std::vector<double> reduced;
      lagrangian(elements, live, y, static_cast<double>(best_ - 1), 300, 2.0, reduced, true);
    }
    expand(PointSet::full(universe_), live, chosen, y);
    best_choice = best_choice_;
    return best_;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  void expand(const PointSet& uncovered, const std::vector<std::size_t>& parent_live, std::vector<std::size_t>& chosen,
              const std::vector<double>& parent_y) {
    if (++nodes_ > max_nodes_)
      fail(ErrorKind::ExactBudgetExceeded, "set cover search exceeded " + std::to_string(max_nodes_) + " nodes");
    if (uncovered.none()) {
      if (chosen.size() < best_) {
        best_ = chosen.size();
        best_choice_ = chosen;
      }
      return;
    }
    const std::size_t depth = chosen.size();
    if (depth + 1 >= best_) return;
    const std::size_t slots = best_ - depth - 1;  // pieces we may still add and improve
    if (slots == 1) {
      finish_with_one_piece(uncovered, chosen);
      return;
    }

    std::vector<std::size_t> live;
    std::vector<std::size_t> gains;
    for (auto p : parent_live) {
      if (excluded_[p]) continue;
      const std::size_t g = pieces_[p].intersection_count(uncovered);
      if (g == 0) continue;
      live.push_back(p);
      gains.push_back(g);
    }
    if (live.empty()) return;

    // Fewest pieces whose gains could add up to the uncovered count.
    const std::size_t remaining = uncovered.count();
    {
      std::vector<std::size_t> top = gains;
      const std::size_t k = std::min(slots, top.size());
      std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(), std::greater<>());
      std::size_t sum = 0, need = 0;
      while (need < k && sum < remaining) sum += top[need++];
      if (sum < remaining) return;
    }

    // Degrees among live pieces, then a greedy disjoint packing: elements
    // whose admissible pieces are pairwise disjoint each need their own piece.
    for (std::size_t i = 0; i < live.size(); ++i) live_mark_[live[i]] = 1 + gains[i];
    std::vector<std::size_t> degree(universe_, 0);
    std::vector<std::size_t> elements;
    // Fractional packing: y_e = 1 / (largest gain of a piece holding e) is
    // dual feasible, so the y_e sum bounds the optimum from below.
    double fractional = 0.0;
    uncovered.for_each([&](std::size_t e) {
      elements.push_back(e);
      std::size_t widest = 0;
      for (auto p : incidence_[e])
        if (live_mark_[p]) {
          ++degree[e];
          widest = std::max<std::size_t>(widest, live_mark_[p] - 1);
        }
      if (widest > 0) fractional += 1.0 / static_cast<double>(widest);
    });
    if (fractional - 1e-9 > static_cast<double>(slots)) {
      for (auto p : live) live_mark_[p] = 0;
      return;
    }
    std::stable_sort(elements.begin(), elements.end(), [&](auto a, auto b) { return degree[a] < degree[b]; });
    bool feasible = degree[elements.front()] > 0;
    std::size_t packing = 0;
    if (feasible) {
      std::vector<char> used(pieces_.size(), 0);
      for (auto e : elements) {
        bool fresh = true;
        for (auto p : incidence_[e])
          if (live_mark_[p] && used[p]) {
            fresh = false;
            break;
          }
        if (!fresh) continue;
        if (++packing > slots) break;
        for (auto p : incidence_[e])
          if (live_mark_[p]) used[p] = 1;
      }
    }
    for (auto p : live) live_mark_[p] = 0;
    if (!feasible || packing > slots) return;

    // Lagrangian bound, warm-started from the parent. A piece whose reduced
    // cost lifts the bound past the slots cannot be in an improving cover.
    // The pass costs a dozen sweeps over the live pieces, so once it prunes
    // fewer than one node in ten it only runs on every sixteenth node.
    std::vector<double> y = parent_y;
    const std::size_t live_before_fixing = live.size();
    const bool worthwhile =
        lagrangian_calls_ < 64 || lagrangian_prunes_ * 10 >= lagrangian_calls_ || nodes_ % 16 == 0;
    if (worthwhile) {
      std::vector<double> reduced;
      ++lagrangian_calls_;
      const double bound = lagrangian(elements, live, y, static_cast<double>(slots), 12, 0.5, reduced, false);
      if (bound > static_cast<double>(slots) + kTolerance) {
        ++lagrangian_prunes_;
        return;
      }
      std::size_t kept = 0;
      for (std::size_t i = 0; i < live.size(); ++i) {
        if (bound + std::max(0.0, reduced[i]) > static_cast<double>(slots) + kTolerance) continue;
        live[kept] = live[i];
        gains[kept] = gains[i];
        ++kept;
      }
      live.resize(kept);
      gains.resize(kept);
    }

    // Branch on the element with the fewest surviving pieces.
    if (live.size() < live_before_fixing) {
      std::fill(degree.begin(), degree.end(), 0);
      for (auto p : live)
        for (auto e : members_[p])
          if (uncovered.test(e)) ++degree[e];
    }
    std::size_t branch_element = elements.front();
    for (auto e : elements)
      if (degree[e] < degree[branch_element]) branch_element = e;
    if (degree[branch_element] == 0) return;

    // Options for that element, by descending gain. An option whose
    // uncovered part lies inside another option's is never needed: any
    // cover using it can swap in the larger one.
    std::vector<std::pair<std::size_t, std::size_t>> options;  // (gain, piece)
    for (std::size_t i = 0; i < live.size(); ++i)
      if (pieces_[live[i]].test(branch_element)) options.emplace_back(gains[i], live[i]);
    std::stable_sort(options.begin(), options.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::vector<PointSet> kept_parts;
    std::vector<std::size_t> branches;
    for (auto& [gain, p] : options) {
      PointSet part = pieces_[p];
      part &= uncovered;
      bool dominated = false;
      for (const auto& k : kept_parts)
        if (part.is_subset_of(k)) {
          dominated = true;
          break;
        }
      if (dominated) continue;
      kept_parts.push_back(std::move(part));
      branches.push_back(p);
    }

    std::vector<std::size_t> newly_excluded;
    for (auto p : branches) {
      PointSet next = uncovered;
      next.subtract(pieces_[p]);
      chosen.push_back(p);
      expand(next, live, chosen, y);
      chosen.pop_back();
      // Later branches never reuse a piece already tried for this element.
      excluded_[p] = 1;
      newly_excluded.push_back(p);
      if (depth + 1 >= best_) break;
    }
    for (auto p : newly_excluded) excluded_[p] = 0;
  }

  /// Lagrangian relaxation of the covering constraints. For multipliers
  /// y >= 0 on the uncovered elements, the sum of y plus the negative parts
  /// of the reduced costs 1 - y(piece) is a lower bound on the pieces still
  /// needed. Subgradient steps aim the bound at `target` + 1. On return `y`
  /// holds the best multipliers seen and `reduced` their reduced costs, one
  /// per live piece. At the root the rounded multipliers also seed incumbents.
  double lagrangian(const std::vector<std::size_t>& elements, const std::vector<std::size_t>& live,
                    std::vector<double>& y, double target, int rounds, double step_scale,
                    std::vector<double>& reduced, bool seek_incumbent) {
    for (auto e : elements) in_play_[e] = 1;
    // Uncovered members of each live piece, flattened.
    std::vector<std::uint32_t> flat;
    std::vector<std::size_t> start(live.size() + 1, 0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (auto e : members_[live[i]])
        if (in_play_[e]) flat.push_back(static_cast<std::uint32_t>(e));
      start[i + 1] = flat.size();
    }
    std::vector<double> cost(live.size());
    std::vector<int> hits(universe_, 0);
    std::vector<double> best_y = y;
    double best = -1.0;
    int stale = 0;
    for (int round = 0; round < rounds; ++round) {
      double bound = 0.0;
      for (auto e : elements) {
        bound += y[e];
        hits[e] = 0;
      }
      for (std::size_t i = 0; i < live.size(); ++i) {
        double c = 1.0;
        for (std::size_t k = start[i]; k < start[i + 1]; ++k) c -= y[flat[k]];
        cost[i] = c;
        if (c < 0.0) {
          bound += c;
          for (std::size_t k = start[i]; k < start[i + 1]; ++k) ++hits[flat[k]];
        }
      }
      if (bound > best + 1e-12) {
        best = bound;
        best_y = y;
        reduced = cost;
        stale = 0;
        if (seek_incumbent) round_to_cover(elements, live, cost);
      } else if (++stale >= 3) {
        step_scale /= 2.0;
        stale = 0;
      }
      if (best > target + kTolerance) break;
      double norm = 0.0;
      for (auto e : elements) norm += static_cast<double>((1 - hits[e]) * (1 - hits[e]));
      if (norm == 0.0) break;
      const double step = step_scale * (target + 1.0 - bound) / norm;
      for (auto e : elements) y[e] = std::max(0.0, y[e] + step * static_cast<double>(1 - hits[e]));
    }
    for (auto e : elements) in_play_[e] = 0;
    y = std::move(best_y);
    return best;
  }

  /// Takes pieces by ascending reduced cost until everything is covered, then
  /// drops pieces made redundant, and keeps the result if it beats the incumbent.
  void round_to_cover(const std::vector<std::size_t>& elements, const std::vector<std::size_t>& live,
                      const std::vector<double>& cost) {
    std::vector<std::size_t> order(live.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cost[a] < cost[b]; });
    std::vector<int> times(universe_, 0);
    std::size_t open = elements.size();
    std::vector<std::size_t> picked;
    for (auto i : order) {
      if (open == 0) break;
      bool fresh = false;
      for (auto e : members_[live[i]]) fresh = fresh || (in_play_[e] && times[e] == 0);
      if (!fresh) continue;
      picked.push_back(live[i]);
      for (auto e : members_[live[i]])
        if (in_play_[e] && times[e]++ == 0) --open;
    }
    if (open > 0) return;
    std::vector<std::size_t> cover;
    for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
      bool needed = false;
      for (auto e : members_[*it]) needed = needed || (in_play_[e] && times[e] == 1);
      if (needed) {
        cover.push_back(*it);
      } else {
        for (auto e : members_[*it])
          if (in_play_[e]) --times[e];
      }
    }
    if (cover.size() < best_) {
      best_ = cover.size();
      std::sort(cover.begin(), cover.end());
      best_choice_ = std::move(cover);
    }
  }

  /// Only a single piece holding everything uncovered can still improve, and
  /// it must hold the element with the fewest pieces.
  void finish_with_one_piece(const PointSet& uncovered, std::vector<std::size_t>& chosen) {
    std::size_t rare = universe_;
    uncovered.for_each([&](std::size_t e) {
      if (rare == universe_ || incidence_[e].size() < incidence_[rare].size()) rare = e;
    });
    for (auto p : incidence_[rare])
      if (!excluded_[p] && uncovered.is_subset_of(pieces_[p])) {
        chosen.push_back(p);
        best_ = chosen.size();
        best_choice_ = chosen;
        chosen.pop_back();
        return;
      }
  }

  /// Slack for floating-point bounds compared against integer slot counts.
  static constexpr double kTolerance = 1e-6;

  std::size_t universe_;
  std::vector<PointSet> pieces_;
  std::uint64_t max_nodes_;
  std::vector<std::vector<std::size_t>> incidence_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<char> excluded_;
  /// 1 + gain for pieces live at the current node, 0 otherwise.
  std::vector<std::size_t> live_mark_;
  /// Marks the uncovered elements during a Lagrangian pass.
  std::vector<char> in_play_;
  std::size_t best_ = 0;
  std::vector<std::size_t> best_choice_;
  std::uint64_t nodes_ = 0;
  std::uint64_t lagrangian_calls_ = 0;
  std::uint64_t lagrangian_prunes_ = 0;
};

}  // namespace detail

/// Greedy set cover: repeatedly take the piece covering the most uncovered
/// elements, ties to the lowest index. Gains only shrink, so stale heap
/// entries are upper bounds and are re-scored lazily.
inline SetCoverResult greedy_set_cover(std::size_t universe, const std::vector<PointSet>& pieces) {
  detail::require_covering(universe, pieces);
  using Entry = std::pair<std::size_t, std::size_t>;  // (gain, piece)
  // Max-heap on gain, then min on index.
  auto worse = [](const Entry& a, const Entry& b) { return a.first != b.first ? a.first < b.first : a.second > b.second; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (std::size_t p = 0; p < pieces.size(); ++p) heap.emplace(pieces[p].count(), p);

  SetCoverResult r;
  PointSet uncovered = PointSet::full(universe);
  while (uncovered.any()) {
    Entry top = heap.top();
    heap.pop();
    top.first = pieces[top.second].intersection_count(uncovered);
    if (!heap.empty() && worse(top, heap.top())) {
      heap.push(top);
      continue;
    }
    uncovered.subtract(pieces[top.second]);
    r.chosen.push_back(top.second);
  }
  r.value = r.chosen.size();
  return r;
}

/// Exact minimum set cover by branch and bound.
///
/// The instance is first shrunk by piece and element dominance. The search branches
/// on the uncovered element with the fewest admissible pieces, trying pieces
/// by descending fresh coverage and skipping options whose fresh coverage
/// another option contains. It prunes with the greedy incumbent, a top-gains
/// counting bound, a fractional packing bound, a disjoint-packing bound and a
/// Lagrangian bound whose reduced costs also discard hopeless pieces.
/// Throws ExactBudgetExceeded when the node budget runs out.
inline SetCoverResult exact_set_cover(std::size_t universe, const std::vector<PointSet>& pieces,
                                      const SolverBudget& budget = {}) {
  detail::require_covering(universe, pieces);
  auto reduced = detail::reduce_instance(universe, pieces);
  const auto& keep = reduced.origin;

  const SetCoverResult greedy = greedy_set_cover(reduced.universe, reduced.pieces);
  detail::SetCoverSearch search(reduced.universe, std::move(reduced.pieces), budget.max_nodes);
  std::vector<std::size_t> improved;
  const std::size_t value = search.solve(greedy.value, improved);

  SetCoverResult r;
  r.value = value;
  r.exact = true;
  r.nodes = search.nodes();
  const auto& local = improved.empty() ? greedy.chosen : improved;
  for (auto i : local) r.chosen.push_back(keep[i]);
  std::sort(r.chosen.begin(), r.chosen.end());
  return r;
}

inline SetCoverResult solve_set_cover(std::size_t universe, const std::vector<PointSet>& pieces, SolveMode mode,
                                      const SolverBudget& budget = {}) {
  return mode == SolveMode::Exact ? exact_set_cover(universe, pieces, budget) : greedy_set_cover(universe, pieces);
}

}  // namespace entrolab
