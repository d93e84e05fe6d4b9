#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "entrolab/error.hpp"
#include "entrolab/point_set.hpp"
#include "entrolab/set_cover.hpp"

namespace entrolab {

/// Undirected simple graph stored as adjacency bitsets.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adj_(n, PointSet(n)) {}

  std::size_t size() const noexcept { return adj_.size(); }
  void add_edge(std::size_t u, std::size_t v) {
    if (u == v) return;
    adj_[u].set(v);
    adj_[v].set(u);
  }
  bool adjacent(std::size_t u, std::size_t v) const noexcept { return adj_[u].test(v); }
  const PointSet& neighbors(std::size_t v) const noexcept { return adj_[v]; }
  std::size_t degree(std::size_t v) const noexcept { return adj_[v].count(); }

  Graph complement() const {
    Graph g(size());
    for (std::size_t v = 0; v < size(); ++v) {
      g.adj_[v] = adj_[v].complement();
      g.adj_[v].reset(v);
    }
    return g;
  }

 private:
  std::vector<PointSet> adj_;
};

struct IndependentSetResult {
  std::size_t value = 0;
  bool exact = false;
  std::uint64_t nodes = 0;
  std::vector<std::size_t> members;
};

/// Static min-degree greedy: visit vertices by ascending degree (ties to the
/// lowest index) and keep each one not adjacent to a kept vertex.
inline IndependentSetResult greedy_independent_set(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> deg(n);
  for (std::size_t v = 0; v < n; ++v) deg[v] = g.degree(v);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return deg[a] < deg[b]; });
  IndependentSetResult r;
  PointSet blocked(n);
  for (auto v : order) {
    if (blocked.test(v)) continue;
    r.members.push_back(v);
    blocked |= g.neighbors(v);
    blocked.set(v);
  }
  std::sort(r.members.begin(), r.members.end());
  r.value = r.members.size();
  return r;
}

namespace detail {

/// Bitset branch and bound for maximum clique with a greedy colouring bound.
class MaxCliqueSearch {
 public:
  MaxCliqueSearch(const Graph& g, std::uint64_t max_nodes) : g_(g), max_nodes_(max_nodes) {}

  void solve(std::vector<std::size_t> incumbent) {
    best_ = std::move(incumbent);
    std::vector<std::size_t> current;
    expand(PointSet::full(g_.size()), current);
  }

  const std::vector<std::size_t>& best() const noexcept { return best_; }
  std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  void colour(const PointSet& p, std::vector<std::size_t>& order, std::vector<std::size_t>& bound) const {
    PointSet uncoloured = p;
    std::size_t k = 0;
    while (uncoloured.any()) {
      ++k;
      PointSet candidates = uncoloured;
      for (std::size_t v = candidates.first(); v < candidates.size(); v = candidates.next(v + 1)) {
        uncoloured.reset(v);
        candidates.subtract(g_.neighbors(v));
        order.push_back(v);
        bound.push_back(k);
      }
    }
  }

  void expand(PointSet p, std::vector<std::size_t>& current) {
    if (++nodes_ > max_nodes_)
      fail(ErrorKind::ExactBudgetExceeded,
           "independent set search exceeded " + std::to_string(max_nodes_) + " nodes");
    std::vector<std::size_t> order, bound;
    order.reserve(p.count());
    bound.reserve(p.count());
    colour(p, order, bound);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (current.size() + bound[i] <= best_.size()) return;
      const std::size_t v = order[i];
      current.push_back(v);
      PointSet next = p & g_.neighbors(v);
      if (next.none()) {
        if (current.size() > best_.size()) best_ = current;
      } else {
        expand(std::move(next), current);
      }
      current.pop_back();
      p.reset(v);
    }
  }

  const Graph& g_;
  std::uint64_t max_nodes_;
  std::vector<std::size_t> best_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Exact maximum independent set, solved as a maximum clique of the
/// complement graph. The greedy set seeds the incumbent.
inline IndependentSetResult exact_independent_set(const Graph& g, const SolverBudget& budget = {}) {
  IndependentSetResult r;
  if (g.size() == 0) {
    r.exact = true;
    return r;
  }
  const IndependentSetResult seed = greedy_independent_set(g);
  const Graph h = g.complement();
  detail::MaxCliqueSearch search(h, budget.max_nodes);
  search.solve(seed.members);
  r.members = search.best();
  std::sort(r.members.begin(), r.members.end());
  r.value = r.members.size();
  r.exact = true;
  r.nodes = search.nodes();
  return r;
}

inline IndependentSetResult solve_independent_set(const Graph& g, SolveMode mode, const SolverBudget& budget = {}) {
  return mode == SolveMode::Exact ? exact_independent_set(g, budget) : greedy_independent_set(g);
}

}  // namespace entrolab
