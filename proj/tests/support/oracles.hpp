#pragma once

// Brute-force reference implementations. Each one follows the defining
// formula literally and shares no code with the library solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "entrolab/entrolab.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix dense(const entrolab::DistanceMatrix& d) {
  Matrix m(d.size(), std::vector<double>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) m[i][j] = d(i, j);
  return m;
}

/// max over t < n of d(f^t x, f^t y), iterating f explicitly per pair.
inline Matrix bowen(const Matrix& d, const std::vector<std::size_t>& f, std::size_t n) {
  const std::size_t sz = d.size();
  Matrix out(sz, std::vector<double>(sz, 0.0));
  for (std::size_t x = 0; x < sz; ++x)
    for (std::size_t y = 0; y < sz; ++y) {
      std::size_t a = x, b = y;
      double best = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        best = std::max(best, d[a][b]);
        a = f[a];
        b = f[b];
      }
      out[x][y] = best;
    }
  return out;
}

using Mask = std::uint32_t;

inline std::vector<Mask> masks(const std::vector<entrolab::PointSet>& pieces) {
  std::vector<Mask> out;
  for (const auto& p : pieces) {
    Mask m = 0;
    for (auto i : p.members()) m |= Mask{1} << i;
    out.push_back(m);
  }
  return out;
}

/// Smallest number of pieces whose union is the universe, by enumerating
/// every subfamily. Requires at most 20 pieces.
inline std::size_t min_cover(std::size_t universe, const std::vector<Mask>& pieces) {
  const Mask full = universe == 32 ? ~Mask{0} : ((Mask{1} << universe) - 1);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const std::size_t k = pieces.size();
  for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << k); ++sel) {
    const auto c = static_cast<std::size_t>(__builtin_popcountll(sel));
    if (c >= best) continue;
    Mask u = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (sel >> i & 1) u |= pieces[i];
    if (u == full) best = c;
  }
  return best;
}

/// Smallest A with every point within eps of A, over all subsets A.
inline std::size_t min_spanning(const Matrix& d, double eps) {
  const std::size_t n = d.size();
  std::size_t best = n;
  for (std::uint64_t a = 1; a < (std::uint64_t{1} << n); ++a) {
    const auto c = static_cast<std::size_t>(__builtin_popcountll(a));
    if (c >= best) continue;
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      bool near = false;
      for (std::size_t y = 0; y < n && !near; ++y)
        if ((a >> y & 1) && d[x][y] <= eps) near = true;
      ok = near;
    }
    if (ok) best = c;
  }
  return best;
}

/// Largest A whose distinct members are pairwise more than eps apart.
inline std::size_t max_separated(const Matrix& d, double eps) {
  const std::size_t n = d.size();
  std::size_t best = 1;
  for (std::uint64_t a = 1; a < (std::uint64_t{1} << n); ++a) {
    const auto c = static_cast<std::size_t>(__builtin_popcountll(a));
    if (c <= best) continue;
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      for (std::size_t y = x + 1; y < n && ok; ++y)
        if ((a >> x & 1) && (a >> y & 1) && d[x][y] <= eps) ok = false;
    if (ok) best = c;
  }
  return best;
}

/// Largest vertex subset with no edge inside, over all subsets.
inline std::size_t max_independent(std::size_t n, const std::vector<std::vector<bool>>& adj) {
  std::size_t best = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    const auto c = static_cast<std::size_t>(__builtin_popcountll(a));
    if (c <= best) continue;
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      for (std::size_t y = x + 1; y < n && ok; ++y)
        if ((a >> x & 1) && (a >> y & 1) && adj[x][y]) ok = false;
    if (ok) best = c;
  }
  return best;
}

/// Every piece of b sits inside some piece of a.
inline bool coarser(const std::vector<Mask>& a, const std::vector<Mask>& b) {
  for (auto sb : b) {
    bool found = false;
    for (auto sa : a)
      if ((sa & sb) == sb) found = true;
    if (!found) return false;
  }
  return true;
}

/// Uniform random cover: random pieces, then singletons for any uncovered point.
inline std::vector<entrolab::PointSet> random_pieces(std::mt19937_64& rng, std::size_t n, std::size_t count,
                                                     double density) {
  std::bernoulli_distribution in(density);
  std::vector<entrolab::PointSet> out;
  entrolab::PointSet u(n);
  for (std::size_t k = 0; k < count; ++k) {
    entrolab::PointSet p(n);
    for (std::size_t i = 0; i < n; ++i)
      if (in(rng)) p.set(i);
    if (p.none()) p.set(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    u |= p;
    out.push_back(p);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!u.test(i)) out.push_back(entrolab::PointSet(n, {i}));
  return out;
}

/// Points on [0, 1] as an interval metric (rescaled if the span exceeds 1).
inline entrolab::FiniteMetricSpace line(const std::vector<double>& xs) {
  std::vector<std::vector<double>> rows(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) rows[i][j] = std::abs(xs[i] - xs[j]);
  return entrolab::validate_space(rows);
}

}  // namespace oracle
