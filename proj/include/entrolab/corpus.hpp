#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "entrolab/metric.hpp"
#include "entrolab/systems.hpp"

namespace entrolab {

/// Seeded generators for test systems. All randomness flows from one
/// mt19937_64, so a seed fixes the corpus on a given standard library.
class CorpusGenerator {
 public:
  explicit CorpusGenerator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() noexcept { return rng_; }

  std::size_t uniform_index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double uniform_real() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  /// n uniform points in the unit square, Euclidean metric.
  FiniteMetricSpace euclidean_space(std::size_t n, std::size_t dim = 2) {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
      for (auto& c : p) c = uniform_real();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = euclidean(pts[i], pts[j]);
        d.at(i, j) = v;
        d.at(j, i) = v;
      }
    return validate_space(std::move(d));
  }

  /// Shortest-path metric of a random connected weighted graph.
  FiniteMetricSpace graph_space(std::size_t n, double extra_edge_prob = 0.2) {
    const double inf = std::numeric_limits<double>::infinity();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d.at(i, j) = i == j ? 0.0 : inf;
    auto add = [&](std::size_t a, std::size_t b) {
      const double w = 0.1 + uniform_real();
      d.at(a, b) = d.at(b, a) = std::min(d(a, b), w);
    };
    for (std::size_t i = 1; i < n; ++i) add(i, uniform_index(i));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (uniform_real() < extra_edge_prob) add(i, j);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d.at(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return validate_space(std::move(d));
  }

  /// Random metric with all distances in [1/2, 1] (the triangle inequality
  /// holds automatically).
  FiniteMetricSpace banded_space(std::size_t n) {
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d.at(i, j) = d.at(j, i) = 0.5 + 0.5 * uniform_real();
    return validate_space(std::move(d));
  }

  EndoMap random_map(std::size_t n) {
    std::vector<std::size_t> img(n);
    for (auto& v : img) v = uniform_index(n);
    return EndoMap(std::move(img), n);
  }

  EndoMap random_permutation(std::size_t n) {
    std::vector<std::size_t> img(n);
    std::iota(img.begin(), img.end(), std::size_t{0});
    std::shuffle(img.begin(), img.end(), rng_);
    return EndoMap(std::move(img), n);
  }

  /// Sends each point to the nearest point of a random expanding affine image
  /// of itself (an expanding map pushed onto the sample).
  EndoMap nearest_affine_map(const FiniteMetricSpace& space) {
    const std::size_t n = space.size();
    const std::size_t anchor = uniform_index(n);
    const double stretch = 1.5 + 1.5 * uniform_real();
    std::vector<std::size_t> img(n);
    for (std::size_t x = 0; x < n; ++x) {
      const double target = std::fmod(stretch * space(anchor, x), 1.0);
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t y = 0; y < n; ++y) {
        const double v = std::abs(space(anchor, y) - target);
        if (v < bd) {
          bd = v;
          best = y;
        }
      }
      img[x] = best;
    }
    return EndoMap(std::move(img), n);
  }

  /// A random system of n points: the metric family and map family cycle with
  /// `variant` so a corpus mixes them.
  DynamicalSystem random_system(std::size_t n, std::size_t variant) {
    DynamicalSystem s;
    switch (variant % 3) {
      case 0: s.space = euclidean_space(n); break;
      case 1: s.space = graph_space(n); break;
      default: s.space = banded_space(n); break;
    }
    switch ((variant / 3) % 3) {
      case 0: s.map = random_map(n); break;
      case 1: s.map = random_permutation(n); break;
      default: s.map = nearest_affine_map(s.space); break;
    }
    s.name = "random(n=" + std::to_string(n) + ",variant=" + std::to_string(variant % 9) + ")";
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

/// Small built-in systems covering every kind.
inline std::vector<DynamicalSystem> builtin_corpus() {
  std::vector<DynamicalSystem> out;
  auto add = [&](SystemSpec s) { out.push_back(build_system(s)); };
  SystemSpec s;
  s.kind = SystemKind::DyadicDoubling;
  for (std::size_t m : {3, 4, 5, 6}) {
    s.m = m;
    add(s);
  }
  s.kind = SystemKind::Tent;
  for (std::size_t m : {3, 4, 5}) {
    s.m = m;
    add(s);
  }
  s.kind = SystemKind::Rotation;
  for (auto [p, q] : {std::pair<std::size_t, std::size_t>{1, 4}, {3, 16}, {5, 31}, {7, 64}}) {
    s.p = p;
    s.q = q;
    add(s);
  }
  s.kind = SystemKind::FullShift;
  for (auto [k, l] : {std::pair<std::size_t, std::size_t>{2, 3}, {2, 5}, {3, 3}, {2, 6}}) {
    s.k = k;
    s.L = l;
    add(s);
  }
  return out;
}

/// Built-ins plus `random_count` random systems with sizes in [min_n, max_n].
inline std::vector<DynamicalSystem> default_corpus(std::size_t random_count, std::size_t min_n, std::size_t max_n,
                                                   std::uint64_t seed) {
  auto out = builtin_corpus();
  CorpusGenerator gen(seed);
  for (std::size_t i = 0; i < random_count; ++i) {
    const std::size_t n = min_n + gen.uniform_index(max_n - min_n + 1);
    out.push_back(gen.random_system(n, i));
  }
  return out;
}

}  // namespace entrolab
