#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entrolab/error.hpp"

namespace entrolab {

/// Dense row-major N x N matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  DistanceMatrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != n_ * n_) fail(ErrorKind::InvalidEntry, "matrix data does not match size");
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  double max_entry() const noexcept {
    return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct ValidationOptions {
  double tolerance = 1e-12;
  /// Spaces up to this size get the full O(N^3) triangle scan; larger ones a
  /// deterministic sample of `sampled_triples` triples.
  std::size_t full_triangle_limit = 1024;
  std::size_t sampled_triples = 4'000'000;
};

namespace detail {

inline void check_entries(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::InvalidEntry,
             "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not a finite non-negative real");
    }
    if (m(i, i) != 0.0) fail(ErrorKind::InvalidEntry, "diagonal entry " + std::to_string(i) + " is non-zero");
  }
}

inline void check_symmetry(const DistanceMatrix& m, double tol) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol)
        fail(ErrorKind::MetricAsymmetric, "d(" + std::to_string(i) + "," + std::to_string(j) +
                                              ") != d(" + std::to_string(j) + "," + std::to_string(i) + ")");
}

inline void triangle_violation(std::size_t i, std::size_t j, std::size_t k) {
  fail(ErrorKind::TriangleViolation, "d(" + std::to_string(i) + "," + std::to_string(k) + ") > d(" +
                                         std::to_string(i) + "," + std::to_string(j) + ") + d(" +
                                         std::to_string(j) + "," + std::to_string(k) + ")");
}

inline void check_triangle(const DistanceMatrix& m, const ValidationOptions& opt) {
  const std::size_t n = m.size();
  const double tol = opt.tolerance;
  if (n <= opt.full_triangle_limit) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ri = m.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const auto rj = m.row(j);
        const double dij = ri[j] + tol;
        bool bad = false;
        for (std::size_t k = 0; k < n; ++k) bad |= ri[k] > dij + rj[k];
        if (bad) {
          for (std::size_t k = 0; k < n; ++k)
            if (ri[k] > dij + rj[k]) triangle_violation(i, j, k);
        }
      }
    }
    return;
  }
  std::mt19937_64 rng(0x5eedULL ^ n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 0; s < opt.sampled_triples; ++s) {
    const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    if (m(i, k) > m(i, j) + m(j, k) + tol) triangle_violation(i, j, k);
  }
}

}  // namespace detail

/// Checks the metric axioms on an already-normalized matrix (no rescaling).
inline void check_metric(const DistanceMatrix& m, const ValidationOptions& opt = {}) {
  if (m.size() == 0) fail(ErrorKind::EmptySpace, "distance matrix has no points");
  detail::check_entries(m);
  detail::check_symmetry(m, opt.tolerance);
  detail::check_triangle(m, opt);
}

/// A finite metric space normalized to diameter <= 1.
///
/// The distance matrix is shared and immutable, so copies are cheap.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  std::size_t size() const noexcept { return dist_ ? dist_->size() : 0; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return (*dist_)(i, j); }
  const DistanceMatrix& matrix() const noexcept { return *dist_; }
  const std::shared_ptr<const DistanceMatrix>& shared_matrix() const noexcept { return dist_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Factor applied to the raw input (1 when no rescaling was needed).
  double scale_factor() const noexcept { return scale_; }
  double diameter() const noexcept { return dist_->max_entry(); }

  /// Two spaces are the same space iff they share the same matrix instance.
  bool same_space(const FiniteMetricSpace& other) const noexcept { return dist_ == other.dist_; }

  friend FiniteMetricSpace validate_space(DistanceMatrix, std::vector<std::string>, const ValidationOptions&);
  friend FiniteMetricSpace trusted_space(DistanceMatrix, std::vector<std::string>);

 private:
  std::shared_ptr<const DistanceMatrix> dist_;
  std::vector<std::string> labels_;
  double scale_ = 1.0;
};

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

/// Validates a raw distance matrix and rescales it to diameter 1 when its
/// largest entry exceeds 1.
inline FiniteMetricSpace validate_space(DistanceMatrix raw, std::vector<std::string> labels = {},
                                        const ValidationOptions& opt = {}) {
  if (raw.size() == 0) fail(ErrorKind::EmptySpace, "distance matrix has no points");
  if (labels.empty()) labels = default_labels(raw.size());
  if (labels.size() != raw.size()) fail(ErrorKind::InvalidEntry, "label count does not match matrix size");
  detail::check_entries(raw);
  detail::check_symmetry(raw, opt.tolerance);
  detail::check_triangle(raw, opt);

  FiniteMetricSpace space;
  const double mx = raw.max_entry();
  if (mx > 1.0) {
    space.scale_ = 1.0 / mx;
    const std::size_t n = raw.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) raw.at(i, j) /= mx;
  }
  space.dist_ = std::make_shared<const DistanceMatrix>(std::move(raw));
  space.labels_ = std::move(labels);
  return space;
}

inline FiniteMetricSpace validate_space(const std::vector<std::vector<double>>& rows,
                                        const ValidationOptions& opt = {}) {
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorKind::EmptySpace, "distance matrix has no points");
  std::vector<double> data;
  data.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      fail(ErrorKind::InvalidEntry, "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                        " entries, expected " + std::to_string(n));
    data.insert(data.end(), rows[i].begin(), rows[i].end());
  }
  return validate_space(DistanceMatrix(n, std::move(data)), {}, opt);
}

/// Wraps a matrix built by a closed-form metric (circle, interval,
/// ultrametric). Only entries and symmetry are checked; the caller vouches
/// for the triangle inequality and diameter <= 1.
inline FiniteMetricSpace trusted_space(DistanceMatrix m, std::vector<std::string> labels = {}) {
  if (m.size() == 0) fail(ErrorKind::EmptySpace, "distance matrix has no points");
  detail::check_entries(m);
  detail::check_symmetry(m, 0.0);
  if (m.max_entry() > 1.0) fail(ErrorKind::InvalidEntry, "trusted matrix exceeds diameter 1");
  if (labels.empty()) labels = default_labels(m.size());
  FiniteMetricSpace space;
  space.dist_ = std::make_shared<const DistanceMatrix>(std::move(m));
  space.labels_ = std::move(labels);
  return space;
}

/// A total self-map of the point set.
class EndoMap {
 public:
  EndoMap() = default;
  EndoMap(std::vector<std::size_t> image, std::size_t space_size) : image_(std::move(image)) {
    if (image_.size() != space_size)
      fail(ErrorKind::IndexOutOfRange, "map has " + std::to_string(image_.size()) + " entries for a space of " +
                                           std::to_string(space_size) + " points");
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] >= space_size)
        fail(ErrorKind::IndexOutOfRange, "map sends " + std::to_string(i) + " to " + std::to_string(image_[i]));
  }

  static EndoMap identity(std::size_t n) {
    std::vector<std::size_t> img(n);
    std::iota(img.begin(), img.end(), std::size_t{0});
    return EndoMap(std::move(img), n);
  }

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator()(std::size_t i) const noexcept { return image_[i]; }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  /// f^t as an index array.
  std::vector<std::size_t> power(std::size_t t) const {
    std::vector<std::size_t> p(image_.size());
    std::iota(p.begin(), p.end(), std::size_t{0});
    for (std::size_t s = 0; s < t; ++s)
      for (auto& x : p) x = image_[x];
    return p;
  }

  friend bool operator==(const EndoMap&, const EndoMap&) = default;

 private:
  std::vector<std::size_t> image_;
};

inline bool is_isometry(const FiniteMetricSpace& space, const EndoMap& map) {
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (space(map(i), map(j)) != space(i, j)) return false;
  return true;
}

/// The point sequence start, f(start), ..., f^{length-1}(start).
inline std::vector<std::size_t> orbit(const FiniteMetricSpace& space, const EndoMap& map, std::size_t start,
                                      std::size_t length) {
  if (map.size() != space.size()) fail(ErrorKind::SpaceMismatch, "map and space sizes differ");
  if (start >= space.size()) fail(ErrorKind::IndexOutOfRange, "orbit start " + std::to_string(start));
  if (length == 0) fail(ErrorKind::InvalidHorizon, "orbit length must be >= 1");
  std::vector<std::size_t> seq;
  seq.reserve(length);
  seq.push_back(start);
  while (seq.size() < length) seq.push_back(map(seq.back()));
  return seq;
}

/// d_n(x, y) = max_{0 <= t < n} d(f^t x, f^t y), materialized.
class BowenMetric {
 public:
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return dist_->size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return (*dist_)(i, j); }
  const DistanceMatrix& matrix() const noexcept { return *dist_; }
  const FiniteMetricSpace& base() const noexcept { return base_; }
  const EndoMap& map() const noexcept { return map_; }

  /// d_1 is the base metric itself (same storage).
  static BowenMetric first(const FiniteMetricSpace& base, const EndoMap& map) {
    if (map.size() != base.size()) fail(ErrorKind::SpaceMismatch, "map and space sizes differ");
    BowenMetric b;
    b.base_ = base;
    b.map_ = map;
    b.horizon_ = 1;
    b.dist_ = base.shared_matrix();
    b.power_.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) b.power_[i] = map(i);
    return b;
  }

  /// d_{n+1} from d_n with one extra max pass over f^n.
  BowenMetric next() const {
    const std::size_t n = size();
    DistanceMatrix m = *dist_;
    const DistanceMatrix& d = base_.matrix();
    for (std::size_t i = 0; i < n; ++i) {
      auto ri = m.row(i);
      const auto bi = d.row(power_[i]);
      for (std::size_t j = 0; j < n; ++j) ri[j] = std::max(ri[j], bi[power_[j]]);
    }
    BowenMetric b;
    b.base_ = base_;
    b.map_ = map_;
    b.horizon_ = horizon_ + 1;
    b.dist_ = std::make_shared<const DistanceMatrix>(std::move(m));
    b.power_.resize(n);
    for (std::size_t i = 0; i < n; ++i) b.power_[i] = map_(power_[i]);
    return b;
  }

 private:
  FiniteMetricSpace base_;
  EndoMap map_;
  std::size_t horizon_ = 0;
  std::shared_ptr<const DistanceMatrix> dist_;
  std::vector<std::size_t> power_;  // f^horizon
};

inline BowenMetric bowen_metric(const FiniteMetricSpace& space, const EndoMap& map, std::size_t n,
                                const ValidationOptions& opt = {}) {
  if (n == 0) fail(ErrorKind::InvalidHorizon, "Bowen horizon must be >= 1");
  BowenMetric b = BowenMetric::first(space, map);
  while (b.horizon() < n) b = b.next();
  if (n > 1) check_metric(b.matrix(), opt);
  return b;
}

}  // namespace entrolab
