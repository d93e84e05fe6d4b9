#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entrolab/error.hpp"
#include "entrolab/metric.hpp"

namespace entrolab {

enum class SystemKind { DyadicDoubling, Rotation, FullShift, Tent, Custom };

inline const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::DyadicDoubling: return "dyadic_doubling";
    case SystemKind::Rotation: return "rotation";
    case SystemKind::FullShift: return "full_shift";
    case SystemKind::Tent: return "tent";
    case SystemKind::Custom: return "custom";
  }
  return "?";
}

inline SystemKind parse_system_kind(const std::string& s) {
  if (s == "dyadic_doubling") return SystemKind::DyadicDoubling;
  if (s == "rotation") return SystemKind::Rotation;
  if (s == "full_shift") return SystemKind::FullShift;
  if (s == "tent") return SystemKind::Tent;
  if (s == "custom") return SystemKind::Custom;
  fail(ErrorKind::ConfigError, "unknown system kind '" + s + "'");
}

enum class MapRule { Successor, NearestImage };

inline const char* to_string(MapRule r) { return r == MapRule::Successor ? "successor" : "nearest-image"; }

inline MapRule parse_map_rule(const std::string& s) {
  if (s == "successor") return MapRule::Successor;
  if (s == "nearest-image" || s == "nearest_image") return MapRule::NearestImage;
  fail(ErrorKind::ConfigError, "unknown map rule '" + s + "'");
}

struct SystemSpec {
  SystemKind kind = SystemKind::DyadicDoubling;
  /// Grid exponent for dyadic_doubling and tent.
  std::size_t m = 11;
  /// Rotation by p steps of q.
  std::size_t p = 1;
  std::size_t q = 509;
  /// Alphabet size and word length for full_shift.
  std::size_t k = 2;
  std::size_t L = 12;
  /// Custom inputs: either dist + map, or points (+ map_rule).
  std::string dist_path;
  std::string map_path;
  std::string points_path;
  MapRule map_rule = MapRule::Successor;
};

/// Largest point count a built-in may produce (each matrix is N^2 doubles).
inline constexpr std::size_t kMaxBuiltinPoints = 16384;

struct DynamicalSystem {
  FiniteMetricSpace space;
  EndoMap map;
  std::string name;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// CSV input

namespace detail {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::IoError, "cannot read '" + path + "'");
  return ss.str();
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Rows of comma-separated fields; blank lines are skipped but still counted
/// so reported row numbers match the file (1-based).
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string_view> fields;
};

inline std::vector<CsvRow> split_csv(const std::string&& text) = delete;

inline std::vector<CsvRow> split_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::size_t line = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    const std::string_view l = trim(std::string_view(text).substr(pos, end - pos));
    if (!l.empty()) {
      CsvRow row{line, {}};
      std::size_t f = 0;
      while (true) {
        const std::size_t c = l.find(',', f);
        row.fields.push_back(trim(l.substr(f, c == std::string_view::npos ? std::string_view::npos : c - f)));
        if (c == std::string_view::npos) break;
        f = c + 1;
      }
      rows.push_back(std::move(row));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return rows;
}

inline std::string where(const std::string& path, std::size_t line, std::size_t col) {
  return path + ": row " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double parse_real(std::string_view s, const std::string& path, std::size_t line, std::size_t col) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    fail(ErrorKind::FileMalformed, where(path, line, col) + ": '" + std::string(s) + "' is not a finite number");
  return v;
}

inline std::size_t parse_index(std::string_view s, const std::string& path, std::size_t line, std::size_t col) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorKind::FileMalformed, where(path, line, col) + ": '" + std::string(s) + "' is not a 0-based index");
  return v;
}

}  // namespace detail

/// N rows of N decimals. Shape errors are FileMalformed with coordinates.
inline DistanceMatrix read_dist_csv(const std::string& path) {
  const std::string text = detail::read_text(path);
  const auto rows = detail::split_csv(text);
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorKind::FileMalformed, path + ": no rows");
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (r.fields.size() != n)
      fail(ErrorKind::FileMalformed, detail::where(path, r.line, r.fields.size()) + ": expected " +
                                         std::to_string(n) + " columns, found " + std::to_string(r.fields.size()));
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = detail::parse_real(r.fields[j], path, r.line, j + 1);
  }
  return m;
}

/// N rows with one 0-based target index each.
inline EndoMap read_map_csv(const std::string& path, std::size_t space_size) {
  const std::string text = detail::read_text(path);
  const auto rows = detail::split_csv(text);
  if (rows.size() != space_size)
    fail(ErrorKind::FileMalformed, path + ": " + std::to_string(rows.size()) + " rows for a space of " +
                                       std::to_string(space_size) + " points");
  std::vector<std::size_t> image(space_size);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.fields.size() != 1)
      fail(ErrorKind::FileMalformed, detail::where(path, r.line, 2) + ": expected a single column");
    image[i] = detail::parse_index(r.fields[0], path, r.line, 1);
    if (image[i] >= space_size)
      fail(ErrorKind::FileMalformed, detail::where(path, r.line, 1) + ": index " + std::to_string(image[i]) +
                                         " is out of range");
  }
  return EndoMap(std::move(image), space_size);
}

/// One point per row, all rows of the same arity.
inline std::vector<std::vector<double>> read_points_csv(const std::string& path) {
  const std::string text = detail::read_text(path);
  const auto rows = detail::split_csv(text);
  if (rows.empty()) fail(ErrorKind::FileMalformed, path + ": no rows");
  const std::size_t arity = rows.front().fields.size();
  std::vector<std::vector<double>> pts;
  pts.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.fields.size() != arity)
      fail(ErrorKind::FileMalformed, detail::where(path, r.line, r.fields.size()) + ": expected " +
                                         std::to_string(arity) + " columns, found " + std::to_string(r.fields.size()));
    std::vector<double> p(arity);
    for (std::size_t j = 0; j < arity; ++j) p[j] = detail::parse_real(r.fields[j], path, r.line, j + 1);
    pts.push_back(std::move(p));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Trajectory ingestion

struct IngestResult {
  DynamicalSystem system;
  /// Input row (0-based) of each stored point.
  std::vector<std::size_t> source_row;
};

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Builds a system from trajectory rows. Repeated rows collapse onto their
/// first occurrence (with a warning), which also keeps that occurrence's
/// successor. Under `successor` the last row is fixed; under `nearest-image`
/// each point goes to the stored point nearest its successor's coordinates,
/// and the last row borrows the image of its nearest other point.
inline IngestResult ingest_trajectory(const std::vector<std::vector<double>>& rows, MapRule rule) {
  if (rows.empty()) fail(ErrorKind::EmptySpace, "trajectory has no rows");
  IngestResult res;
  std::map<std::vector<double>, std::size_t> index_of;
  std::vector<std::size_t> point_of_row(rows.size());
  std::size_t duplicates = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto [it, fresh] = index_of.emplace(rows[r], res.source_row.size());
    if (fresh) {
      res.source_row.push_back(r);
    } else {
      ++duplicates;
    }
    point_of_row[r] = it->second;
  }
  if (duplicates > 0)
    res.system.warnings.push_back("DuplicatePoints: " + std::to_string(duplicates) +
                                  " repeated rows collapsed onto their first occurrence");

  const std::size_t n = res.source_row.size();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = euclidean(rows[res.source_row[i]], rows[res.source_row[j]]);
      d.at(i, j) = v;
      d.at(j, i) = v;
    }

  auto nearest = [&](const std::vector<double>& target, std::optional<std::size_t> skip) {
    std::size_t best = n;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (skip && *skip == i) continue;
      const double v = euclidean(rows[res.source_row[i]], target);
      if (v < bd) {
        bd = v;
        best = i;
      }
    }
    return best;
  };

  std::vector<std::size_t> image(n);
  const std::size_t last_row = rows.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = res.source_row[i];
    if (r < last_row) {
      image[i] = rule == MapRule::Successor ? point_of_row[r + 1] : nearest(rows[r + 1], std::nullopt);
    } else {
      image[i] = i;
    }
  }
  if (rule == MapRule::NearestImage && n > 1) {
    const std::size_t last_point = point_of_row[last_row];
    if (res.source_row[last_point] == last_row) {
      const std::size_t other = nearest(rows[last_row], last_point);
      if (res.source_row[other] < last_row) image[last_point] = image[other];
    }
  }

  res.system.space = validate_space(std::move(d));
  res.system.map = EndoMap(std::move(image), n);
  res.system.name = std::string("trajectory/") + to_string(rule);
  return res;
}

inline IngestResult ingest_trajectory(const std::string& points_path, MapRule rule) {
  auto r = ingest_trajectory(read_points_csv(points_path), rule);
  r.system.name = points_path;
  return r;
}

// ---------------------------------------------------------------------------
// Built-in systems

namespace detail {

/// Circle metric on q equally spaced points, normalized to diameter 1.
inline DistanceMatrix circle_matrix(std::size_t q) {
  DistanceMatrix d(q);
  const double half = static_cast<double>(q / 2);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t diff = i > j ? i - j : j - i;
      d.at(i, j) = q == 1 ? 0.0 : static_cast<double>(std::min(diff, q - diff)) / half;
    }
  return d;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorKind::ParamOutOfRange, msg);
}

inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    require(r <= kMaxBuiltinPoints / base, "system would exceed " + std::to_string(kMaxBuiltinPoints) + " points");
    r *= base;
  }
  return r;
}

}  // namespace detail

inline DynamicalSystem build_system(const SystemSpec& spec) {
  DynamicalSystem sys;
  switch (spec.kind) {
    case SystemKind::DyadicDoubling: {
      detail::require(spec.m >= 2, "dyadic_doubling needs m >= 2");
      const std::size_t n = detail::checked_pow(2, spec.m);
      std::vector<std::size_t> img(n);
      for (std::size_t j = 0; j < n; ++j) img[j] = (2 * j) % n;
      sys.space = trusted_space(detail::circle_matrix(n));
      sys.map = EndoMap(std::move(img), n);
      sys.name = "dyadic_doubling(m=" + std::to_string(spec.m) + ")";
      break;
    }
    case SystemKind::Rotation: {
      detail::require(spec.p >= 1 && spec.p < spec.q, "rotation needs 1 <= p < q");
      detail::require(spec.q <= kMaxBuiltinPoints, "rotation q is too large");
      std::vector<std::size_t> img(spec.q);
      for (std::size_t j = 0; j < spec.q; ++j) img[j] = (j + spec.p) % spec.q;
      sys.space = trusted_space(detail::circle_matrix(spec.q));
      sys.map = EndoMap(std::move(img), spec.q);
      sys.name = "rotation(p=" + std::to_string(spec.p) + ",q=" + std::to_string(spec.q) + ")";
      break;
    }
    case SystemKind::FullShift: {
      detail::require(spec.k >= 2 && spec.L >= 2, "full_shift needs k >= 2 and L >= 2");
      const std::size_t n = detail::checked_pow(spec.k, spec.L);
      // Word w has symbols w_0..w_{L-1}, w_0 most significant in the index.
      std::vector<std::vector<unsigned char>> words(n, std::vector<unsigned char>(spec.L));
      for (std::size_t w = 0; w < n; ++w) {
        std::size_t v = w;
        for (std::size_t i = spec.L; i-- > 0;) {
          words[w][i] = static_cast<unsigned char>(v % spec.k);
          v /= spec.k;
        }
      }
      std::vector<double> weight(spec.L + 1);
      for (std::size_t i = 0; i <= spec.L; ++i) weight[i] = std::pow(static_cast<double>(spec.k), -static_cast<double>(i));
      DistanceMatrix d(n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          std::size_t i = 0;
          while (words[a][i] == words[b][i]) ++i;
          d.at(a, b) = weight[i];
          d.at(b, a) = weight[i];
        }
      std::vector<std::size_t> img(n);
      for (std::size_t w = 0; w < n; ++w) {
        const std::size_t head = w / (n / spec.k);
        img[w] = (w % (n / spec.k)) * spec.k + head;
      }
      std::vector<std::string> labels(n);
      for (std::size_t w = 0; w < n; ++w)
        for (auto s : words[w]) labels[w] += static_cast<char>(s < 10 ? '0' + s : 'a' + s - 10);
      sys.space = trusted_space(std::move(d), std::move(labels));
      sys.map = EndoMap(std::move(img), n);
      sys.name = "full_shift(k=" + std::to_string(spec.k) + ",L=" + std::to_string(spec.L) + ")";
      break;
    }
    case SystemKind::Tent: {
      detail::require(spec.m >= 2, "tent needs m >= 2");
      const std::size_t big = detail::checked_pow(2, spec.m);
      const std::size_t n = big + 1;
      detail::require(n <= kMaxBuiltinPoints, "tent grid is too large");
      DistanceMatrix d(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          d.at(i, j) = static_cast<double>(i > j ? i - j : j - i) / static_cast<double>(big);
      std::vector<std::size_t> img(n);
      for (std::size_t j = 0; j < n; ++j) img[j] = j <= big / 2 ? 2 * j : 2 * big - 2 * j;
      sys.space = trusted_space(std::move(d));
      sys.map = EndoMap(std::move(img), n);
      sys.name = "tent(m=" + std::to_string(spec.m) + ")";
      break;
    }
    case SystemKind::Custom: {
      if (!spec.points_path.empty()) {
        auto r = ingest_trajectory(spec.points_path, spec.map_rule);
        return std::move(r.system);
      }
      if (spec.dist_path.empty() || spec.map_path.empty())
        fail(ErrorKind::ConfigError, "custom systems need either points, or dist and map files");
      sys.space = validate_space(read_dist_csv(spec.dist_path));
      sys.map = read_map_csv(spec.map_path, sys.space.size());
      sys.name = "custom(" + spec.dist_path + ")";
      break;
    }
  }
  return sys;
}

}  // namespace entrolab
