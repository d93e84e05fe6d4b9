#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrolab/complexity.hpp"
#include "entrolab/covers.hpp"
#include "entrolab/error.hpp"
#include "entrolab/order.hpp"

namespace entrolab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that round-trips the double.
inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::InvalidEntry, "cannot format number");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Covers and subcover results

inline Json to_json(const Cover& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["pieces"] = c.piece_indices();
  return j;
}

inline Cover cover_from_json(const FiniteMetricSpace& space, const Json& j) {
  if (!j.contains("pieces") || !j["pieces"].is_array()) fail(ErrorKind::FileMalformed, "cover JSON lacks 'pieces'");
  return Cover(space, j["pieces"].get<std::vector<std::vector<std::size_t>>>());
}

inline Json to_json(const SubcoverResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["value"] = r.value;
  j["mode"] = to_string(r.mode);
  j["exact"] = r.exact;
  return j;
}

// ---------------------------------------------------------------------------
// Preorders and maps

inline Json to_json(const FinitePreorder& p) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < p.size(); ++j) row.push_back(p.leq(i, j));
    rows.push_back(std::move(row));
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["leq"] = std::move(rows);
  return j;
}

inline FinitePreorder preorder_from_json(const Json& j) {
  if (!j.contains("leq") || !j["leq"].is_array()) fail(ErrorKind::FileMalformed, "preorder JSON lacks 'leq'");
  std::vector<std::vector<bool>> rows;
  for (const auto& r : j["leq"]) {
    if (!r.is_array()) fail(ErrorKind::FileMalformed, "'leq' rows must be arrays");
    std::vector<bool> row;
    for (const auto& v : r) {
      if (!v.is_boolean() && !v.is_number_integer()) fail(ErrorKind::FileMalformed, "'leq' entries must be booleans");
      row.push_back(v.is_boolean() ? v.get<bool>() : v.get<int>() != 0);
    }
    rows.push_back(std::move(row));
  }
  return FinitePreorder::from_rows(rows);
}

inline Json to_json(const MonotoneMap& m) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["values"] = m.values();
  return j;
}

inline MonotoneMap monotone_map_from_json(const Json& j, const FinitePreorder& dom, const FinitePreorder& cod) {
  if (!j.contains("values") || !j["values"].is_array()) fail(ErrorKind::FileMalformed, "map JSON lacks 'values'");
  return MonotoneMap(dom, cod, j["values"].get<std::vector<std::size_t>>());
}

inline Json chain_value_json(ChainValue v) {
  if (v == ChainValue::neg_inf()) return "-inf";
  if (v == ChainValue::pos_inf()) return "+inf";
  return v.v;
}

inline ChainValue chain_value_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return ChainValue::neg_inf();
    if (s == "+inf" || s == "inf") return ChainValue::pos_inf();
    fail(ErrorKind::FileMalformed, "chain value '" + s + "' is not a number");
  }
  if (!j.is_number()) fail(ErrorKind::FileMalformed, "chain value is not a number");
  return j.get<double>();
}

inline Json to_json(const ChainMap& m) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json vals = Json::array();
  for (auto v : m.values()) vals.push_back(chain_value_json(v));
  j["values"] = std::move(vals);
  j["orientation"] = m.orientation() == Orientation::Ascending ? "ascending" : "descending";
  return j;
}

inline ChainMap chain_map_from_json(const Json& j, const FinitePreorder& dom) {
  if (!j.contains("values") || !j["values"].is_array()) fail(ErrorKind::FileMalformed, "map JSON lacks 'values'");
  std::vector<ChainValue> vals;
  for (const auto& v : j["values"]) vals.push_back(chain_value_from_json(v));
  Orientation o = Orientation::Ascending;
  if (j.contains("orientation")) {
    const auto s = j["orientation"].get<std::string>();
    if (s == "descending") o = Orientation::Descending;
    else if (s != "ascending") fail(ErrorKind::FileMalformed, "orientation must be ascending or descending");
  }
  return ChainMap(dom, std::move(vals), o);
}

// ---------------------------------------------------------------------------
// Sweep tables

inline std::string sweep_csv_header() { return "method,eps,n,count,exact,log_rate\n"; }

inline std::string sweep_csv_rows(const std::vector<EntropyEstimate>& ests) {
  std::string out;
  for (const auto& e : ests) {
    for (std::size_t n = 1; n <= e.rates.horizon(); ++n) {
      out += to_string(e.method);
      out += ',' + format_real(e.eps) + ',' + std::to_string(n) + ',' + std::to_string(e.rates[n]) + ',' +
             (e.exact[n - 1] ? "true" : "false") + ',' + format_real(e.log_rates[n - 1]) + '\n';
    }
  }
  return out;
}

inline Json to_json(const EntropyEstimate& e) {
  Json j;
  j["counts"] = e.rates.counts();
  j["raw_counts"] = e.raw_counts;
  j["exact"] = e.exact;
  j["log_rates"] = e.log_rates;
  j["loglim"] = e.loglim;
  j["window"] = {e.window.lo, e.window.hi};
  j["envelope_applied"] = e.envelope_applied;
  if (e.catalogue_loglim) j["catalogue_loglim"] = *e.catalogue_loglim;
  return j;
}

/// {"schema_version", "methods": {method: {eps: estimate}}}, grains in grid order.
inline Json sweep_json(const std::map<Method, std::vector<EntropyEstimate>>& sweep) {
  Json methods = Json::object();
  for (const auto& [m, ests] : sweep) {
    Json by_eps = Json::object();
    for (const auto& e : ests) by_eps[format_real(e.eps)] = to_json(e);
    methods[to_string(m)] = std::move(by_eps);
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["methods"] = std::move(methods);
  return j;
}

inline Json to_json(const Extrapolation& x) {
  Json j;
  j["value"] = x.value;
  j["spread"] = x.spread;
  j["stabilized"] = x.stabilized;
  j["tolerance"] = x.tolerance;
  j["loglims"] = x.loglims;
  return j;
}

}  // namespace entrolab
