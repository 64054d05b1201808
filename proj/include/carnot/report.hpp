#pragma once

// JSON views of the library's reports and CSV point-list I/O.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carnot/checks.hpp"
#include "carnot/measure.hpp"
#include "carnot/partition.hpp"
#include "carnot/potential.hpp"
#include "carnot/random.hpp"
#include "carnot/tiling.hpp"
#include "carnot/version.hpp"

namespace carnot {

using json = nlohmann::json;

namespace detail {

// Non-finite values become strings so reports stay valid JSON.
inline json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace detail

inline json to_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(detail::num(p[i]));
  return a;
}

inline json to_json(const GroupCheckReport& r) {
  json haar = json::array();
  for (const auto& [t, v] : r.haar_ratios) haar.push_back({{"t", t}, {"volume", v}});
  return {{"pass", r.pass},
          {"associativity", r.associativity},
          {"identity", r.identity},
          {"inverse", r.inverse},
          {"automorphism", r.automorphism},
          {"homogeneity", r.homogeneity},
          {"gauge_symmetry", r.gauge_symmetry},
          {"left_invariance", r.left_invariance},
          {"quasi_constant", r.quasi_constant},
          {"Q", r.homogeneous_dim},
          {"haar_exponent", r.haar_exponent},
          {"haar_volumes", haar},
          {"failures", r.failures}};
}

/// Overlap pairs are reported with 1-based child indices.
inline json to_json(const CertificationReport& r) {
  json ov = json::array();
  for (const auto& o : r.overlaps) ov.push_back({o.j + 1, o.k + 1, detail::num(o.ratio)});
  return {{"pass", r.pass},
          {"tol", r.tol},
          {"n_samples", r.n_samples},
          {"overlaps", ov},
          {"max_overlap", detail::num(r.max_overlap)},
          {"volume", detail::num(r.volume)},
          {"children_volume", detail::num(r.children_volume)},
          {"consistency", detail::num(r.consistency)},
          {"max_child_deviation", detail::num(r.max_child_deviation)},
          {"positive_volume", r.positive_volume},
          {"K_estimate", r.k_estimate},
          {"R_in", r.r_in},
          {"R_out", r.r_out},
          {"failures", r.failures}};
}

inline json to_json(const DimensionFit& f) {
  return {{"s_hat", detail::num(f.s_hat)},
          {"intercept", detail::num(f.intercept)},
          {"residual", detail::num(f.residual)},
          {"levels", f.levels},
          {"counts", f.counts}};
}

inline json to_json(const FrostmanReport& r) {
  json dec = json::array();
  for (const auto& d : r.decades)
    dec.push_back({{"decade", {d.lo, d.hi}}, {"n", d.n}, {"max", detail::num(d.max)}, {"median", detail::num(d.median)}});
  return {{"s", r.s},
          {"C_hat", detail::num(r.c_hat)},
          {"worst_ball", {{"center", to_json(r.worst_center)}, {"radius", r.worst_radius}}},
          {"decades", dec},
          {"trend_slope", detail::num(r.trend_slope)},
          {"trend", r.trend}};
}

inline json to_json(const PartitionReport& r) {
  json ca = json::array();
  for (const auto& e : r.c_alpha)
    ca.push_back({{"alpha", e.alpha.entries()}, {"level", e.level}, {"C_alpha", detail::num(e.c_alpha)}});
  json stab = json::array();
  for (std::size_t k = 0; k < r.stability.size(); ++k) stab.push_back({{"order", k + 1}, {"ratio", detail::num(r.stability[k])}});
  return {{"sum_error", r.sum_error},
          {"theta_error", r.theta_error},
          {"phi_min", r.phi_min},
          {"phi_max", r.phi_max},
          {"support_violation", r.support_violation},
          {"constant_derivative", r.constant_derivative},
          {"C_alpha", ca},
          {"stability", stab},
          {"n_samples", r.n_samples}};
}

inline json to_json(const CutoffLpReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"alpha", row.alpha.entries()},
                    {"level", row.level},
                    {"eps", row.eps},
                    {"lp_norm", detail::num(row.lp_norm)},
                    {"bound_rhs", detail::num(row.bound_rhs)},
                    {"ratio", detail::num(row.ratio)}});
  return {{"p", detail::num(r.p)},
          {"ell", r.ell},
          {"content_dim", r.content_dim},
          {"content", r.content},
          {"rows", rows},
          {"low_samples", r.low_samples}};
}

inline json to_json(const KernelReport& r) {
  json bands = json::array();
  for (const auto& b : r.bands) bands.push_back({{"ratio", b.ratio}, {"n", b.n}, {"max", b.max}, {"median", b.median}});
  return {{"bound_constant", r.bound_constant},
          {"homogeneity_defect", r.homogeneity_defect},
          {"C_smooth", r.c_smooth},
          {"bands", bands},
          {"band_spread", detail::num(r.band_spread)},
          {"dilation_defect", r.dilation_defect}};
}

inline json to_json(const SeminormReport& r) {
  json dec = json::array();
  for (const auto& d : r.decades) {
    json e = {{"decade", {d.lo, d.hi}}, {"n", d.n}, {"median", detail::num(d.median)}, {"max", detail::num(d.max)}};
    if (r.kind == "bmo") {
      e["median_alt"] = detail::num(d.median_alt);
      e["max_alt"] = detail::num(d.max_alt);
    }
    dec.push_back(e);
  }
  return {{"kind", r.kind},
          {"decades", dec},
          {"max", detail::num(r.max)},
          {"spread", detail::num(r.spread)},
          {"monotone_growth", r.monotone_growth},
          {"excluded", r.excluded},
          {"evaluated", r.evaluated}};
}

inline json to_json(const LpReport& r) {
  json shells = json::array();
  for (const auto& s : r.shells)
    shells.push_back({{"layer", s.layer}, {"radius", s.radius}, {"contribution", detail::num(s.contribution)}, {"n", s.n}});
  return {{"p", r.p},
          {"integral", detail::num(r.integral)},
          {"norm", detail::num(r.norm)},
          {"outer", detail::num(r.outer)},
          {"shells", shells},
          {"tail", detail::num(r.tail)},
          {"tail_slope", detail::num(r.tail_slope)},
          {"divergent", r.divergent}};
}

/// Wraps a report body with the resolved config, its hash, the seed and the
/// library version.
inline json stamp_report(const std::string& command, const json& config, std::uint64_t seed, json body) {
  const std::string canon = config.dump();
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return {{"command", command},
          {"config", config},
          {"config_hash", hash},
          {"seed", seed},
          {"version", kVersion},
          {"result", std::move(body)}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_header(const GroupSpec& g, bool with_weight) {
  std::string h = "level,word";
  for (int i = 1; i <= g.dim(); ++i) h += ",x" + std::to_string(i);
  if (with_weight) h += ",weight";
  return h;
}

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(int level, const std::string& word, const Point& p) {
  std::string row = std::to_string(level) + "," + word;
  for (int i = 0; i < p.dim(); ++i) row += "," + csv_number(p[i]);
  return row;
}

/// Reads points from a CSV file. Accepts either plain coordinate rows or the
/// `level,word,x1,...,xD[,weight]` layout; a header line is skipped.
inline std::vector<Point> read_points_csv(const GroupSpec& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open point file: " + path);
  std::vector<Point> out;
  std::string line;
  bool first = true;
  std::size_t off = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      if (line.rfind("level,word", 0) == 0) {
        off = 2;
        continue;
      }
      bool numeric = true;
      for (const auto& c : cells) {
        char* end = nullptr;
        std::strtod(c.c_str(), &end);
        if (end == c.c_str()) numeric = false;
      }
      if (!numeric) continue;
    }
    if (cells.size() < off + static_cast<std::size_t>(g.dim()))
      throw Error("point row has too few coordinates: " + line);
    Point p(g.dim());
    for (int i = 0; i < g.dim(); ++i) {
      const std::string& c = cells[off + static_cast<std::size_t>(i)];
      char* end = nullptr;
      p[i] = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) throw Error("bad coordinate in point row: " + line);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace carnot
