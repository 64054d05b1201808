#pragma once

// Named and JSON-described group specs.
//
// JSON layout (indices 1-based, matching B^{(k)}_{ij}):
//   {"layer_dims": [2, 1],
//    "structure_constants": [[[1, 1, 2, 1.0], [1, 2, 1, -1.0]]],
//    "kappa": 1.0}
// Quadruples are [k, i, j, value]; they may be given flat or grouped in
// nested lists. Listing only one of (i, j) / (j, i) implies antisymmetry.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "carnot/group.hpp"
#include "carnot/random.hpp"

namespace carnot {

namespace detail {

inline void collect_quadruples(const nlohmann::json& node, std::vector<std::array<double, 4>>& out) {
  if (!node.is_array()) throw Error("structure_constants entries must be arrays");
  if (node.size() == 4 && std::all_of(node.begin(), node.end(), [](const auto& v) { return v.is_number(); })) {
    out.push_back({node[0].get<double>(), node[1].get<double>(), node[2].get<double>(), node[3].get<double>()});
    return;
  }
  for (const auto& child : node) collect_quadruples(child, out);
}

}  // namespace detail

inline GroupSpec group_from_json(const nlohmann::json& j, std::string name = "json") {
  if (!j.is_object() || !j.contains("layer_dims")) throw Error("group spec JSON needs layer_dims");
  std::vector<int> dims;
  for (const auto& d : j.at("layer_dims")) {
    if (!d.is_number_integer()) throw Error("layer_dims must be integers");
    dims.push_back(d.get<int>());
  }
  if (dims.empty() || dims.size() > 2) throw Error("layer_dims must have 1 or 2 entries (step <= 2)");
  for (int d : dims)
    if (d <= 0) throw Error("layer dimensions must be positive");
  const int h = dims[0];
  const int v = dims.size() == 2 ? dims[1] : 0;

  std::vector<std::vector<std::vector<double>>> dense(
      v, std::vector<std::vector<double>>(h, std::vector<double>(h, 0.0)));
  std::vector<std::vector<std::vector<bool>>> seen(
      v, std::vector<std::vector<bool>>(h, std::vector<bool>(h, false)));
  std::vector<std::array<double, 4>> quads;
  if (j.contains("structure_constants")) detail::collect_quadruples(j.at("structure_constants"), quads);
  if (v == 0 && !quads.empty()) throw Error("step-1 specs take no structure constants");

  for (const auto& q : quads) {
    const int k = static_cast<int>(q[0]) - 1;
    const int a = static_cast<int>(q[1]) - 1;
    const int b = static_cast<int>(q[2]) - 1;
    if (q[0] != k + 1 || q[1] != a + 1 || q[2] != b + 1) throw Error("structure constant indices must be integers");
    if (k < 0 || k >= v || a < 0 || a >= h || b < 0 || b >= h)
      throw Error("structure constant index out of range");
    if (seen[k][a][b]) throw Error("duplicate structure constant entry");
    seen[k][a][b] = true;
    dense[k][a][b] = q[3];
  }
  // Fill implied antisymmetric partners; explicit pairs must agree.
  for (int k = 0; k < v; ++k)
    for (int a = 0; a < h; ++a)
      for (int b = 0; b < h; ++b)
        if (seen[k][a][b] && !seen[k][b][a]) {
          if (a == b) continue;
          dense[k][b][a] = -dense[k][a][b];
          seen[k][b][a] = true;
        }
  const double kappa = j.value("kappa", 1.0);
  return GroupSpec(dims, dense, kappa, std::move(name));
}

inline nlohmann::json group_to_json(const GroupSpec& g) {
  nlohmann::json quads = nlohmann::json::array();
  for (const auto& c : g.constants()) quads.push_back({c.k + 1, c.i + 1, c.j + 1, c.value});
  return {{"layer_dims", g.layer_dims()}, {"structure_constants", {quads}}, {"kappa", g.kappa()}};
}

/// Resolves "euclidean:<n>", "heisenberg:<n>" or a path to a JSON file.
inline GroupSpec load_group(const std::string& name_or_path, double kappa = 1.0) {
  auto parse_index = [&](const std::string& rest) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(rest, &used);
    } catch (const std::exception&) {
      throw Error("bad group name: " + name_or_path);
    }
    if (used != rest.size()) throw Error("bad group name: " + name_or_path);
    return n;
  };
  if (name_or_path.rfind("euclidean:", 0) == 0) return GroupSpec::euclidean(parse_index(name_or_path.substr(10)));
  if (name_or_path.rfind("heisenberg:", 0) == 0)
    return GroupSpec::heisenberg(parse_index(name_or_path.substr(11)), kappa);
  std::ifstream in(name_or_path);
  if (!in) throw Error("cannot open group spec: " + name_or_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed group spec JSON: ") + e.what());
  }
  return group_from_json(j, name_or_path);
}

/// Random step-2 spec with small rational structure constants (denominators
/// dividing `denom`), regenerated until stratified.
inline GroupSpec random_rational_step2(int h, int v, std::uint64_t seed, int denom = 4) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<std::vector<double>>> b(
        v, std::vector<std::vector<double>>(h, std::vector<double>(h, 0.0)));
    for (int k = 0; k < v; ++k)
      for (int i = 0; i < h; ++i)
        for (int j = i + 1; j < h; ++j) {
          const double val = static_cast<double>(uniform_int(rng, 4 * denom + 1) - 2 * denom) / denom;
          b[k][i][j] = val;
          b[k][j][i] = -val;
        }
    try {
      return GroupSpec({h, v}, b, 1.0, "random-step2");
    } catch (const Error&) {
    }
  }
  throw Error("could not draw a stratified random spec");
}

}  // namespace carnot
