#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atlas.hpp"

namespace tkoszul {

// Shipped fixtures; identical to fixtures/*.json.
inline const std::vector<std::pair<std::string, std::string>>& fixture_sources() {
  static const std::vector<std::pair<std::string, std::string>> all = {
      {"line", R"json({
  "id": "line",
  "charts": [{"id": "u", "kind": "diagonal", "n": 1}],
  "transitions": [],
  "nerve": [["u"]]
}
)json"},
      {"plane", R"json({
  "id": "plane",
  "charts": [{"id": "u", "kind": "diagonal", "n": 2}],
  "transitions": [],
  "nerve": [["u"]]
}
)json"},
      {"shear2", R"json({
  "id": "shear2",
  "charts": [
    {"id": "alpha", "kind": "diagonal", "n": 2},
    {"id": "beta", "kind": "diagonal", "n": 2}
  ],
  "transitions": [
    {"from": "alpha", "to": "beta", "map": ["z1", "z2 + z1^2"], "inverse": ["z1", "z2 - z1^2"]}
  ],
  "nerve": [["alpha"], ["beta"], ["alpha", "beta"]]
}
)json"},
      {"shear3", R"json({
  "id": "shear3",
  "charts": [
    {"id": "alpha", "kind": "diagonal", "n": 2},
    {"id": "beta", "kind": "diagonal", "n": 2},
    {"id": "gamma", "kind": "diagonal", "n": 2}
  ],
  "transitions": [
    {"from": "alpha", "to": "beta", "map": ["z1", "z2 + z1^2"], "inverse": ["z1", "z2 - z1^2"]},
    {"from": "beta", "to": "gamma", "map": ["z1 + z2^2", "z2"], "inverse": ["z1 - z2^2", "z2"]},
    {"from": "alpha", "to": "gamma",
     "map": ["z1 + (z2 + z1^2)^2", "z2 + z1^2"],
     "inverse": ["z1 - z2^2", "z2 - (z1 - z2^2)^2"]}
  ],
  "nerve": [["alpha"], ["beta"], ["gamma"], ["alpha", "beta"], ["alpha", "gamma"], ["beta", "gamma"],
            ["alpha", "beta", "gamma"]]
}
)json"},
      {"trans3", R"json({
  "id": "trans3",
  "charts": [
    {"id": "alpha", "kind": "diagonal", "n": 1},
    {"id": "beta", "kind": "diagonal", "n": 1},
    {"id": "gamma", "kind": "diagonal", "n": 1}
  ],
  "transitions": [
    {"from": "alpha", "to": "beta", "map": ["z1 - 1"], "inverse": ["z1 + 1"]},
    {"from": "beta", "to": "gamma", "map": ["z1 - 1"], "inverse": ["z1 + 1"]},
    {"from": "alpha", "to": "gamma", "map": ["z1 - 2"], "inverse": ["z1 + 2"]}
  ],
  "nerve": [["alpha"], ["beta"], ["gamma"], ["alpha", "beta"], ["alpha", "gamma"], ["beta", "gamma"],
            ["alpha", "beta", "gamma"]]
}
)json"},
      {"offdiag", R"json({
  "id": "offdiag",
  "charts": [
    {"id": "v", "kind": "offdiagonal", "n": 1, "denominators": ["z1 - zeta1"]},
    {"id": "u", "kind": "diagonal", "n": 1}
  ],
  "transitions": [
    {"from": "v", "to": "u", "map": ["z1"], "inverse": ["z1"]}
  ],
  "nerve": [["v"], ["u"], ["v", "u"]]
}
)json"}
  };
  return all;
}

inline bool is_fixture(const std::string& name) {
  for (auto& [n, src] : fixture_sources())
    if (n == name) return true;
  return false;
}

inline Atlas fixture(const std::string& name) {
  for (auto& [n, src] : fixture_sources())
    if (n == name) return load_atlas(nlohmann::json::parse(src));
  throw InvalidAtlas("unknown fixture '" + name + "'");
}

struct FixtureInfo {
  std::string name;
  int n;
  int charts;
  int nerve_dimension;
};

// Fixtures, optionally only those of dimension n.
inline std::vector<FixtureInfo> list_fixtures(std::optional<int> n = std::nullopt) {
  std::vector<FixtureInfo> out;
  for (auto& [name, src] : fixture_sources()) {
    Atlas a = fixture(name);
    if (n && a.dimension() != *n) continue;
    out.push_back({name, a.dimension(), static_cast<int>(a.charts.size()), a.nerve_dimension()});
  }
  return out;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidAtlas("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidAtlas("'" + path + "' is not valid JSON: " + e.what());
  }
}

// A fixture name or a path to an atlas file.
inline Atlas resolve_atlas(const std::string& arg) {
  if (is_fixture(arg)) return fixture(arg);
  return load_atlas(read_json_file(arg));
}

}  // namespace tkoszul
