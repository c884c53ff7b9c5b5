#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace tkoszul {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportVersion = "1";

struct Check {
  std::string name;
  bool pass = true;
  json detail = json::object();
};

struct Report {
  std::string title;
  std::vector<Check> checks;

  bool pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  Check& add(std::string name, bool pass, json detail = json::object()) {
    checks.push_back(Check{std::move(name), pass, std::move(detail)});
    return checks.back();
  }
  void merge(const Report& o, const std::string& prefix = {}) {
    for (auto c : o.checks) {
      if (!prefix.empty()) c.name = prefix + "/" + c.name;
      checks.push_back(std::move(c));
    }
  }
  std::vector<const Check*> failures() const {
    std::vector<const Check*> f;
    for (auto& c : checks)
      if (!c.pass) f.push_back(&c);
    return f;
  }
  json to_json() const {
    json j = json::object();
    j["title"] = title;
    j["pass"] = pass();
    json arr = json::array();
    for (auto& c : checks) {
      json e = json::object();
      e["name"] = c.name;
      e["pass"] = c.pass;
      if (!c.detail.empty()) e["detail"] = c.detail;
      arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    return j;
  }
};

}  // namespace tkoszul
