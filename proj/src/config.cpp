// Copyright 2026 The mfdim Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mfdim/config.hpp"

#include <set>

#include "json.hpp"
#include "mfdim/error.hpp"

namespace mfdim {

namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw UsageError(std::string("params: '") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t whole(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw UsageError(std::string("params: '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

ConstructionParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("params: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("params: expected a JSON object");
  static const std::set<std::string> known{"beta1", "gamma1", "beta2", "gamma2", "p0", "p1",
                                           "n0", "growth", "generations", "selection_policy",
                                           "order_cap"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("params: unknown key '" + key + "'");
  }
  for (const char* key : {"beta1", "gamma1", "beta2", "gamma2", "p0", "p1", "n0", "growth"}) {
    if (!j.contains(key)) throw UsageError(std::string("params: missing key '") + key + "'");
  }
  ConstructionParams p;
  p.windows.beta1 = number(j, "beta1");
  p.windows.gamma1 = number(j, "gamma1");
  p.windows.beta2 = number(j, "beta2");
  p.windows.gamma2 = number(j, "gamma2");
  p.p0 = number(j, "p0");
  p.p1 = number(j, "p1");
  p.n0 = whole(j, "n0");
  if (!j.at("growth").is_string()) throw UsageError("params: 'growth' must be a string");
  p.growth = Growth::parse(j.at("growth").get<std::string>());
  if (j.contains("generations")) p.generations = whole(j, "generations");
  if (j.contains("order_cap")) p.order_cap = whole(j, "order_cap");
  if (j.contains("selection_policy")) {
    if (!j.at("selection_policy").is_string()) {
      throw UsageError("params: 'selection_policy' must be a string");
    }
    p.selection_policy = j.at("selection_policy").get<std::string>();
  }
  return p;
}

std::string params_to_json(const ConstructionParams& p) {
  json j{{"beta1", p.windows.beta1}, {"gamma1", p.windows.gamma1}, {"beta2", p.windows.beta2},
         {"gamma2", p.windows.gamma2}, {"p0", p.p0}, {"p1", p.p1}, {"n0", p.n0},
         {"growth", p.growth.to_string()}, {"generations", p.generations},
         {"selection_policy", p.selection_policy}, {"order_cap", p.order_cap}};
  return j.dump(2);
}

std::string report_to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const ValidationCheck& c : r.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  json j{{"pass", r.pass}, {"checks", checks}};
  j["first_failure"] = r.pass ? json(nullptr) : json(r.first_failure);
  return j.dump(2);
}

}  // namespace mfdim
