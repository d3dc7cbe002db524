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

#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mfdim_cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double real(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw ConfigError("'" + key + "' must be a finite number");
  }
  return v.get<double>();
}

std::uint64_t whole(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError("'" + key + "' must be a non-negative integer");
}

std::uint64_t whole(const json& j, const std::string& key, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t v = whole(j.at(key), key);
  if (v < lo || v > hi) {
    throw ConfigError("'" + key + "' must lie in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return v;
}

std::vector<double> reals(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      throw ConfigError("'" + key + "' must be an array of finite numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::uint64_t> wholes(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array of integers");
  std::vector<std::uint64_t> out;
  for (const json& e : v) out.push_back(whole(e, key));
  return out;
}

std::string text(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

ModelSpec read_model(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("'model' must be an object");
  reject_unknown(j, {"kind", "p0", "p1", "params", "weights", "renormalize"}, "model");
  ModelSpec m;
  m.kind = text(j, "kind");
  if (m.kind == "uniform") {
    reject_unknown(j, {"kind"}, "uniform model");
  } else if (m.kind == "cascade") {
    reject_unknown(j, {"kind", "p0", "p1"}, "cascade model");
    if (j.contains("p0")) m.p0 = real(j, "p0");
    if (j.contains("p1")) m.p1 = real(j, "p1");
  } else if (m.kind == "selected-family") {
    reject_unknown(j, {"kind", "params"}, "selected-family model");
    if (!j.contains("params")) throw ConfigError("selected-family model needs 'params'");
    const json& p = j.at("params");
    if (p.is_string()) {
      m.params_json = read_file(resolve(base, p.get<std::string>()));
    } else if (p.is_object()) {
      m.params_json = p.dump();
    } else {
      throw ConfigError("'params' must be a file path or an object");
    }
  } else if (m.kind == "explicit") {
    reject_unknown(j, {"kind", "weights", "renormalize"}, "explicit model");
    if (!j.contains("weights")) throw ConfigError("explicit model needs 'weights'");
    m.weights_text = read_file(resolve(base, text(j, "weights")));
    if (j.contains("renormalize")) {
      if (!j.at("renormalize").is_boolean()) throw ConfigError("'renormalize' must be a boolean");
      m.renormalize = j.at("renormalize").get<bool>();
    }
  } else {
    throw ConfigError("unknown model kind '" + m.kind + "'");
  }
  return m;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  const std::string body = read_file(path);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"model", "q_grid", "n_range", "enumeration_cap", "alpha", "alphas", "etas",
                  "ps", "eta", "p", "depth", "depths", "points", "words", "generations",
                  "first_generation", "orders", "t_hat", "k", "u_rule", "node_budget",
                  "restarts", "instances", "max_points", "partition_csv", "ts", "seed",
                  "threads", "out"},
                 "config");
  RunConfig c;
  c.base_dir = path.parent_path();
  try {
    if (j.contains("model")) c.model = read_model(j.at("model"), c.base_dir);
    if (j.contains("q_grid")) {
      const json& g = j.at("q_grid");
      if (!g.is_object()) throw ConfigError("'q_grid' must be an object");
      reject_unknown(g, {"lo", "hi", "step"}, "q_grid");
      if (g.contains("lo")) c.q_lo = real(g, "lo");
      if (g.contains("hi")) c.q_hi = real(g, "hi");
      if (g.contains("step")) c.q_step = real(g, "step");
      if (!(c.q_step > 0.0) || c.q_hi < c.q_lo || (c.q_hi - c.q_lo) / c.q_step > 100000.0) {
        throw ConfigError("'q_grid' needs step > 0, lo <= hi and at most 1e5 points");
      }
    }
    if (j.contains("n_range")) {
      const auto r = wholes(j, "n_range");
      if (r.size() != 2 || r[0] < 1 || r[1] <= r[0] || r[1] > 4096) {
        throw ConfigError("'n_range' must be [lo, hi] with 1 <= lo < hi <= 4096");
      }
      c.n_lo = r[0];
      c.n_hi = r[1];
    }
    if (j.contains("enumeration_cap")) c.enumeration_cap = whole(j, "enumeration_cap", 1, 30);
    if (j.contains("alpha")) {
      c.alpha = real(j, "alpha");
      if (!(*c.alpha > 0.0)) throw ConfigError("'alpha' must be positive");
    }
    if (j.contains("alphas")) {
      c.alphas = reals(j, "alphas");
      for (double a : c.alphas) {
        if (!(a > 0.0)) throw ConfigError("'alphas' must be positive");
      }
    }
    if (j.contains("etas")) c.etas = reals(j, "etas");
    if (j.contains("ps")) c.ps = wholes(j, "ps");
    for (std::uint64_t p : c.ps) {
      if (p < 1) throw ConfigError("'ps' entries must be at least 1");
    }
    if (j.contains("eta")) c.eta = real(j, "eta");
    if (j.contains("p")) c.p = whole(j, "p", 1, std::uint64_t{1} << 62);
    if (j.contains("depth")) c.depth = whole(j, "depth", 1, 4096);
    if (j.contains("depths")) {
      for (std::uint64_t d : wholes(j, "depths")) {
        if (d < 1 || d > 65536) throw ConfigError("'depths' entries must lie in [1, 65536]");
        c.depths.push_back(d);
      }
    }
    if (j.contains("points")) {
      c.points = reals(j, "points");
      for (double x : c.points) {
        if (x < 0.0 || x >= 1.0) throw ConfigError("'points' must lie in [0, 1)");
      }
    }
    if (j.contains("words")) {
      const json& w = j.at("words");
      if (!w.is_array()) throw ConfigError("'words' must be an array of strings");
      for (const json& e : w) {
        if (!e.is_string() || e.get<std::string>().find_first_not_of("01") != std::string::npos) {
          throw ConfigError("'words' entries must be strings over 0 and 1");
        }
        c.words.push_back(e.get<std::string>());
      }
    }
    if (j.contains("generations")) {
      for (std::uint64_t g : wholes(j, "generations")) c.generations.push_back(g);
    }
    if (j.contains("first_generation")) c.first_generation = whole(j, "first_generation", 0, 4096);
    if (j.contains("orders")) {
      const auto r = wholes(j, "orders");
      if (r.size() != 2 || r[0] < 1 || r[1] < r[0] || r[1] > 60) {
        throw ConfigError("'orders' must be [lo, hi] with 1 <= lo <= hi <= 60");
      }
      c.order_lo = r[0];
      c.order_hi = r[1];
    }
    if (j.contains("t_hat")) c.t_hat = real(j, "t_hat");
    if (j.contains("k")) c.k = whole(j, "k", 1, 4);
    if (j.contains("u_rule")) {
      c.u_rule = text(j, "u_rule");
      if (c.u_rule != "eps" && c.u_rule != "sqrt-eps") {
        throw ConfigError("'u_rule' must be \"eps\" or \"sqrt-eps\"");
      }
    }
    if (j.contains("node_budget")) c.node_budget = whole(j, "node_budget", 1, 1'000'000'000);
    if (j.contains("restarts")) c.restarts = whole(j, "restarts", 0, 10000);
    if (j.contains("instances")) c.instances = whole(j, "instances", 1, 1'000'000);
    if (j.contains("max_points")) c.max_points = whole(j, "max_points", 1, 16);
    if (j.contains("partition_csv")) c.partition_csv = resolve(c.base_dir, text(j, "partition_csv")).string();
    if (j.contains("ts")) c.ts = reals(j, "ts");
    if (j.contains("seed")) c.seed = whole(j.at("seed"), "seed");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(whole(j, "threads", 0, 1024));
    if (j.contains("out")) c.out = resolve(c.base_dir, text(j, "out")).string();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace mfdim_cli
