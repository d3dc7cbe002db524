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

#pragma once

// Run configuration for the mfdim command-line tool.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfdim_cli {

// Thrown for malformed or out-of-range configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string kind;           // uniform | cascade | selected-family | explicit
  double p0 = 0.25;           // cascade
  double p1 = 0.75;
  std::string params_json;    // selected-family: parameter document
  std::string weights_text;   // explicit: "word mass" lines
  bool renormalize = false;
};

struct RunConfig {
  std::filesystem::path base_dir;
  std::optional<ModelSpec> model;

  double q_lo = 0.0;
  double q_hi = 10.0;
  double q_step = 0.25;
  std::size_t n_lo = 8;
  std::size_t n_hi = 16;
  std::size_t enumeration_cap = 22;

  std::optional<double> alpha;
  std::vector<double> alphas;
  std::vector<double> etas;
  std::vector<std::uint64_t> ps;
  std::optional<double> eta;
  std::optional<std::uint64_t> p;
  std::size_t depth = 24;
  std::vector<std::size_t> depths;
  std::vector<double> points;
  std::vector<std::string> words;
  std::vector<std::size_t> generations;
  std::size_t first_generation = 2;
  std::size_t order_lo = 8;
  std::size_t order_hi = 12;
  std::optional<double> t_hat;

  std::size_t k = 2;
  std::string u_rule = "eps";
  std::uint64_t node_budget = 2'000'000;
  std::size_t restarts = 16;

  std::size_t instances = 100;
  std::size_t max_points = 8;

  std::string partition_csv;  // optional (n, q, t, log2 S_n) output
  std::vector<double> ts;      // t values for partition_csv

  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

// Reads and range-checks a config file. Unknown keys are rejected.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace mfdim_cli
