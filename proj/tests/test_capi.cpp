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

#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>

#include "mfdim/mfdim.h"

namespace {

const char* kDesk = R"js({"beta1": 0.28, "gamma1": 0.34, "beta2": 0.36, "gamma2": 0.42,
  "p0": 0.35, "p1": 0.65, "n0": 12, "growth": "geometric(2)", "generations": 4})js";

std::string take(char* s) {
  std::string out = s ? s : "";
  mfd_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status codes and last error") {
  CHECK(std::strlen(mfd_version()) > 0);
  mfd_params* p = nullptr;
  CHECK(mfd_params_from_json("{\"beta1\": 1}", &p) == MFD_ERR_USAGE);
  CHECK(p == nullptr);
  CHECK(std::strlen(mfd_last_error()) > 0);
  CHECK(mfd_params_from_json(kDesk, nullptr) == MFD_ERR_USAGE);

  mfd_model* m = nullptr;
  CHECK(mfd_model_cascade(0.5, 0.6, &m) == MFD_ERR_DOMAIN);
  REQUIRE(mfd_model_uniform(&m) == MFD_OK);
  double log2m = 0.0;
  char* dec = nullptr;
  CHECK(mfd_mass(m, "01x", &log2m, &dec) != MFD_OK);
  CHECK(mfd_exponent_trace_selected(m, "01", nullptr, 0, nullptr) == MFD_ERR_DOMAIN);
  REQUIRE(mfd_mass(m, "0110", &log2m, &dec) == MFD_OK);
  CHECK(log2m == -4.0);
  CHECK(take(dec) == "0.0625");
  mfd_model_free(m);
}

TEST_CASE("family handles outlive their parameters") {
  mfd_params* p = nullptr;
  REQUIRE(mfd_params_from_json(kDesk, &p) == MFD_OK);
  int pass = 0;
  char* report = nullptr;
  REQUIRE(mfd_params_validate(p, &pass, &report) == MFD_OK);
  CHECK(pass == 1);
  CHECK(take(report).find("\"pass\"") != std::string::npos);
  double g = 0.0;
  REQUIRE(mfd_params_exponent(p, 0.42, &g) == MFD_OK);
  CHECK(g == doctest::Approx(0.996584).epsilon(1e-6));

  uint64_t orders[40];
  size_t written = 0;
  CHECK(mfd_schedule(p, 3, orders, &written) == MFD_OK);
  CHECK(written == 3);
  CHECK(orders[0] == 12);
  CHECK(mfd_schedule(p, 40, orders, &written) == MFD_ERR_DEPTH);
  CHECK(written < 40);

  mfd_family* f = nullptr;
  REQUIRE(mfd_family_build(p, 0, &f) == MFD_OK);
  mfd_params_free(p);
  size_t count = 0;
  REQUIRE(mfd_family_generation_count(f, &count) == MFD_OK);
  CHECK(count == 4);
  const std::string gen0 = take([&] {
    char* s = nullptr;
    mfd_family_generation(f, 0, &s);
    return s;
  }());
  const std::string first = gen0.substr(0, gen0.find('\n'));
  int sel = 0;
  REQUIRE(mfd_family_is_selected(f, first.c_str(), &sel) == MFD_OK);
  CHECK(sel == 1);
  char* mate = nullptr;
  REQUIRE(mfd_family_partner(f, first.c_str(), &mate) == MFD_OK);
  const std::string partner = take(mate);
  CHECK(gen0.find(partner) != std::string::npos);
  size_t violations = 1;
  char* text = nullptr;
  REQUIRE(mfd_family_verify(f, &violations, &text) == MFD_OK);
  CHECK(violations == 0);
  mfd_string_free(text);

  mfd_model* m = nullptr;
  REQUIRE(mfd_model_selected(f, &m) == MFD_OK);
  mfd_family_free(f);
  double log2m = 0.0;
  REQUIRE(mfd_mass(m, first.c_str(), &log2m, nullptr) == MFD_OK);
  CHECK(std::isfinite(log2m));
  CHECK(log2m < 0.0);
  mfd_model_free(m);
}

TEST_CASE("curves through the C interface") {
  double qs[5] = {0.0, 1.0, 2.0, 3.0, 4.0};
  double vs[5] = {1.0, 0.0, -1.0, -2.0, -3.0};
  mfd_curve* c = nullptr;
  REQUIRE(mfd_curve_from_points(qs, vs, 5, 2, &c) == MFD_OK);
  size_t n = 0;
  CHECK(mfd_curve_size(c, &n) == MFD_OK);
  CHECK(n == 5);
  mfd_legendre l{};
  REQUIRE(mfd_legendre_inf(c, 1.0, 0.0, &l) == MFD_OK);
  CHECK(l.value == doctest::Approx(1.0));
  CHECK(l.bracketed == 1);
  double lhs = 0.0, rhs = 0.0, res = 1.0;
  REQUIRE(mfd_level_identity(c, 2.0, &lhs, &rhs, &res) == MFD_OK);
  CHECK(res <= 1e-6);
  CHECK(mfd_level_identity(c, 0.0, &lhs, &rhs, &res) == MFD_ERR_DOMAIN);
  mfd_comparison cmp{};
  REQUIRE(mfd_compare_bounds(c, 1.0, 1.0, &cmp) == MFD_OK);
  CHECK(cmp.olsen == doctest::Approx(1.0));
  CHECK(cmp.improvement == 0);
  mfd_curve_free(c);
  double bad[3] = {1.0, 0.0, 0.5};
  CHECK(mfd_curve_from_points(qs, bad, 3, 2, &c) == MFD_ERR_DOMAIN);

  mfd_model* m = nullptr;
  REQUIRE(mfd_model_uniform(&m) == MFD_OK);
  double tq[3] = {0.0, 1.0, 2.0};
  mfd_curve* est = nullptr;
  double resid[3];
  REQUIRE(mfd_estimate_tau(m, tq, 3, 6, 10, 1, 20, &est, resid) == MFD_OK);
  double q = 0.0, v = 0.0;
  REQUIRE(mfd_curve_point(est, 2, &q, &v) == MFD_OK);
  CHECK(v == doctest::Approx(-1.0));
  CHECK(mfd_curve_point(est, 9, &q, &v) != MFD_OK);
  mfd_curve_free(est);
  mfd_model_free(m);
}

TEST_CASE("free functions accept null") {
  mfd_params_free(nullptr);
  mfd_family_free(nullptr);
  mfd_model_free(nullptr);
  mfd_curve_free(nullptr);
  mfd_string_free(nullptr);
}
