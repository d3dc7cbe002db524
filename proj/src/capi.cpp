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

#include "mfdim/mfdim.h"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "mfdim/config.hpp"
#include "mfdim/construction.hpp"
#include "mfdim/error.hpp"
#include "mfdim/localdim.hpp"
#include "mfdim/measure.hpp"
#include "mfdim/packing.hpp"
#include "mfdim/spectrum.hpp"

using namespace mfdim;
using nlohmann::json;

struct mfd_params {
  ConstructionParams params;
};
struct mfd_family {
  std::shared_ptr<const SelectedFamily> family;
};
struct mfd_model {
  MeasureModel model;
};
struct mfd_curve {
  ScalingCurve curve;
};

namespace {

thread_local std::string g_last_error;

mfd_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return MFD_ERR_DOMAIN;
    case ErrorCode::kUsage: return MFD_ERR_USAGE;
    case ErrorCode::kInfeasible: return MFD_ERR_INFEASIBLE;
    case ErrorCode::kDepthExceeded: return MFD_ERR_DEPTH;
    case ErrorCode::kIntegrity: return MFD_ERR_INTEGRITY;
  }
  return MFD_ERR_INTERNAL;
}

template <class F>
mfd_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return MFD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return MFD_ERR_USAGE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MFD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MFD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MFD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw UsageError(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Dyadic exact(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
  return Dyadic::from_double(v);
}

std::vector<Dyadic> exact_all(const double* v, std::size_t n, const char* what) {
  if (n > 0) require(v, what);
  std::vector<Dyadic> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(exact(v[i], what));
  return out;
}

void fill(const LegendreResult& r, mfd_legendre* out) {
  out->bracketed = r.bracketed ? 1 : 0;
  out->attained = r.attained ? 1 : 0;
  out->value = r.value;
  out->argmin = r.argmin;
  out->end_slope = r.end_slope;
}

TOptions search_options(const mfd_lk_options* o) {
  TOptions t;
  mfd_lk_options d;
  mfd_lk_options_default(&d);
  if (o == nullptr) o = &d;
  t.k = o->k;
  t.u_rule = o->sqrt_rule ? URule::kSqrtEpsilon : URule::kEpsilon;
  t.node_budget = o->node_budget;
  t.restarts = o->restarts;
  t.seed = o->seed;
  return t;
}

json family_json(const ReplacementFamily& f) {
  json balls = json::array();
  for (std::size_t i = 0; i < f.balls.size(); ++i) {
    balls.push_back({{"center", f.balls[i].center.to_string()},
                     {"radius", f.balls[i].radius.to_string()},
                     {"part", f.part[i]}});
  }
  return {{"parts", f.parts}, {"balls", balls}};
}

json instance_json(const TInstance& i) {
  return {{"order", i.order},           {"members", i.members},
          {"base_value", i.base_value}, {"lk_value", i.lk_value},
          {"exhaustive", i.exhaustive}, {"has_witness", i.has_witness},
          {"witness_value", i.witness_value}, {"witness_valid", i.witness_valid},
          {"l_value", i.l_value}};
}

}  // namespace

extern "C" {

const char* mfd_version(void) { return "0.1.0"; }

const char* mfd_last_error(void) { return g_last_error.c_str(); }

void mfd_string_free(char* s) { std::free(s); }

mfd_status mfd_params_from_json(const char* text, mfd_params** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = new mfd_params{params_from_json(text)};
  });
}

void mfd_params_free(mfd_params* params) { delete params; }

mfd_status mfd_params_to_json(const mfd_params* params, char** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = dup_string(params_to_json(params->params));
  });
}

mfd_status mfd_params_validate(const mfd_params* params, int* pass, char** report) {
  return guarded([&] {
    require(params, "params");
    const ValidationReport r = validate(params->params);
    if (pass != nullptr) *pass = r.pass ? 1 : 0;
    if (report != nullptr) *report = dup_string(report_to_json(r));
  });
}

mfd_status mfd_params_exponent(const mfd_params* params, double x, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = params->params.g(x);
  });
}

mfd_status mfd_params_windows(const mfd_params* params, double out[4]) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    const TypeWindows& w = params->params.windows;
    out[0] = w.beta1;
    out[1] = w.gamma1;
    out[2] = w.beta2;
    out[3] = w.gamma2;
  });
}

mfd_status mfd_schedule(const mfd_params* params, size_t count, uint64_t* orders,
                        size_t* written) {
  return guarded([&] {
    require(params, "params");
    if (count > 0) require(orders, "orders");
    if (written != nullptr) *written = 0;
    const Schedule full = schedule_to_cap(params->params);
    const auto& v = full.orders();
    const std::size_t n = std::min(count, v.size());
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), orders);
    if (written != nullptr) *written = n;
    if (n < count) schedule(params->params, count);  // throws the capped error
  });
}

mfd_status mfd_family_build(const mfd_params* params, size_t generations, mfd_family** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    const std::size_t g = generations == 0 ? params->params.generations : generations;
    *out = new mfd_family{SelectedFamily::build(params->params, g)};
  });
}

void mfd_family_free(mfd_family* family) { delete family; }

mfd_status mfd_family_generation_count(const mfd_family* family, size_t* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = family->family->generation_count();
  });
}

mfd_status mfd_family_generation(const mfd_family* family, size_t k, char** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    if (k >= family->family->generation_count()) throw UsageError("generation out of range");
    std::string s;
    for (const Member& m : family->family->generation(k)) {
      if (!s.empty()) s += '\n';
      s += m.word.str();
    }
    *out = dup_string(s);
  });
}

mfd_status mfd_family_generation_order(const mfd_family* family, size_t k, uint64_t* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = family->family->generation_order(k);
  });
}

mfd_status mfd_family_export_table(const mfd_family* family, char** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = dup_string(family->family->export_table());
  });
}

mfd_status mfd_family_verify(const mfd_family* family, size_t* count, char** out) {
  return guarded([&] {
    require(family, "family");
    const auto v = verify_family(*family->family);
    if (count != nullptr) *count = v.size();
    if (out != nullptr) {
      std::string s;
      for (const auto& line : v) s += line + "\n";
      *out = dup_string(s);
    }
  });
}

mfd_status mfd_family_is_selected(const mfd_family* family, const char* word, int* out) {
  return guarded([&] {
    require(family, "family");
    require(word, "word");
    require(out, "out");
    *out = family->family->is_selected(DyadicWord(word)) ? 1 : 0;
  });
}

mfd_status mfd_family_contains_selected(const mfd_family* family, const char* word, int* out) {
  return guarded([&] {
    require(family, "family");
    require(word, "word");
    require(out, "out");
    *out = family->family->contains_selected(DyadicWord(word)) ? 1 : 0;
  });
}

mfd_status mfd_family_partner(const mfd_family* family, const char* word, char** out) {
  return guarded([&] {
    require(family, "family");
    require(word, "word");
    require(out, "out");
    *out = dup_string(family->family->partner(DyadicWord(word)).str());
  });
}

mfd_status mfd_model_uniform(mfd_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mfd_model{MeasureModel::uniform()};
  });
}

mfd_status mfd_model_cascade(double p0, double p1, mfd_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mfd_model{MeasureModel::cascade(p0, p1)};
  });
}

mfd_status mfd_model_selected(const mfd_family* family, mfd_model** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = new mfd_model{MeasureModel::selected_family(family->family)};
  });
}

mfd_status mfd_model_explicit(const char* text, int renormalize, mfd_model** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    std::istringstream in(text);
    *out = new mfd_model{MeasureModel::explicit_weights(parse_explicit_weights(in, renormalize != 0))};
  });
}

void mfd_model_free(mfd_model* model) { delete model; }

mfd_status mfd_model_describe(const mfd_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup_string(model->model.describe());
  });
}

mfd_status mfd_mass(const mfd_model* model, const char* word, double* log2_mass,
                    char** decimal) {
  return guarded([&] {
    require(model, "model");
    require(word, "word");
    const DyadicWord w(word);
    const long double l = model->model.log2_mass(w);
    if (log2_mass != nullptr) *log2_mass = static_cast<double>(l);
    if (decimal != nullptr) {
      std::ostringstream os;
      os.precision(17);
      os << model->model.mass(w);
      *decimal = dup_string(os.str());
    }
  });
}

mfd_status mfd_ball_mass_bounds(const mfd_model* model, double center, double radius,
                                size_t depth, double* lower, double* upper) {
  return guarded([&] {
    require(model, "model");
    const MassEnclosure e =
        ball_mass_bounds(model->model, exact(center, "center"), exact(radius, "radius"), depth);
    if (lower != nullptr) *lower = static_cast<double>(e.lower);
    if (upper != nullptr) *upper = static_cast<double>(e.upper);
  });
}

mfd_status mfd_mass_envelope_check(const mfd_model* model, size_t n, int* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = mass_envelope_check(model->model, n) ? 1 : 0;
  });
}

mfd_status mfd_partition_sum_log2(const mfd_model* model, size_t n, double q, double t,
                                  unsigned threads, size_t enumeration_cap, double* out,
                                  int* infinite) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const PartitionSum s = partition_sum(model->model, n, q, t, threads,
                                         enumeration_cap == 0 ? kDefaultPartitionCap : enumeration_cap);
    *out = static_cast<double>(s.log2_value);
    if (infinite != nullptr) *infinite = s.infinite ? 1 : 0;
  });
}

mfd_status mfd_curve_from_points(const double* qs, const double* values, size_t n,
                                 int provenance, mfd_curve** out) {
  return guarded([&] {
    require(qs, "qs");
    require(values, "values");
    require(out, "out");
    CurveProvenance p;
    switch (provenance) {
      case 0: p = CurveProvenance::kEstimated; break;
      case 1: p = CurveProvenance::kAnalytic; break;
      case 2: p = CurveProvenance::kSynthetic; break;
      default: throw UsageError("unknown curve provenance");
    }
    *out = new mfd_curve{ScalingCurve(std::vector<double>(qs, qs + n),
                                      std::vector<double>(values, values + n), p)};
  });
}

mfd_status mfd_estimate_tau(const mfd_model* model, const double* qs, size_t nq, size_t n_lo,
                            size_t n_hi, unsigned threads, size_t enumeration_cap,
                            mfd_curve** curve, double* residuals) {
  return guarded([&] {
    require(model, "model");
    require(qs, "qs");
    require(curve, "curve");
    const SpectrumEstimate e =
        estimate_tau(model->model, std::vector<double>(qs, qs + nq), n_lo, n_hi, threads,
                     enumeration_cap == 0 ? kDefaultPartitionCap : enumeration_cap);
    if (residuals != nullptr) {
      for (std::size_t i = 0; i < e.fits.size(); ++i) residuals[i] = e.fits[i].residual;
    }
    *curve = new mfd_curve{e.curve};
  });
}

void mfd_curve_free(mfd_curve* curve) { delete curve; }

mfd_status mfd_curve_size(const mfd_curve* curve, size_t* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = curve->curve.size();
  });
}

mfd_status mfd_curve_point(const mfd_curve* curve, size_t i, double* q, double* value) {
  return guarded([&] {
    require(curve, "curve");
    if (i >= curve->curve.size()) throw UsageError("curve index out of range");
    if (q != nullptr) *q = curve->curve.qs()[i];
    if (value != nullptr) *value = curve->curve.values()[i];
  });
}

mfd_status mfd_legendre_inf(const mfd_curve* curve, double alpha, double q_min,
                            mfd_legendre* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    fill(legendre_inf(curve->curve, alpha, q_min), out);
  });
}

mfd_status mfd_psi(const mfd_curve* curve, double z, double* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = psi(curve->curve, z);
  });
}

mfd_status mfd_level_identity(const mfd_curve* curve, double eta, double* lhs, double* rhs,
                              double* residual) {
  return guarded([&] {
    require(curve, "curve");
    const IdentityCheck c = check_level_identity(curve->curve, eta);
    if (lhs != nullptr) *lhs = c.lhs;
    if (rhs != nullptr) *rhs = c.rhs;
    if (residual != nullptr) *residual = c.residual;
  });
}

mfd_status mfd_olsen_bound(const mfd_curve* curve, double alpha, int* applicable,
                           mfd_legendre* out) {
  return guarded([&] {
    require(curve, "curve");
    const OlsenBound b = olsen_bound(curve->curve, alpha);
    if (applicable != nullptr) *applicable = b.applicable ? 1 : 0;
    if (!b.applicable) g_last_error = b.reason;
    if (out != nullptr) fill(b.result, out);
  });
}

namespace {

void copy_trace(const ExponentTrace& t, double* exponents) {
  for (std::size_t i = 0; i < t.samples.size(); ++i) exponents[i] = t.samples[i].exponent;
}

}  // namespace

mfd_status mfd_exponent_trace(const mfd_model* model, double x, const size_t* depths,
                              size_t count, double* exponents) {
  return guarded([&] {
    require(model, "model");
    if (count > 0) {
      require(depths, "depths");
      require(exponents, "exponents");
    }
    copy_trace(exponent_trace(model->model, exact(x, "x"),
                              std::vector<std::size_t>(depths, depths + count)),
               exponents);
  });
}

mfd_status mfd_exponent_trace_selected(const mfd_model* model, const char* word,
                                       const size_t* depths, size_t count, double* exponents) {
  return guarded([&] {
    require(model, "model");
    require(word, "word");
    if (count > 0) {
      require(depths, "depths");
      require(exponents, "exponents");
    }
    copy_trace(exponent_trace_selected(model->model, DyadicWord(word),
                                       std::vector<std::size_t>(depths, depths + count)),
               exponents);
  });
}

mfd_status mfd_level_set(const mfd_model* model, double alpha, double eta, uint64_t p,
                         size_t depth, const double* candidates, size_t count, int* passed,
                         double* limsup_proxy) {
  return guarded([&] {
    require(model, "model");
    const LevelSetSample s = level_set_sample(model->model, alpha, eta, p, depth,
                                              exact_all(candidates, count, "candidates"));
    for (std::size_t i = 0; i < count; ++i) {
      if (passed != nullptr) passed[i] = s.passed[i] ? 1 : 0;
      if (limsup_proxy != nullptr) limsup_proxy[i] = s.limsup_proxy[i];
    }
  });
}

mfd_status mfd_level_set_words(const mfd_model* model, double alpha, double eta, uint64_t p,
                               size_t depth, const char* const* words, size_t count, int* passed,
                               double* limsup_proxy) {
  return guarded([&] {
    require(model, "model");
    if (count > 0) require(words, "words");
    std::vector<Dyadic> candidates;
    for (std::size_t i = 0; i < count; ++i) {
      require(words[i], "word");
      candidates.push_back(interval_of(DyadicWord(words[i])).midpoint());
    }
    const LevelSetSample s = level_set_sample(model->model, alpha, eta, p, depth, candidates);
    for (std::size_t i = 0; i < count; ++i) {
      if (passed != nullptr) passed[i] = s.passed[i] ? 1 : 0;
      if (limsup_proxy != nullptr) limsup_proxy[i] = s.limsup_proxy[i];
    }
  });
}

void mfd_lk_options_default(mfd_lk_options* options) {
  if (options == nullptr) return;
  options->k = 2;
  options->sqrt_rule = 0;
  options->node_budget = 2'000'000;
  options->restarts = 16;
  options->seed = 0;
}

mfd_status mfd_lk_generation(const mfd_model* model, size_t generation,
                             const mfd_lk_options* options, char** report) {
  return guarded([&] {
    require(model, "model");
    require(report, "report");
    const SelectedFamily* fam = model->model.family();
    if (fam == nullptr) throw DomainError("generation carriers need the selected-family model");
    if (generation >= fam->generation_count()) throw UsageError("generation out of range");
    std::vector<Dyadic> members;
    for (const Member& m : fam->generation(generation)) {
      members.push_back(interval_of(m.word).midpoint());
    }
    std::sort(members.begin(), members.end());
    const std::size_t order = fam->generation_order(generation);
    const InstanceDetail d = carrier_instance_detail(model->model, members, order,
                                                     search_options(options));
    json j = instance_json(d.instance);
    j["generation"] = generation;
    j["family"] = family_json(d.search.family);
    j["nodes"] = d.search.nodes;
    j["witness"] = {{"valid", d.witness.valid},
                    {"partners_type1", d.witness.partners_type1},
                    {"kept", d.witness.kept},
                    {"moved", d.witness.moved},
                    {"value", d.witness.value}};
    *report = dup_string(j.dump(2));
  });
}

mfd_status mfd_t_estimate(const mfd_model* model, double alpha, const mfd_t_options* options,
                          char** report) {
  return guarded([&] {
    require(model, "model");
    require(options, "options");
    require(report, "report");
    TOptions t = search_options(&options->lk);
    if (options->eta_count > 0) require(options->etas, "etas");
    if (options->p_count > 0) require(options->ps, "ps");
    t.etas.assign(options->etas, options->etas + options->eta_count);
    t.ps.assign(options->ps, options->ps + options->p_count);
    if (const SelectedFamily* fam = model->model.family()) {
      t.candidates = selected_candidate_sets(*fam, options->first_generation);
    } else {
      if (options->dyadic_order_lo == 0 || options->dyadic_order_hi < options->dyadic_order_lo) {
        throw UsageError("candidate orders need 1 <= lo <= hi");
      }
      for (std::size_t n = options->dyadic_order_lo; n <= options->dyadic_order_hi; ++n) {
        t.candidates.push_back(dyadic_candidate_set(n, 2, 64));
      }
    }
    const TEstimate e = t_estimate(model->model, alpha, t);
    json rows = json::array();
    for (const TRow& r : e.rows) {
      json inst = json::array();
      for (const TInstance& i : r.instances) inst.push_back(instance_json(i));
      rows.push_back({{"eta", r.eta},
                      {"p", r.p},
                      {"defined", r.defined},
                      {"t_hat", r.t_hat},
                      {"witness_bound", r.witness_bound},
                      {"instances", inst}});
    }
    *report = dup_string(json{{"alpha", e.alpha}, {"rows", rows}}.dump(2));
  });
}

mfd_status mfd_compare_bounds(const mfd_curve* curve, double alpha, double t_hat,
                              mfd_comparison* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    const BoundComparison c = compare_bounds(curve->curve, alpha, t_hat);
    out->alpha = c.alpha;
    out->t_hat = c.t_hat;
    out->ratio = c.ratio;
    out->olsen = c.olsen;
    out->improved = c.improved;
    out->argmin = c.inf_all.argmin;
    out->bracketed = c.bracketed ? 1 : 0;
    out->argmin_at_least_one = c.argmin_at_least_one ? 1 : 0;
    out->improvement = c.improvement ? 1 : 0;
  });
}

namespace {

mfd_status prepacking(bool exact_search, const mfd_model* model, const double* points,
                      size_t np, double epsilon, double q, double t, const double* radii,
                      size_t nr, size_t depth, double* value) {
  return guarded([&] {
    require(model, "model");
    require(value, "value");
    const auto pts = exact_all(points, np, "points");
    const auto rs = exact_all(radii, nr, "radii");
    const Dyadic eps = exact(epsilon, "epsilon");
    const PrepackingResult r =
        exact_search ? prepacking_sup_exact(model->model, pts, eps, q, t, rs, depth)
                     : greedy_prepacking_estimate(model->model, pts, eps, q, t, rs, depth);
    *value = static_cast<double>(r.value);
  });
}

}  // namespace

mfd_status mfd_prepacking_exact(const mfd_model* model, const double* points, size_t np,
                                double epsilon, double q, double t, const double* radii,
                                size_t nr, size_t depth, double* value) {
  return prepacking(true, model, points, np, epsilon, q, t, radii, nr, depth, value);
}

mfd_status mfd_prepacking_greedy(const mfd_model* model, const double* points, size_t np,
                                 double epsilon, double q, double t, const double* radii,
                                 size_t nr, size_t depth, double* value) {
  return prepacking(false, model, points, np, epsilon, q, t, radii, nr, depth, value);
}

}  // extern "C"
