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

#ifndef MFDIM_MFDIM_H_
#define MFDIM_MFDIM_H_

/*
 * C interface to the mfdim library. Objects are opaque handles released with
 * their *_free function. Every call returns an mfd_status; on failure
 * mfd_last_error() describes the problem for the calling thread. Strings
 * returned through char** are heap-allocated and released with
 * mfd_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MFD_API __declspec(dllexport)
#else
#define MFD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfd_status {
  MFD_OK = 0,
  MFD_ERR_DOMAIN = 1,
  MFD_ERR_USAGE = 2,
  MFD_ERR_INFEASIBLE = 3,
  MFD_ERR_DEPTH = 4,
  MFD_ERR_INTEGRITY = 5,
  MFD_ERR_INTERNAL = 6
} mfd_status;

typedef struct mfd_params mfd_params;
typedef struct mfd_family mfd_family;
typedef struct mfd_model mfd_model;
typedef struct mfd_curve mfd_curve;

MFD_API const char* mfd_version(void);
MFD_API const char* mfd_last_error(void);
MFD_API void mfd_string_free(char* s);

/* Construction parameters. */
MFD_API mfd_status mfd_params_from_json(const char* json, mfd_params** out);
MFD_API void mfd_params_free(mfd_params* params);
MFD_API mfd_status mfd_params_to_json(const mfd_params* params, char** out);
/* *pass is 1 when every check holds; report is a JSON document. */
MFD_API mfd_status mfd_params_validate(const mfd_params* params, int* pass, char** report);
MFD_API mfd_status mfd_params_exponent(const mfd_params* params, double x, double* out);
MFD_API mfd_status mfd_params_windows(const mfd_params* params, double out[4]);
/* First `count` schedule entries; MFD_ERR_DEPTH past the order cap, with
   *written holding the entries that fit. */
MFD_API mfd_status mfd_schedule(const mfd_params* params, size_t count, uint64_t* orders,
                                size_t* written);

/* Selected-interval families. Words are strings over '0' and '1'.
   generations = 0 uses the count stored in the parameters. */
MFD_API mfd_status mfd_family_build(const mfd_params* params, size_t generations,
                                    mfd_family** out);
MFD_API void mfd_family_free(mfd_family* family);
MFD_API mfd_status mfd_family_generation_count(const mfd_family* family, size_t* out);
/* Words of generation k joined by '\n'. */
MFD_API mfd_status mfd_family_generation(const mfd_family* family, size_t k, char** out);
MFD_API mfd_status mfd_family_generation_order(const mfd_family* family, size_t k,
                                               uint64_t* out);
/* Tab-separated table with a header row. */
MFD_API mfd_status mfd_family_export_table(const mfd_family* family, char** out);
/* Invariant violations joined by '\n' (empty when none). */
MFD_API mfd_status mfd_family_verify(const mfd_family* family, size_t* count, char** out);
MFD_API mfd_status mfd_family_is_selected(const mfd_family* family, const char* word, int* out);
MFD_API mfd_status mfd_family_contains_selected(const mfd_family* family, const char* word,
                                                int* out);
MFD_API mfd_status mfd_family_partner(const mfd_family* family, const char* word, char** out);

/* Measures. */
MFD_API mfd_status mfd_model_uniform(mfd_model** out);
MFD_API mfd_status mfd_model_cascade(double p0, double p1, mfd_model** out);
MFD_API mfd_status mfd_model_selected(const mfd_family* family, mfd_model** out);
/* "word mass" lines at one order. */
MFD_API mfd_status mfd_model_explicit(const char* text, int renormalize, mfd_model** out);
MFD_API void mfd_model_free(mfd_model* model);
MFD_API mfd_status mfd_model_describe(const mfd_model* model, char** out);
MFD_API mfd_status mfd_mass(const mfd_model* model, const char* word, double* log2_mass,
                            char** decimal);
/* Centers and radii are converted exactly from binary doubles. */
MFD_API mfd_status mfd_ball_mass_bounds(const mfd_model* model, double center, double radius,
                                        size_t depth, double* lower, double* upper);
MFD_API mfd_status mfd_mass_envelope_check(const mfd_model* model, size_t n, int* out);
/* log2 S_n(q, t); *infinite is set when a zero mass meets q < 0. */
MFD_API mfd_status mfd_partition_sum_log2(const mfd_model* model, size_t n, double q, double t,
                                          unsigned threads, size_t enumeration_cap,
                                          double* out, int* infinite);

/* Scaling curves. provenance: 0 estimated, 1 analytic, 2 synthetic. */
MFD_API mfd_status mfd_curve_from_points(const double* qs, const double* values, size_t n,
                                         int provenance, mfd_curve** out);
/* Slopes of log2 S_n(q, 0) over n in [n_lo, n_hi]. residuals may be NULL. */
MFD_API mfd_status mfd_estimate_tau(const mfd_model* model, const double* qs, size_t nq,
                                    size_t n_lo, size_t n_hi, unsigned threads,
                                    size_t enumeration_cap, mfd_curve** curve,
                                    double* residuals);
MFD_API void mfd_curve_free(mfd_curve* curve);
MFD_API mfd_status mfd_curve_size(const mfd_curve* curve, size_t* out);
MFD_API mfd_status mfd_curve_point(const mfd_curve* curve, size_t i, double* q, double* value);

typedef struct mfd_legendre {
  int bracketed;
  int attained;
  double value;
  double argmin;
  double end_slope;
} mfd_legendre;

MFD_API mfd_status mfd_legendre_inf(const mfd_curve* curve, double alpha, double q_min,
                                    mfd_legendre* out);
MFD_API mfd_status mfd_psi(const mfd_curve* curve, double z, double* out);
MFD_API mfd_status mfd_level_identity(const mfd_curve* curve, double eta, double* lhs,
                                      double* rhs, double* residual);
/* *applicable is 0 when alpha q + B(q) < 0 somewhere on the grid. */
MFD_API mfd_status mfd_olsen_bound(const mfd_curve* curve, double alpha, int* applicable,
                                   mfd_legendre* out);

/* Local exponents. */
MFD_API mfd_status mfd_exponent_trace(const mfd_model* model, double x, const size_t* depths,
                                      size_t count, double* exponents);
MFD_API mfd_status mfd_exponent_trace_selected(const mfd_model* model, const char* word,
                                               const size_t* depths, size_t count,
                                               double* exponents);
MFD_API mfd_status mfd_level_set(const mfd_model* model, double alpha, double eta, uint64_t p,
                                 size_t depth, const double* candidates, size_t count,
                                 int* passed, double* limsup_proxy);
/* Same, with the midpoints of the given words as candidates. */
MFD_API mfd_status mfd_level_set_words(const mfd_model* model, double alpha, double eta,
                                       uint64_t p, size_t depth, const char* const* words,
                                       size_t count, int* passed, double* limsup_proxy);

typedef struct mfd_lk_options {
  size_t k;
  int sqrt_rule;  /* 0: u = eps, 1: u ~ sqrt(eps) */
  uint64_t node_budget;
  size_t restarts;
  uint64_t seed;
} mfd_lk_options;

MFD_API void mfd_lk_options_default(mfd_lk_options* options);

/* Replacement-family search on the midpoints of generation k: base packing
   of radius 2^-(n+1), eps = 2^-n. JSON report with value, base_value,
   exhaustive, witness fields and the family. */
MFD_API mfd_status mfd_lk_generation(const mfd_model* model, size_t generation,
                                     const mfd_lk_options* options, char** report);

typedef struct mfd_t_options {
  const double* etas;
  size_t eta_count;
  const uint64_t* ps;
  size_t p_count;
  size_t first_generation; /* selected-family model: candidate generations */
  size_t dyadic_order_lo;  /* other models: candidate orders lo..hi */
  size_t dyadic_order_hi;
  mfd_lk_options lk;
} mfd_t_options;

/* JSON report: alpha and rows {eta, p, defined, t_hat, witness_bound,
   instances}. */
MFD_API mfd_status mfd_t_estimate(const mfd_model* model, double alpha,
                                  const mfd_t_options* options, char** report);

typedef struct mfd_comparison {
  double alpha;
  double t_hat;
  double ratio;
  double olsen;
  double improved;
  double argmin;
  int bracketed;
  int argmin_at_least_one;
  int improvement;
} mfd_comparison;

MFD_API mfd_status mfd_compare_bounds(const mfd_curve* curve, double alpha, double t_hat,
                                      mfd_comparison* out);

/* Packing supremum over points x radii (both as binary doubles). */
MFD_API mfd_status mfd_prepacking_exact(const mfd_model* model, const double* points,
                                        size_t np, double epsilon, double q, double t,
                                        const double* radii, size_t nr, size_t depth,
                                        double* value);
MFD_API mfd_status mfd_prepacking_greedy(const mfd_model* model, const double* points,
                                         size_t np, double epsilon, double q, double t,
                                         const double* radii, size_t nr, size_t depth,
                                         double* value);

#ifdef __cplusplus
}
#endif

#endif  /* MFDIM_MFDIM_H_ */
