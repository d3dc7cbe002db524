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

// mfdim: command-line front end over the C interface.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfdim/mfdim.h"
#include "run_config.hpp"

namespace {

using nlohmann::json;
using mfdim_cli::ConfigError;
using mfdim_cli::RunConfig;

enum Exit { kOk = 0, kDomain = 1, kUsage = 2, kInfeasible = 3, kDepth = 4 };

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_of(mfd_status s) {
  switch (s) {
    case MFD_OK: return kOk;
    case MFD_ERR_USAGE: return kUsage;
    case MFD_ERR_INFEASIBLE: return kInfeasible;
    case MFD_ERR_DEPTH: return kDepth;
    default: return kDomain;
  }
}

void check(mfd_status s) {
  if (s != MFD_OK) throw Failure{exit_code_of(s), mfd_last_error()};
}

struct Deleter {
  void operator()(mfd_params* p) const { mfd_params_free(p); }
  void operator()(mfd_family* p) const { mfd_family_free(p); }
  void operator()(mfd_model* p) const { mfd_model_free(p); }
  void operator()(mfd_curve* p) const { mfd_curve_free(p); }
  void operator()(char* p) const { mfd_string_free(p); }
};

template <class T>
using Owned = std::unique_ptr<T, Deleter>;

std::string take(char* s) {
  Owned<char> holder(s);
  return s == nullptr ? std::string() : std::string(s);
}

// Shortest text that reads back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Failure{kUsage, "cannot write '" + path + "'"};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct Options {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = -1;
};

RunConfig load(const Options& o) {
  RunConfig c = mfdim_cli::load_run_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads >= 0) c.threads = static_cast<unsigned>(o.threads);
  return c;
}

const mfdim_cli::ModelSpec& model_spec(const RunConfig& c) {
  if (!c.model) throw ConfigError("config needs a 'model' section");
  return *c.model;
}

Owned<mfd_params> load_params(const RunConfig& c) {
  const auto& m = model_spec(c);
  if (m.kind != "selected-family") throw ConfigError("this command needs a selected-family model");
  mfd_params* p = nullptr;
  check(mfd_params_from_json(m.params_json.c_str(), &p));
  return Owned<mfd_params>(p);
}

struct Model {
  Owned<mfd_model> model;
  bool selected = false;
  std::vector<std::vector<std::string>> generations;  // selected-family words
};

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Model build_model(const RunConfig& c) {
  const auto& m = model_spec(c);
  Model out;
  mfd_model* raw = nullptr;
  if (m.kind == "uniform") {
    check(mfd_model_uniform(&raw));
  } else if (m.kind == "cascade") {
    check(mfd_model_cascade(m.p0, m.p1, &raw));
  } else if (m.kind == "explicit") {
    check(mfd_model_explicit(m.weights_text.c_str(), m.renormalize ? 1 : 0, &raw));
  } else {
    Owned<mfd_params> params = load_params(c);
    mfd_family* fam = nullptr;
    check(mfd_family_build(params.get(), 0, &fam));
    Owned<mfd_family> family(fam);
    check(mfd_model_selected(family.get(), &raw));
    out.selected = true;
    std::size_t count = 0;
    check(mfd_family_generation_count(family.get(), &count));
    for (std::size_t k = 0; k < count; ++k) {
      char* words = nullptr;
      check(mfd_family_generation(family.get(), k, &words));
      out.generations.push_back(split_lines(take(words)));
    }
  }
  out.model.reset(raw);
  return out;
}

std::vector<double> q_values(const RunConfig& c) {
  std::vector<double> qs;
  const auto steps = static_cast<long long>(std::floor((c.q_hi - c.q_lo) / c.q_step + 1e-9));
  for (long long i = 0; i <= steps; ++i) qs.push_back(c.q_lo + static_cast<double>(i) * c.q_step);
  return qs;
}

struct Spectrum {
  Owned<mfd_curve> curve;
  std::vector<double> qs;
  std::vector<double> residuals;
};

Spectrum estimate_spectrum(const RunConfig& c, const mfd_model* model) {
  Spectrum s;
  s.qs = q_values(c);
  s.residuals.assign(s.qs.size(), 0.0);
  mfd_curve* curve = nullptr;
  check(mfd_estimate_tau(model, s.qs.data(), s.qs.size(), c.n_lo, c.n_hi, c.threads,
                         c.enumeration_cap, &curve, s.residuals.data()));
  s.curve.reset(curve);
  return s;
}

mfd_lk_options lk_options(const RunConfig& c) {
  mfd_lk_options o;
  mfd_lk_options_default(&o);
  o.k = c.k;
  o.sqrt_rule = c.u_rule == "sqrt-eps" ? 1 : 0;
  o.node_budget = c.node_budget;
  o.restarts = c.restarts;
  o.seed = c.seed;
  return o;
}

json run_t_estimate(const RunConfig& c, const mfd_model* model, double alpha,
                    const std::vector<double>& etas) {
  if (etas.empty()) throw ConfigError("no eta above alpha = " + num(alpha));
  if (c.ps.empty()) throw ConfigError("config needs 'ps'");
  mfd_t_options o{};
  o.etas = etas.data();
  o.eta_count = etas.size();
  o.ps = c.ps.data();
  o.p_count = c.ps.size();
  o.first_generation = c.first_generation;
  o.dyadic_order_lo = c.order_lo;
  o.dyadic_order_hi = c.order_hi;
  o.lk = lk_options(c);
  char* report = nullptr;
  check(mfd_t_estimate(model, alpha, &o, &report));
  return json::parse(take(report));
}

// Limit proxy: sup over p (the table increases in p), then inf over eta
// (it decreases as eta approaches alpha).
double t_hat_of(const json& report) {
  double best = std::numeric_limits<double>::infinity();
  std::map<double, double> by_eta;
  for (const json& row : report.at("rows")) {
    if (!row.at("defined").get<bool>()) continue;
    const double eta = row.at("eta").get<double>();
    const double t = row.at("t_hat").get<double>();
    auto [it, fresh] = by_eta.emplace(eta, t);
    if (!fresh) it->second = std::max(it->second, t);
  }
  for (const auto& [eta, t] : by_eta) best = std::min(best, t);
  if (by_eta.empty()) throw Failure{kInfeasible, "no level-set sample was non-empty"};
  return best;
}

std::vector<double> etas_above(const RunConfig& c, double alpha) {
  std::vector<double> out;
  for (double e : c.etas) {
    if (e > alpha) out.push_back(e);
  }
  return out;
}

double require_alpha(const RunConfig& c) {
  if (!c.alpha) throw ConfigError("config needs 'alpha'");
  return *c.alpha;
}

// ---- subcommands ----

int cmd_validate(const RunConfig& c) {
  Owned<mfd_params> params = load_params(c);
  int pass = 0;
  char* report = nullptr;
  check(mfd_params_validate(params.get(), &pass, &report));
  const json r = json::parse(take(report));
  Output out(c.out);
  out.stream() << r.dump(2) << "\n";
  if (!pass) {
    std::cerr << "validation failed: " << r.at("first_failure").get<std::string>() << "\n";
    return kDomain;
  }
  return kOk;
}

int cmd_construct(const RunConfig& c) {
  Owned<mfd_params> params = load_params(c);
  mfd_family* fam = nullptr;
  check(mfd_family_build(params.get(), 0, &fam));
  Owned<mfd_family> family(fam);
  std::size_t violations = 0;
  char* detail = nullptr;
  check(mfd_family_verify(family.get(), &violations, &detail));
  const std::string lines = take(detail);
  char* table = nullptr;
  check(mfd_family_export_table(family.get(), &table));
  Output out(c.out);
  out.stream() << take(table);
  if (violations > 0) {
    std::cerr << lines;
    throw Failure{kDomain, std::to_string(violations) + " invariant violations"};
  }
  return kOk;
}

int cmd_mass(const RunConfig& c) {
  Model m = build_model(c);
  if (c.words.empty()) throw ConfigError("config needs 'words'");
  Output out(c.out);
  out.stream() << "word,log2_mass,mass\n";
  for (const std::string& w : c.words) {
    double l = 0.0;
    char* dec = nullptr;
    check(mfd_mass(m.model.get(), w.c_str(), &l, &dec));
    out.stream() << w << "," << num(l) << "," << take(dec) << "\n";
  }
  return kOk;
}

int cmd_spectrum(const RunConfig& c) {
  Model m = build_model(c);
  Spectrum s = estimate_spectrum(c, m.model.get());
  Output out(c.out);
  out.stream() << "q,tau_hat,residual\n";
  double at_one = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.qs.size(); ++i) {
    double q = 0.0;
    double v = 0.0;
    check(mfd_curve_point(s.curve.get(), i, &q, &v));
    if (q == 1.0) at_one = v;
    out.stream() << num(q) << "," << num(v) << "," << num(s.residuals[i]) << "\n";
  }
  if (!std::isnan(at_one)) {
    std::cerr << "tau_hat(1) = " << num(at_one)
              << (std::fabs(at_one) <= 1e-9 ? " (ok)" : " (expected 0)") << "\n";
  }
  if (!c.partition_csv.empty()) {
    std::ofstream pc(c.partition_csv, std::ios::binary);
    if (!pc) throw Failure{kUsage, "cannot write '" + c.partition_csv + "'"};
    const std::vector<double> ts = c.ts.empty() ? std::vector<double>{0.0} : c.ts;
    pc << "n,q,t,log2_S\n";
    for (std::size_t n = c.n_lo; n <= c.n_hi; ++n) {
      for (double q : s.qs) {
        for (double t : ts) {
          double v = 0.0;
          int inf = 0;
          check(mfd_partition_sum_log2(m.model.get(), n, q, t, c.threads, c.enumeration_cap, &v,
                                       &inf));
          pc << n << "," << num(q) << "," << num(t) << "," << (inf ? "inf" : num(v)) << "\n";
        }
      }
    }
  }
  return kOk;
}

int cmd_trace(const RunConfig& c) {
  Model m = build_model(c);
  if (c.depths.empty()) throw ConfigError("config needs 'depths'");
  if (c.points.empty() && c.words.empty()) throw ConfigError("config needs 'points' or 'words'");
  Output out(c.out);
  out.stream() << "point,n,exponent\n";
  std::vector<double> ex(c.depths.size());
  for (double x : c.points) {
    check(mfd_exponent_trace(m.model.get(), x, c.depths.data(), c.depths.size(), ex.data()));
    for (std::size_t i = 0; i < ex.size(); ++i) {
      out.stream() << num(x) << "," << c.depths[i] << "," << num(ex[i]) << "\n";
    }
  }
  for (const std::string& w : c.words) {
    check(mfd_exponent_trace_selected(m.model.get(), w.c_str(), c.depths.data(), c.depths.size(),
                                      ex.data()));
    for (std::size_t i = 0; i < ex.size(); ++i) {
      out.stream() << w << "," << c.depths[i] << "," << num(ex[i]) << "\n";
    }
  }
  return kOk;
}

int cmd_levelset(const RunConfig& c) {
  Model m = build_model(c);
  const double alpha = require_alpha(c);
  if (!c.eta || !c.p) throw ConfigError("config needs 'eta' and 'p'");
  std::vector<std::string> words = c.words;
  if (c.points.empty() && words.empty() && m.selected) {
    if (c.first_generation >= m.generations.size()) throw ConfigError("'first_generation' out of range");
    words = m.generations[c.first_generation];
  }
  if (c.points.empty() && words.empty()) throw ConfigError("config needs 'points' or 'words'");
  Output out(c.out);
  out.stream() << "point,passed,limsup_proxy\n";
  if (!c.points.empty()) {
    std::vector<int> pass(c.points.size());
    std::vector<double> proxy(c.points.size());
    check(mfd_level_set(m.model.get(), alpha, *c.eta, *c.p, c.depth, c.points.data(),
                        c.points.size(), pass.data(), proxy.data()));
    for (std::size_t i = 0; i < pass.size(); ++i) {
      out.stream() << num(c.points[i]) << "," << pass[i] << "," << num(proxy[i]) << "\n";
    }
  }
  if (!words.empty()) {
    std::vector<const char*> ptrs;
    for (const auto& w : words) ptrs.push_back(w.c_str());
    std::vector<int> pass(words.size());
    std::vector<double> proxy(words.size());
    check(mfd_level_set_words(m.model.get(), alpha, *c.eta, *c.p, c.depth, ptrs.data(),
                              ptrs.size(), pass.data(), proxy.data()));
    for (std::size_t i = 0; i < pass.size(); ++i) {
      out.stream() << words[i] << "," << pass[i] << "," << num(proxy[i]) << "\n";
    }
  }
  return kOk;
}

int cmd_lquantity(const RunConfig& c) {
  Model m = build_model(c);
  if (!m.selected) throw ConfigError("lquantity needs a selected-family model");
  std::vector<std::size_t> gens = c.generations;
  if (gens.empty()) {
    for (std::size_t k = c.first_generation; k < m.generations.size(); ++k) gens.push_back(k);
  }
  const mfd_lk_options o = lk_options(c);
  json reports = json::array();
  for (std::size_t g : gens) {
    char* r = nullptr;
    check(mfd_lk_generation(m.model.get(), g, &o, &r));
    reports.push_back(json::parse(take(r)));
  }
  Output out(c.out);
  out.stream() << json{{"k", c.k}, {"u_rule", c.u_rule}, {"instances", reports}}.dump(2) << "\n";
  return kOk;
}

int cmd_tmu(const RunConfig& c) {
  Model m = build_model(c);
  const double alpha = require_alpha(c);
  if (c.etas.empty()) throw ConfigError("config needs 'etas'");
  const json report = run_t_estimate(c, m.model.get(), alpha, c.etas);
  Output out(c.out);
  out.stream() << "eta,p,T_hat,witness_bound,defined\n";
  for (const json& row : report.at("rows")) {
    const bool defined = row.at("defined").get<bool>();
    out.stream() << num(row.at("eta").get<double>()) << "," << row.at("p").get<std::uint64_t>()
                 << "," << (defined ? num(row.at("t_hat").get<double>()) : "nan") << ","
                 << (defined ? num(row.at("witness_bound").get<double>()) : "nan") << ","
                 << (defined ? 1 : 0) << "\n";
  }
  return kOk;
}

int cmd_compare_bounds(const RunConfig& c) {
  Model m = build_model(c);
  Spectrum s = estimate_spectrum(c, m.model.get());
  auto compare = [&](double alpha) {
    const double t_hat =
        c.t_hat ? *c.t_hat : t_hat_of(run_t_estimate(c, m.model.get(), alpha, etas_above(c, alpha)));
    mfd_comparison r{};
    check(mfd_compare_bounds(s.curve.get(), alpha, t_hat, &r));
    return r;
  };
  Output out(c.out);
  if (!c.alphas.empty()) {
    out.stream() << "alpha,olsen,new\n";
    for (double a : c.alphas) {
      const mfd_comparison r = compare(a);
      out.stream() << num(a) << "," << num(r.olsen) << "," << num(r.improved) << "\n";
    }
    return kOk;
  }
  const mfd_comparison r = compare(require_alpha(c));
  json j{{"alpha", r.alpha},
         {"olsen", r.olsen},
         {"new", r.improved},
         {"t_hat", r.t_hat},
         {"ratio", r.ratio},
         {"argmin", r.argmin},
         {"argmin_at_least_one", r.argmin_at_least_one != 0},
         {"bracketed", r.bracketed != 0},
         {"improvement", r.improvement != 0}};
  out.stream() << j.dump(2) << "\n";
  return kOk;
}

// Random tiny packing instances: exact search against the greedy estimate.
int cmd_oracle(const RunConfig& c) {
  Model m = build_model(c);
  std::mt19937_64 rng(c.seed);
  const std::size_t order = 6;
  const std::vector<double> radii{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  Output out(c.out);
  out.stream() << "instance,points,q,t,exact,greedy\n";
  bool ok = true;
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t np = 1 + rng() % c.max_points;
    std::vector<double> pts;
    for (std::size_t j = 0; j < np; ++j) {
      pts.push_back((2.0 * static_cast<double>(rng() % (1u << order)) + 1.0) /
                    static_cast<double>(2u << order));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double q = static_cast<double>(rng() % 21) / 4.0 - 2.0;
    const double t = static_cast<double>(rng() % 5) / 4.0;
    double exact = 0.0;
    double greedy = 0.0;
    check(mfd_prepacking_exact(m.model.get(), pts.data(), pts.size(), 1.0 / 8, q, t,
                               radii.data(), radii.size(), 14, &exact));
    check(mfd_prepacking_greedy(m.model.get(), pts.data(), pts.size(), 1.0 / 8, q, t,
                                radii.data(), radii.size(), 14, &greedy));
    if (greedy > exact) ok = false;
    out.stream() << i << "," << pts.size() << "," << num(q) << "," << num(t) << "," << num(exact)
                 << "," << num(greedy) << "\n";
  }
  if (!ok) throw Failure{kDomain, "greedy estimate exceeded the exact value"};
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic multifractal measures: construction, spectra and packing bounds", "mfdim"};
  app.require_subcommand(1);
  Options opts;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Entry entries[] = {
      {"validate", "check construction parameters", cmd_validate},
      {"construct", "build a selected-interval family and export its table", cmd_construct},
      {"mass", "masses of dyadic words", cmd_mass},
      {"spectrum", "estimate the scaling curve (q, tau_hat, residual)", cmd_spectrum},
      {"trace", "local exponents (point, n, exponent)", cmd_trace},
      {"levelset", "finite-scale level-set membership", cmd_levelset},
      {"lquantity", "replacement-family searches on generation carriers", cmd_lquantity},
      {"tmu", "T estimates (eta, p, T_hat)", cmd_tmu},
      {"compare-bounds", "compare the two upper bounds", cmd_compare_bounds},
      {"oracle", "exact against greedy packing sums on random tiny instances", cmd_oracle},
  };
  int (*selected)(const RunConfig&) = nullptr;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opts.config, "JSON run configuration")->required();
    sub->add_option("--out", opts.out, "output path (default stdout)");
    sub->add_option("--seed", opts.seed, "search seed (default from config, else 0)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", opts.threads, "worker threads, 0 = auto")
        ->check(CLI::NonNegativeNumber);
    sub->callback([&selected, run = e.run] { selected = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    return selected(load(opts));
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed library report: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
}
