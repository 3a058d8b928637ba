// Copyright 2026 The ksl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ksl/learning_curve.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "json.hpp"

#include "ksl/errors.hpp"

namespace ksl {

std::string to_string(Method method) {
  switch (method) {
    case Method::MaxMargin:
      return "maxmargin";
    case Method::Hinge:
      return "hinge";
    case Method::Ridge:
      return "ridge";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "maxmargin" || text == "svm") return Method::MaxMargin;
  if (text == "hinge") return Method::Hinge;
  if (text == "ridge") return Method::Ridge;
  throw DomainError("unknown method '" + text + "' (expected maxmargin, hinge or ridge)");
}

double LambdaRule::at(double n) const {
  switch (kind) {
    case Kind::Fixed:
      return value;
    case Kind::Decay:
      return std::pow(n, -value);
    case Kind::Optimal:
      break;
  }
  throw DomainError("LambdaRule: the optimal rule has no closed-form lambda");
}

std::vector<CurvePoint> LearningCurve::valid_points() const {
  std::vector<CurvePoint> out;
  for (const auto& p : points) {
    if (p.ok) out.push_back(p);
  }
  return out;
}

PowerLawFit LearningCurve::fit() const {
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (!p.ok) continue;
    xs.push_back(p.n);
    ys.push_back(p.value);
  }
  return fit_powerlaw(xs, ys, 0, xs.size());
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::pair<double, double> optimal_ridge_error(const Spectrum& spectrum, double n, double sigma,
                                              const SweepOptions& options) {
  auto err = [&](double log10_lambda) {
    try {
      const OrderParameters p = solve_ridge(spectrum, n, std::pow(10.0, log10_lambda), sigma, options.solver);
      return misclassification_error(p, sigma);
    } catch (const DomainError&) {
      return 1.0;
    }
  };
  const double step = options.log10_lambda_step;
  if (!(step > 0.0) || !(options.log10_lambda_max > options.log10_lambda_min)) {
    throw DomainError("optimal_ridge_error: invalid lambda window");
  }
  double best_x = options.log10_lambda_min;
  double best = err(best_x);
  for (double x = options.log10_lambda_min + step; x <= options.log10_lambda_max + 1e-12; x += step) {
    const double e = err(x);
    if (e < best) {
      best = e;
      best_x = x;
    }
  }
  // Golden-section refinement on the bracketing cell pair.
  constexpr double kGolden = 0.6180339887498949;
  double a = best_x - step;
  double b = best_x + step;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = err(c), fd = err(d);
  for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = err(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = err(d);
    }
  }
  const double x = fc < fd ? c : d;
  const double fx = std::min(fc, fd);
  if (fx < best) return {std::pow(10.0, x), fx};
  return {std::pow(10.0, best_x), best};
}

namespace {

std::string theory_label(Method method) {
  switch (method) {
    case Method::MaxMargin:
      return "theory-svm";
    case Method::Hinge:
      return "theory-hinge";
    case Method::Ridge:
      return "theory-ridge";
  }
  return "theory";
}

void check_grid(const std::vector<double>& n_grid) {
  if (n_grid.empty()) throw DomainError("sweep: n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] >= 1.0) || !std::isfinite(n_grid[i])) throw DomainError("sweep: n values must be >= 1");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw DomainError("sweep: n grid must be strictly increasing");
  }
}

}  // namespace

LearningCurve theory_sweep(Method method, const Spectrum& spectrum, const std::vector<double>& n_grid,
                           const LambdaRule& rule, double sigma, const SweepOptions& options) {
  check_grid(n_grid);
  options.solver.validate();
  if (!(sigma >= 0.0)) throw DomainError("theory_sweep: sigma must be >= 0");
  if (rule.kind == LambdaRule::Kind::Optimal && method != Method::Ridge) {
    throw DomainError("theory_sweep: the optimal lambda rule is only available for ridge");
  }
  if (sigma > 0.0 && method != Method::Ridge) {
    throw DomainError("theory_sweep: label noise is only modelled for ridge");
  }
  LearningCurve curve;
  curve.label = theory_label(method);
  curve.meta.p = spectrum.size();
  curve.meta.sigma = sigma;
  curve.meta.rule = rule;
  curve.points.resize(n_grid.size());
  parallel_for(n_grid.size(), options.jobs, [&](std::size_t i) {
    CurvePoint& pt = curve.points[i];
    pt.n = n_grid[i];
    try {
      if (method == Method::MaxMargin) {
        pt.lambda = 0.0;
        pt.value = misclassification_error(solve_maxmargin(spectrum, pt.n, options.solver));
      } else if (rule.kind == LambdaRule::Kind::Optimal) {
        const auto [lambda, value] = optimal_ridge_error(spectrum, pt.n, sigma, options);
        pt.lambda = lambda;
        pt.value = value;
      } else {
        pt.lambda = rule.at(pt.n);
        const OrderParameters p = method == Method::Hinge
                                      ? solve_hinge_regularized(spectrum, pt.n, pt.lambda, options.solver)
                                      : solve_ridge(spectrum, pt.n, pt.lambda, sigma, options.solver);
        pt.value = misclassification_error(p, sigma);
      }
      if (!(pt.value > 0.0)) {
        pt.ok = false;
        pt.error = "non-positive error value";
      }
    } catch (const ConvergenceError& e) {
      pt.ok = false;
      pt.nonconvergence = true;
      pt.error = e.what();
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  });
  return curve;
}

LearningCurve theory_sweep(Method method, const PowerLawModel& model, const std::vector<double>& n_grid,
                           const LambdaRule& rule, double sigma, const SweepOptions& options) {
  model.validate();
  LearningCurve curve = theory_sweep(method, Spectrum(model), n_grid, rule, sigma, options);
  curve.meta.alpha = model.alpha;
  curve.meta.r = model.r;
  return curve;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_header(bool with_seed_stderr) {
  return with_seed_stderr ? "n,value,method,alpha,r,ell,sigma,seed,stderr" : "n,value,method,alpha,r,ell,sigma";
}

std::string to_csv(const LearningCurve& curve, bool with_seed_stderr) {
  std::string out = csv_header(with_seed_stderr) + "\n";
  const std::string ell =
      curve.meta.rule.kind == LambdaRule::Kind::Decay ? format_number(curve.meta.rule.value) : std::string();
  for (const auto& p : curve.points) {
    if (!p.ok) continue;
    out += format_number(p.n) + "," + format_number(p.value) + "," + curve.label + "," +
           format_number(curve.meta.alpha) + "," + format_number(curve.meta.r) + "," + ell + "," +
           format_number(curve.meta.sigma);
    if (with_seed_stderr) {
      out += ",";
      if (p.seed) out += std::to_string(*p.seed);
      out += "," + (p.seed ? std::string() : format_number(p.std_error));
    }
    out += "\n";
  }
  return out;
}

std::string to_json(const LearningCurve& curve) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : curve.points) {
    nlohmann::json j = {{"n", p.n}, {"value", num(p.value)}, {"ok", p.ok}, {"lambda", num(p.lambda)}};
    if (std::isfinite(p.std_error)) j["stderr"] = p.std_error;
    if (p.seed) j["seed"] = *p.seed;
    if (!p.ok) j["error"] = p.error;
    pts.push_back(std::move(j));
  }
  const char* kinds[] = {"fixed", "decay", "optimal"};
  nlohmann::json meta = {{"alpha", num(curve.meta.alpha)},
                         {"r", num(curve.meta.r)},
                         {"p", curve.meta.p},
                         {"sigma", curve.meta.sigma},
                         {"lambda_rule", kinds[static_cast<int>(curve.meta.rule.kind)]},
                         {"lambda_rule_value", curve.meta.rule.value}};
  return nlohmann::json{{"label", curve.label}, {"meta", meta}, {"points", pts}}.dump();
}

}  // namespace ksl
