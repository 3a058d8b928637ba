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

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ksl/powerlaw_fit.hpp"
#include "ksl/spectrum.hpp"
#include "ksl/state_evolution.hpp"

namespace ksl {

enum class Method { MaxMargin, Hinge, Ridge };

std::string to_string(Method method);
// Accepts "maxmargin", "svm", "hinge", "ridge".
Method parse_method(const std::string& text);

// How lambda is chosen at each sample count.
struct LambdaRule {
  enum class Kind { Fixed, Decay, Optimal };
  Kind kind = Kind::Fixed;
  // lambda for Fixed, ell for Decay (lambda = n^-ell), unused for Optimal.
  double value = 0.0;

  static LambdaRule fixed(double lambda) { return {Kind::Fixed, lambda}; }
  static LambdaRule decay(double ell) { return {Kind::Decay, ell}; }
  static LambdaRule optimal() { return {Kind::Optimal, 0.0}; }

  // lambda at n; throws DomainError for Optimal.
  double at(double n) const;
};

struct CurvePoint {
  double n = 0.0;
  double value = 0.0;
  // Standard error over seeds; NaN for theory points.
  double std_error = std::numeric_limits<double>::quiet_NaN();
  // Lambda actually used (the minimizer for the optimal rule).
  double lambda = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
  std::string error;
  // The failure was a solver or trainer non-convergence.
  bool nonconvergence = false;
  // Set only on per-seed records.
  std::optional<unsigned long long> seed;
};

struct CurveMeta {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();
  std::size_t p = 0;
  double sigma = 0.0;
  LambdaRule rule;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  // theory-svm | theory-ridge | theory-hinge | sim-svm | sim-ridge | sim-hinge
  std::string label;
  CurveMeta meta;

  // Points whose solve or training succeeded.
  std::vector<CurvePoint> valid_points() const;
  // Log-log fit over all valid points.
  PowerLawFit fit() const;
};

struct SweepOptions {
  SolverConfig solver;
  // Worker threads; results are ordered by n regardless of completion order.
  unsigned jobs = 1;
  // Log10 lambda window and resolution searched by the optimal rule.
  double log10_lambda_min = -10.0;
  double log10_lambda_max = 2.0;
  double log10_lambda_step = 0.25;
};

// One solver call per n (a 1-D minimization over lambda for the optimal
// rule, ridge only). Failures are recorded per point, never thrown, except
// for invalid arguments.
LearningCurve theory_sweep(Method method, const Spectrum& spectrum, const std::vector<double>& n_grid,
                           const LambdaRule& rule, double sigma = 0.0, const SweepOptions& options = {});
LearningCurve theory_sweep(Method method, const PowerLawModel& model, const std::vector<double>& n_grid,
                           const LambdaRule& rule, double sigma = 0.0, const SweepOptions& options = {});

// Ridge eps_g minimized over log lambda at a single n. Returns (lambda, error).
std::pair<double, double> optimal_ridge_error(const Spectrum& spectrum, double n, double sigma,
                                              const SweepOptions& options = {});

// CSV with header n,value,method,alpha,r,ell,sigma and, when `with_seed_stderr`,
// the extra columns seed,stderr. Failed points are omitted.
std::string to_csv(const LearningCurve& curve, bool with_seed_stderr = false);
std::string to_json(const LearningCurve& curve);

// Shared by every CSV writer so formatting cannot drift.
std::string csv_header(bool with_seed_stderr);
std::string format_number(double value);

// Runs fn(i) for i in [0, count) on `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ksl
