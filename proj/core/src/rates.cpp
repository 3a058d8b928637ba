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

#include "ksl/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "ksl/errors.hpp"

namespace ksl {

namespace {

void check(double alpha, double r) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw DomainError("rates: alpha must be > 1");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("rates: r must be >= 0");
}

void check_ell(double ell) {
  if (!(ell >= 0.0)) throw DomainError("rates: ell must be >= 0");
}

}  // namespace

double svm_rate(double alpha, double r) {
  check(alpha, r);
  const double s = alpha * std::min(r, 0.5);
  return s / (1.0 + s);
}

double ridge_rate(double alpha, double r, double ell) {
  check(alpha, r);
  check_ell(ell);
  if (ell > alpha) return 0.0;
  return 0.5 * std::min(2.0 * ell * std::min(r, 1.0), (alpha - ell) / alpha);
}

RidgeOptimum ridge_optimal(double alpha, double r) {
  check(alpha, r);
  const double d = 1.0 + 2.0 * alpha * std::min(r, 1.0);
  return {alpha / d, alpha * std::min(r, 1.0) / d};
}

HingeRate hinge_regularized_rate(double alpha, double r, double ell) {
  check(alpha, r);
  check_ell(ell);
  if (r > 0.5) throw DomainError("hinge_regularized_rate: unsupported source range r > 1/2");
  HingeRate out;
  out.ell_star = alpha * (1.0 + r) / (1.0 + alpha * r);
  out.exponent = std::min(ell, out.ell_star) * r / (1.0 + r);
  return out;
}

double noisy_ridge_rate(double alpha, double r, double ell) { return 2.0 * ridge_rate(alpha, r, ell); }

double noisy_crossover_rate(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("noisy_crossover_rate: alpha must be >= 1");
  return alpha / (1.0 + alpha);
}

double worst_case_svm_bound(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw DomainError("worst_case_svm_bound: alpha must be > 1");
  return std::min(0.5, alpha / (3.0 + alpha));
}

RateReport compare(double alpha, double r) {
  check(alpha, r);
  RateReport rep;
  rep.alpha = alpha;
  rep.r = r;
  rep.a_svm = svm_rate(alpha, r);
  const RidgeOptimum opt = ridge_optimal(alpha, r);
  rep.a_ridge_opt = opt.exponent;
  rep.ell_star_ridge = opt.ell_star;
  const double rs = std::min(r, 0.5);
  rep.ell_star_hinge = alpha * (1.0 + rs) / (1.0 + alpha * rs);
  rep.a_noisy_opt = noisy_ridge_rate(alpha, r, opt.ell_star);
  rep.svm_beats_ridge = rep.a_svm > rep.a_ridge_opt;
  rep.has_worst_case = r > 0.5;
  if (rep.has_worst_case) {
    rep.a_worst_case = worst_case_svm_bound(alpha);
    rep.svm_beats_worst_case = rep.a_svm > rep.a_worst_case;
  } else {
    rep.a_worst_case = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::string RateReport::to_json() const {
  nlohmann::json j = {{"alpha", alpha},
                      {"r", r},
                      {"a_svm", a_svm},
                      {"a_ridge_opt", a_ridge_opt},
                      {"ell_star_ridge", ell_star_ridge},
                      {"ell_star_hinge", ell_star_hinge},
                      {"a_noisy_opt", a_noisy_opt},
                      {"b", b},
                      {"svm_beats_ridge", svm_beats_ridge}};
  if (has_worst_case) {
    j["a_worst_case"] = a_worst_case;
    j["svm_beats_worst_case"] = svm_beats_worst_case;
  } else {
    j["a_worst_case"] = nullptr;
    j["svm_beats_worst_case"] = nullptr;
  }
  return j.dump();
}

}  // namespace ksl
