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

#include <string>

namespace ksl {

// Every function throws DomainError unless alpha > 1 and r >= 0 (and
// ell >= 0 where it appears). Exponents are for eps_g ~ n^-exponent.

// Max-margin SVM: alpha min(r, 1/2) / (1 + alpha min(r, 1/2)).
double svm_rate(double alpha, double r);

// Ridge at lambda = n^-ell; zero on the plateau ell > alpha.
double ridge_rate(double alpha, double r, double ell);

struct RidgeOptimum {
  double ell_star = 0.0;
  double exponent = 0.0;
};
RidgeOptimum ridge_optimal(double alpha, double r);

struct HingeRate {
  double exponent = 0.0;
  // Decay beyond which regularization no longer matters.
  double ell_star = 0.0;
};
// Regularized hinge at lambda = n^-ell. Only 0 <= r <= 1/2 is supported;
// ell may be +inf (max-margin).
HingeRate hinge_regularized_rate(double alpha, double r, double ell);

// Rate of the excess error eps_g - eps_inf for ridge on noisy labels.
double noisy_ridge_rate(double alpha, double r, double ell);

// Large-noise rate alpha / (1 + alpha). Accepts alpha >= 1.
double noisy_crossover_rate(double alpha);

// Classical distribution-free bound min(1/2, alpha / (3 + alpha)), with the
// Bernstein constants B = V = 2 and exponent 1 of the noiseless setting.
// Applies only for r > 1/2; the caller is responsible for that check.
double worst_case_svm_bound(double alpha);

// Approximation-error exponent b in A2(lambda) ~ lambda^b.
inline constexpr double kApproximationExponent = 1.0 / 3.0;

struct RateReport {
  double alpha = 0.0;
  double r = 0.0;
  double a_svm = 0.0;
  double a_ridge_opt = 0.0;
  double ell_star_ridge = 0.0;
  double ell_star_hinge = 0.0;
  // NaN unless r > 1/2.
  double a_worst_case = 0.0;
  double a_noisy_opt = 0.0;
  double b = kApproximationExponent;
  bool svm_beats_ridge = false;
  // Meaningful only when has_worst_case.
  bool has_worst_case = false;
  bool svm_beats_worst_case = false;

  std::string to_json() const;
};

RateReport compare(double alpha, double r);

}  // namespace ksl
