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

namespace ksl {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  // At or above this eta the erf bracket is replaced by its indicator limit.
  double eta_clamp = 1.0 - 1e-12;
  unsigned max_depth = 20;
};

// Integral over [lower, upper] of
//   Dx [1 + erf(sqrt(eta / (2 (1 - eta))) x)] (1 - sqrt(q) x)^moment
// with Dx the standard Gaussian measure. Infinite bounds are allowed; the
// Gaussian tails are truncated at 12 standard deviations. For eta at or
// above the clamp the bracket degenerates to 2 * 1{x > 0}.
//
// The bracketed density is the law of y * omega / sqrt(q) for a student
// field omega correlated with the labels y = sign(teacher field), so the
// moment-0 value over a region is the probability of that region.
//
// Throws DomainError for q <= 0, eta outside [0, 1], unordered bounds or a
// moment outside {0, 1, 2}; throws ConvergenceError if the adaptive
// Gauss-Kronrod rule cannot meet rel_tol within max_depth bisections.
double gaussian_indicator_integral(double q, double eta, double lower, double upper, int moment,
                                   const QuadratureOptions& options = {});

// Proximal map of V * max(0, 1 - y x) at omega.
double hinge_prox(double omega, int y, double V);

// Standard normal density and distribution function.
double normal_pdf(double x);
double normal_cdf(double x);

}  // namespace ksl
