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
#include <string>
#include <vector>

#include "ksl/spectrum.hpp"

namespace ksl {

struct SolverConfig {
  double tol = 1e-9;
  double damping = 0.5;
  std::size_t max_iter = 50000;
  double eta_clamp = 1.0 - 1e-12;
  double quad_tol = 1e-10;

  // Throws DomainError unless 0 < damping <= 1, tol > 0, max_iter >= 1.
  void validate() const;
};

struct DampingChange {
  std::size_t iteration = 0;
  double damping = 0.0;
};

struct SolverDiagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  bool eta_saturated = false;
  // Relative residuals of the last sweep, one per iterated equation.
  std::vector<double> residuals;
  std::vector<DampingChange> damping_trace;

  std::string to_json() const;
};

// Converged fixed point. For max-margin V is the rescaled susceptibility
// lambda V (finite as lambda -> 0+); for ridge at lambda = 0 V is +inf.
struct OrderParameters {
  double m = 0.0;
  double q = 0.0;
  double V = 0.0;
  double rhat1 = 0.0;
  double rhat2 = 0.0;
  double z = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  SolverDiagnostics diagnostics;

  std::string to_json() const;
};

// Max-margin SVM (lambda -> 0+). Throws ConvergenceError with the last
// residuals after max_iter sweeps.
OrderParameters solve_maxmargin(const Spectrum& spectrum, double n, const SolverConfig& config = {});

// Hinge loss with risk (1/n) sum_mu loss + lambda |w|^2. lambda = 0
// delegates to solve_maxmargin.
OrderParameters solve_hinge_regularized(const Spectrum& spectrum, double n, double lambda,
                                        const SolverConfig& config = {});

// Effective ridge regularization: root of
//   z = n lambda + (z/n) sum_k omega_k / (omega_k + z/n).
// The map z -> n lambda / z + (1/n) sum_k omega_k / (omega_k + z/n) is
// strictly decreasing, so the positive root is unique. Returns 0 when
// lambda = 0 and n >= p, where no positive root exists.
double solve_z_ridge(const Spectrum& spectrum, double n, double lambda);

// Square loss on labels sign(teacher field + sigma xi). Throws DomainError if
// the q self-consistency breaks down (T2 >= 1).
OrderParameters solve_ridge(const Spectrum& spectrum, double n, double lambda, double sigma,
                            const SolverConfig& config = {});

// (1/pi) arccos(sqrt(rho / (rho + sigma^2) eta)).
double misclassification_error(const OrderParameters& params, double sigma = 0.0);

// Error floor set by label noise: (1/pi) arccos(sqrt(rho / (rho + sigma^2))).
double residual_error(double rho, double sigma);

// Regularized population hinge risk at lambda, evaluated at the hinge fixed
// point with n = ratio * p. Sum of train loss and lambda |w|^2.
double approximation_error(const Spectrum& spectrum, double lambda, double ratio = 1e3,
                           const SolverConfig& config = {});

// Relative residuals of the defining equations evaluated at `params`:
// (m, q, z) for max-margin, (m, q, V) for the regularized hinge and
// (z, q) for ridge. Used to certify returned fixed points.
std::vector<double> maxmargin_residuals(const Spectrum& spectrum, double n, const OrderParameters& params,
                                        const SolverConfig& config = {});
std::vector<double> hinge_residuals(const Spectrum& spectrum, double n, double lambda,
                                    const OrderParameters& params, const SolverConfig& config = {});
std::vector<double> ridge_residuals(const Spectrum& spectrum, double n, double lambda, double sigma,
                                    const OrderParameters& params);

}  // namespace ksl
