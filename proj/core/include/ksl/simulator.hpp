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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ksl/learning_curve.hpp"
#include "ksl/spectrum.hpp"

namespace ksl {

// Gaussian design: row mu is psi = Sigma^{1/2} g in the eigenbasis of
// Sigma, labels are sign(theta* . psi + sigma xi) with sign(0) = +1.
struct SyntheticDataset {
  Eigen::MatrixXd features;  // n x p
  Eigen::VectorXd teacher;   // p
  Eigen::VectorXd labels;    // n, entries +-1
  Eigen::VectorXd noise;     // n, the xi draws (zero when sigma = 0)
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Entry (mu, k) is sqrt(omega_k) g with g drawn from the counter stream
// keyed by (seed, mu, k), so a dataset with n rows is a prefix of one with
// more rows. Throws DomainError for n < 1 or sigma < 0.
SyntheticDataset sample_dataset(const Spectrum& spectrum, std::size_t n, double sigma, std::uint64_t seed);

enum class ClassifierMethod { Ridge, Hinge };

struct LinearClassifier {
  Eigen::VectorXd weights;
  // Hinge only: dual coefficients in [0, C].
  std::optional<Eigen::VectorXd> dual_coeffs;
  // Hinge only: training margins y_mu w.psi_mu.
  std::optional<Eigen::VectorXd> margins;
  double lambda = 0.0;
  ClassifierMethod method = ClassifierMethod::Ridge;
  // Hinge only: box bound 1 / (2 n lambda) and solver diagnostics.
  double C = 0.0;
  std::size_t iterations = 0;
  double kkt_violation = 0.0;
  // Hinge only: primal risk and dual objective on the same scale.
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  // (P - D) / P for hinge classifiers.
  double relative_duality_gap() const;
};

// Minimizer of (1/n) sum (y - w.psi)^2 + lambda |w|^2, solving whichever of
// the n x n dual or p x p primal systems is smaller. Throws DomainError when
// lambda = 0 and that system is singular.
LinearClassifier train_ridge(const SyntheticDataset& data, double lambda);

struct SvmOptions {
  double tol = 1e-6;
  // Relative duality gap required on top of the KKT test.
  double gap_tol = 1e-7;
  // Coordinate updates allowed, as a multiple of n.
  std::size_t max_sweeps = 20000;
};

// Minimizer of (1/n) sum max(0, 1 - y w.psi) + lambda |w|^2 via greedy
// coordinate ascent on the box-constrained dual with C = 1 / (2 n lambda),
// stopped when the largest projected-gradient violation is below tol and the
// relative duality gap is below gap_tol (the KKT threshold is tightened until
// both hold).
// Throws ConvergenceError (residual = violation) at the update cap.
LinearClassifier train_svm_hinge(const SyntheticDataset& data, double lambda, const SvmOptions& options = {});
// Same, on a precomputed gram K = Psi Psi^T.
LinearClassifier train_svm_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double lambda,
                                const SvmOptions& options = {});

// Exact Gaussian-design test error (1/pi) arccos(c) where c is the signed
// correlation of w.psi with the noisy teacher field; spans [0, 1].
double analytic_error(const Eigen::VectorXd& weights, const Spectrum& spectrum, double sigma = 0.0);
double analytic_error(const LinearClassifier& classifier, const Spectrum& spectrum, double sigma = 0.0);

// Fraction of sign disagreements on a test set, counting w.psi = 0 as +1.
double empirical_error(const LinearClassifier& classifier, const SyntheticDataset& test);

struct CvResult {
  double lambda_best = 0.0;
  // (lambda, mean validation error) in grid order.
  std::vector<std::pair<double, double>> curve;
};

// k-fold cross-validation of the ridge classifier. Folds come from a seeded
// permutation; a split leaving one class in some training fold is redrawn
// once, then reported as DomainError. Ties go to the smaller lambda.
CvResult cross_validate_lambda(const SyntheticDataset& data, const std::vector<double>& grid, std::size_t folds,
                               std::uint64_t seed = 0);

struct SimulationOptions {
  std::uint64_t base_seed = 1;
  unsigned jobs = 1;
  SvmOptions svm;
  // Max-margin is approximated by the hinge trainer at this lambda.
  double maxmargin_lambda = 1e-4;
  // Log10 lambda grid for the optimal rule (oracle-tuned on analytic error).
  double log10_lambda_min = -8.0;
  double log10_lambda_max = 1.0;
  double log10_lambda_step = 0.25;
};

// Mean analytic error over `seeds` datasets per n, with standard errors.
// Per-seed values are kept in `records`. Seed s uses base_seed + s.
struct EmpiricalCurve {
  LearningCurve curve;
  std::vector<CurvePoint> records;
};
EmpiricalCurve empirical_learning_curve(Method method, const Spectrum& spectrum, const std::vector<double>& n_grid,
                                        std::size_t seeds, const LambdaRule& rule, double sigma = 0.0,
                                        const SimulationOptions& options = {});

// Fraction of training points that are support vectors: dual coefficient
// above 1e-8 C, or margin within 1e-6 of 1 (degenerate duals can leave a
// margin point at zero). Throws DomainError for classifiers without dual
// coefficients.
double support_vector_fraction(const LinearClassifier& classifier);

// Ridge learning curve at tiny lambda on a small-p model, meant to straddle
// n = p and expose the interpolation peak.
EmpiricalCurve double_descent_probe(const Spectrum& spectrum, const std::vector<double>& n_grid, double lambda,
                                    std::size_t seeds, const SimulationOptions& options = {});

// CSV rows (aggregate first, then per-seed records) in the shared schema
// n,value,method,alpha,r,ell,sigma,seed,stderr.
std::string to_csv(const EmpiricalCurve& curve);

}  // namespace ksl
