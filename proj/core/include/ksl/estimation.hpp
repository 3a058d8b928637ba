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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ksl/powerlaw_fit.hpp"
#include "ksl/rates.hpp"

namespace ksl {

enum class MatrixFormat { Csv, Kmx };

// Infers the format from the extension: ".kmx" is binary, anything else CSV.
MatrixFormat format_from_path(const std::string& path);

// CSV: headerless comma-separated decimals, one row per line.
// KMX: "KMX1", rows and cols as little-endian u64, then little-endian f64
// entries in row-major order.
// Throws IoError for unreadable files, malformed headers, dimension
// mismatches or non-finite entries.
Eigen::MatrixXd load_matrix(const std::string& path, MatrixFormat format);
void write_matrix(const std::string& path, const Eigen::MatrixXd& matrix, MatrixFormat format);

// Label vector: one +-1 value per line, or a single CSV row or column.
Eigen::VectorXd load_labels(const std::string& path);

struct KernelSpec {
  enum class Kind { Rbf, Polynomial, Linear };
  Kind kind = Kind::Rbf;
  double gamma = 1.0;
  int degree = 5;
  double offset = 1.0;
  // Rescale inputs to unit mean squared norm before evaluating the kernel.
  bool normalize = false;

  void validate() const;
};

KernelSpec::Kind parse_kernel_kind(const std::string& text);

// rbf exp(-gamma |x - x'|^2); polynomial (offset + x.x')^degree; linear x.x'.
// Rows of X are samples. Throws DomainError for m < 2 or non-finite values.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelSpec& kernel);

struct GramSpectrum {
  // Descending, clipped at 0.
  Eigen::VectorXd eigenvalues;
  // Psi = sqrt(m) U Lambda^{1/2}, so Psi Psi^T = G and (1/m) Psi^T Psi = diag(omega).
  Eigen::MatrixXd embedding;
  // Empty until fit_teacher fills it.
  Eigen::VectorXd teacher;
  std::size_t clipped_modes = 0;
};

// Eigendecomposition of (1/m) G. Throws DomainError for non-square or
// asymmetric input, ConvergenceError if the eigensolver fails.
GramSpectrum spectral_embedding(const Eigen::MatrixXd& G);

struct TeacherOptions {
  double lambda = 1e-6;
  double tol = 1e-8;
  std::size_t max_sweeps = 200000;
};

// Hinge classifier on (Psi, y), returned in embedding coordinates. Throws
// DomainError naming the violation count if sign(Psi theta) != y somewhere.
Eigen::VectorXd fit_teacher(const GramSpectrum& spectrum, const Eigen::VectorXd& labels,
                            const TeacherOptions& options = {});

// C1(k) = sum_{k' >= k} omega_k'   and   C2(k) = sum_{k' >= k} omega_k' theta_k'^2,
// accumulated from the tail. Entry 0 is k = 1.
struct CumulativeCurves {
  std::vector<double> c1;
  std::vector<double> c2;
};
CumulativeCurves cumulative_curves(const GramSpectrum& spectrum);
CumulativeCurves cumulative_curves(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& teacher);

// Default fit window dropping the first 5% and last 30% of positions, as a
// half-open range; an explicit override is returned unchanged. Throws
// DomainError for sequences shorter than 30.
std::pair<std::size_t, std::size_t> auto_range(std::size_t length,
                                               std::optional<std::pair<std::size_t, std::size_t>> override = {});

struct CoefficientEstimate {
  double alpha_hat = 0.0;
  double r_hat = 0.0;
  PowerLawFit fit_c1;
  PowerLawFit fit_c2;
  // Absent when alpha_hat <= 1, where the rates are undefined.
  std::optional<RateReport> predicted;
  bool outside_domain = false;

  std::string to_json() const;
};

// alpha = 1 - slope(C1), r = -slope(C2) / (2 alpha), with each curve fitted
// against k = position + 1 over its range.
CoefficientEstimate estimate_coefficients(const CumulativeCurves& curves, std::pair<std::size_t, std::size_t> range1,
                                          std::pair<std::size_t, std::size_t> range2);
CoefficientEstimate estimate_coefficients(const GramSpectrum& spectrum, std::pair<std::size_t, std::size_t> range1,
                                          std::pair<std::size_t, std::size_t> range2);

// CSV "k,C1,C2" for plotting.
std::string cumulative_csv(const CumulativeCurves& curves);

}  // namespace ksl
