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
#include <span>
#include <vector>

namespace ksl {

// Synthetic source/capacity model: omega_k = k^-alpha and
// theta*_k = k^-(1 + alpha (2r - 1)) / 2, truncated at k = p_cut.
struct PowerLawModel {
  double alpha = 2.0;
  double r = 0.5;
  std::size_t p_cut = 10000;

  // Throws DomainError unless alpha > 1, r >= 0, p_cut >= 1.
  void validate() const;
};

// Measured spectrum: descending positive eigenvalues with matching teacher
// components.
struct ExplicitSpectrum {
  std::vector<double> eigenvalues;
  std::vector<double> teacher;

  void validate() const;
};

// k is 1-based. Throws DomainError if k is outside [1, p_cut].
double eigenvalue(std::size_t k, const PowerLawModel& model);
double teacher_component(std::size_t k, const PowerLawModel& model);

// Materialized spectrum consumed by every solver. Implicitly constructible
// from either model type so power-law and measured spectra share one API.
class Spectrum {
 public:
  Spectrum(const PowerLawModel& model);     // NOLINT(google-explicit-constructor)
  Spectrum(const ExplicitSpectrum& measured);  // NOLINT(google-explicit-constructor)

  std::size_t size() const noexcept { return omega_.size(); }
  std::span<const double> eigenvalues() const noexcept { return omega_; }
  std::span<const double> teacher() const noexcept { return theta_; }
  // theta*_k^2 omega_k, cached because almost every sum needs it.
  std::span<const double> teacher_power() const noexcept { return teacher_power_; }

  // Generic truncated evaluator of
  //   sum_k omega_k^a [theta*_k^2] / (1 + t omega_k)^c
  // accumulated from the tail (k = p) towards k = 1.
  double resolvent_sum(double t, double a, int c, bool teacher_weighted) const;

 private:
  void finish();

  std::vector<double> omega_;
  std::vector<double> theta_;
  std::vector<double> teacher_power_;
};

// rho = sum_k theta*_k^2 omega_k.
double rho(const Spectrum& spectrum);
// tr Sigma = sum_k omega_k.
double trace_sigma(const Spectrum& spectrum);
double resolvent_sum(const Spectrum& spectrum, double t, double a, int c, bool teacher_weighted);

}  // namespace ksl
