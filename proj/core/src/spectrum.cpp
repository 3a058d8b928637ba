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

#include "ksl/spectrum.hpp"

#include <cmath>
#include <string>

#include "ksl/errors.hpp"

namespace ksl {

void PowerLawModel::validate() const {
  if (!(alpha > 1.0)) throw DomainError("capacity alpha must be > 1, got " + std::to_string(alpha));
  if (!(r >= 0.0)) throw DomainError("source r must be >= 0, got " + std::to_string(r));
  if (p_cut < 1) throw DomainError("p_cut must be >= 1");
}

void ExplicitSpectrum::validate() const {
  if (eigenvalues.empty()) throw DomainError("explicit spectrum is empty");
  if (eigenvalues.size() != teacher.size()) {
    throw DomainError("eigenvalue and teacher lengths differ");
  }
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (!(eigenvalues[k] > 0.0) || !std::isfinite(eigenvalues[k])) {
      throw DomainError("eigenvalue " + std::to_string(k + 1) + " is not strictly positive");
    }
    if (k > 0 && eigenvalues[k] > eigenvalues[k - 1]) {
      throw DomainError("eigenvalues must be nonincreasing");
    }
    if (!std::isfinite(teacher[k])) throw DomainError("non-finite teacher component");
  }
}

namespace {

void check_index(std::size_t k, const PowerLawModel& model) {
  if (k < 1 || k > model.p_cut) {
    throw DomainError("index " + std::to_string(k) + " outside [1, " +
                      std::to_string(model.p_cut) + "]");
  }
}

double int_pow(double x, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

}  // namespace

double eigenvalue(std::size_t k, const PowerLawModel& model) {
  check_index(k, model);
  return std::pow(static_cast<double>(k), -model.alpha);
}

double teacher_component(std::size_t k, const PowerLawModel& model) {
  check_index(k, model);
  return std::pow(static_cast<double>(k), -(1.0 + model.alpha * (2.0 * model.r - 1.0)) / 2.0);
}

Spectrum::Spectrum(const PowerLawModel& model) {
  model.validate();
  omega_.resize(model.p_cut);
  theta_.resize(model.p_cut);
  const double teacher_exp = -(1.0 + model.alpha * (2.0 * model.r - 1.0)) / 2.0;
  for (std::size_t k = 1; k <= model.p_cut; ++k) {
    const double kd = static_cast<double>(k);
    omega_[k - 1] = std::pow(kd, -model.alpha);
    theta_[k - 1] = std::pow(kd, teacher_exp);
  }
  finish();
}

Spectrum::Spectrum(const ExplicitSpectrum& measured) {
  measured.validate();
  omega_ = measured.eigenvalues;
  theta_ = measured.teacher;
  finish();
}

void Spectrum::finish() {
  teacher_power_.resize(omega_.size());
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    teacher_power_[k] = theta_[k] * theta_[k] * omega_[k];
  }
}

double Spectrum::resolvent_sum(double t, double a, int c, bool teacher_weighted) const {
  if (!(t >= 0.0)) throw DomainError("resolvent_sum: t must be >= 0");
  if (!(a >= 0.0)) throw DomainError("resolvent_sum: a must be >= 0");
  if (c < 0 || c > 2) throw DomainError("resolvent_sum: c must be in {0, 1, 2}");
  const bool integral_power = a == std::floor(a) && a <= 8.0;
  const int ia = static_cast<int>(a);
  double sum = 0.0;
  for (std::size_t i = omega_.size(); i-- > 0;) {
    const double w = omega_[i];
    double term = integral_power ? int_pow(w, ia) : std::pow(w, a);
    if (teacher_weighted) term *= theta_[i] * theta_[i];
    const double denom = 1.0 + t * w;
    if (c == 1) {
      term /= denom;
    } else if (c == 2) {
      term /= denom * denom;
    }
    sum += term;
  }
  return sum;
}

double rho(const Spectrum& spectrum) {
  double sum = 0.0;
  const auto tp = spectrum.teacher_power();
  for (std::size_t i = tp.size(); i-- > 0;) sum += tp[i];
  return sum;
}

double trace_sigma(const Spectrum& spectrum) {
  double sum = 0.0;
  const auto w = spectrum.eigenvalues();
  for (std::size_t i = w.size(); i-- > 0;) sum += w[i];
  return sum;
}

double resolvent_sum(const Spectrum& spectrum, double t, double a, int c, bool teacher_weighted) {
  return spectrum.resolvent_sum(t, a, c, teacher_weighted);
}

}  // namespace ksl
