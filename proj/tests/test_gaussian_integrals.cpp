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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ksl/errors.hpp"
#include "ksl/gaussian_integrals.hpp"
#include "support.hpp"

namespace ksl {
namespace {

using testing::Phi;
using testing::phi;
using testing::SkewMoments;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(GaussianIntegral, CdfExample) {
  EXPECT_NEAR(gaussian_indicator_integral(1.0, 0.0, -kInf, 1.0, 0), Phi(1.0), 1e-10);
  EXPECT_NEAR(gaussian_indicator_integral(1.0, 0.0, -kInf, 1.0, 0), 0.841345, 1e-6);
}

TEST(GaussianIntegral, IndicatorLimitExample) {
  const double expected = 2.0 * (Phi(1.0) - 0.5);
  EXPECT_NEAR(gaussian_indicator_integral(1.0, 1.0, -kInf, 1.0, 0), expected, 1e-10);
  EXPECT_NEAR(expected, 0.682689, 1e-6);
  // Approaching the limit from below is continuous.
  EXPECT_NEAR(gaussian_indicator_integral(1.0, 1.0 - 1e-9, -kInf, 1.0, 0), expected, 1e-4);
}

TEST(GaussianIntegral, SecondMomentExample) {
  // int_{-inf}^1 (1 - x)^2 Dx = Phi(1) - 2 (-phi(1)) + (Phi(1) - phi(1)).
  const double expected = 2.0 * Phi(1.0) + phi(1.0);
  EXPECT_NEAR(gaussian_indicator_integral(1.0, 0.0, -kInf, 1.0, 2), expected, 1e-10);
  EXPECT_NEAR(expected, 1.9246602, 1e-7);
}

TEST(GaussianIntegral, ClosedFormOracleAtZeroEta) {
  std::mt19937_64 gen(20261014);
  std::uniform_real_distribution<double> uq(0.05, 20.0), ub(-6.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double q = uq(gen);
    double lo = ub(gen), hi = ub(gen);
    if (lo > hi) std::swap(lo, hi);
    if (trial % 10 == 0) lo = -kInf;
    if (trial % 10 == 5) hi = kInf;
    const SkewMoments oracle{0.0};
    for (const int moment : {0, 1, 2}) {
      const double got = gaussian_indicator_integral(q, 0.0, lo, hi, moment);
      const double want = oracle.integral(q, lo, hi, moment);
      EXPECT_NEAR(got, want, 1e-10 * std::max(1.0, std::abs(want)))
          << "q=" << q << " [" << lo << ", " << hi << "] moment " << moment;
    }
  }
}

TEST(GaussianIntegral, OwensTOracleAtPositiveEta) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uq(0.05, 20.0), ub(-5.0, 5.0), ue(0.0, 0.999999);
  for (int trial = 0; trial < 100; ++trial) {
    const double q = uq(gen), eta = ue(gen);
    double lo = ub(gen), hi = ub(gen);
    if (lo > hi) std::swap(lo, hi);
    if (trial % 4 == 0) lo = -kInf;
    const SkewMoments oracle{std::sqrt(eta / (1.0 - eta))};
    for (const int moment : {0, 1, 2}) {
      const double got = gaussian_indicator_integral(q, eta, lo, hi, moment);
      const double want = oracle.integral(q, lo, hi, moment);
      EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::abs(want)))
          << "q=" << q << " eta=" << eta << " [" << lo << ", " << hi << "] moment " << moment;
    }
  }
}

TEST(GaussianIntegral, WholeLineMassIsOne) {
  for (const double eta : {0.0, 0.3, 0.9, 0.999999, 1.0}) {
    EXPECT_NEAR(gaussian_indicator_integral(2.0, eta, -kInf, kInf, 0), 1.0, 1e-10) << eta;
  }
}

TEST(GaussianIntegral, RejectsInvalidArguments) {
  EXPECT_THROW(gaussian_indicator_integral(0.0, 0.5, -1, 1, 0), DomainError);
  EXPECT_THROW(gaussian_indicator_integral(1.0, -0.1, -1, 1, 0), DomainError);
  EXPECT_THROW(gaussian_indicator_integral(1.0, 1.1, -1, 1, 0), DomainError);
  EXPECT_THROW(gaussian_indicator_integral(1.0, 0.5, 1, -1, 0), DomainError);
  EXPECT_THROW(gaussian_indicator_integral(1.0, 0.5, -1, 1, 3), DomainError);
}

TEST(HingeProx, BranchExamples) {
  EXPECT_DOUBLE_EQ(hinge_prox(2.0, 1, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(hinge_prox(0.9, 1, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(hinge_prox(-1.0, 1, 0.5), -0.5);
  EXPECT_DOUBLE_EQ(hinge_prox(-2.0, -1, 0.5), -2.0);
  EXPECT_DOUBLE_EQ(hinge_prox(1.0, -1, 0.5), 0.5);
  EXPECT_THROW(hinge_prox(0.0, 0, 0.5), DomainError);
  EXPECT_THROW(hinge_prox(0.0, 1, 0.0), DomainError);
}

TEST(HingeProx, MinimizesProximalObjective) {
  // argmin_x (x - omega)^2 / (2 V) + max(0, 1 - y x), checked by dense scan.
  for (const double V : {0.1, 0.5, 2.0}) {
    for (const int y : {-1, 1}) {
      for (double omega = -3.0; omega <= 3.0; omega += 0.37) {
        auto obj = [&](double x) { return (x - omega) * (x - omega) / (2 * V) + std::max(0.0, 1.0 - y * x); };
        double best = 0, best_val = INFINITY;
        for (double x = -6.0; x <= 6.0; x += 1e-4) {
          if (obj(x) < best_val) {
            best_val = obj(x);
            best = x;
          }
        }
        EXPECT_NEAR(hinge_prox(omega, y, V), best, 2e-4);
      }
    }
  }
}

}  // namespace
}  // namespace ksl
