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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "ksl/errors.hpp"
#include "ksl/powerlaw_fit.hpp"

namespace ksl {
namespace {

TEST(PowerLawFit, ExactPowerLaw) {
  std::vector<double> x, y;
  for (int i = 1; i <= 50; ++i) {
    x.push_back(i);
    y.push_back(3.0 * std::pow(i, -0.7));
  }
  const PowerLawFit f = fit_powerlaw(x, y, 0, x.size());
  EXPECT_NEAR(f.slope, -0.7, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.k_min, 0u);
  EXPECT_EQ(f.k_max, 50u);
}

TEST(PowerLawFit, ExactRecoveryOverManyExponents) {
  for (const double a : {-3.0, -1.0, -0.123, 0.5, 2.25}) {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
      x.push_back(std::pow(2.0, i * 0.5 + 3));
      y.push_back(0.01 * std::pow(x.back(), a));
    }
    EXPECT_NEAR(fit_powerlaw(x, y, 3, 27).slope, a, 1e-12);
  }
}

TEST(PowerLawFit, ConstantHasZeroSlope) {
  const std::vector<double> x = {1, 2, 4, 8}, y = {5, 5, 5, 5};
  const PowerLawFit f = fit_powerlaw(x, y, 0, 4);
  EXPECT_NEAR(f.slope, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
}

TEST(PowerLawFit, NoisyPowerLaw) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x, y;
  for (int i = 1; i <= 200; ++i) {
    x.push_back(i);
    y.push_back((1.0 / i) * (1.0 + 0.01 * u(gen)));
  }
  EXPECT_NEAR(fit_powerlaw(x, y, 0, x.size()).slope, -1.0, 0.02);
}

TEST(PowerLawFit, SubrangeOnly) {
  std::vector<double> x = {1, 2, 3, 4, 5, 6}, y = {100, -1, 1.0 / 3, 0.25, 0.2, 0};
  const PowerLawFit f = fit_powerlaw(x, y, 2, 5);
  EXPECT_NEAR(f.slope, -1.0, 1e-12);
  const auto j = nlohmann::json::parse(f.to_json());
  EXPECT_EQ(j["k_min"], 2);
  EXPECT_EQ(j["k_max"], 5);
}

TEST(PowerLawFit, Rejections) {
  const std::vector<double> x = {1, 2, 3}, y = {1, 2, 3};
  EXPECT_THROW(fit_powerlaw(x, y, 0, 2), DomainError);
  EXPECT_THROW(fit_powerlaw(x, std::vector<double>{1, 2}, 0, 2), DomainError);
  EXPECT_THROW(fit_powerlaw(x, std::vector<double>{1, 0, 3}, 0, 3), DomainError);
  EXPECT_THROW(fit_powerlaw(x, y, 0, 4), DomainError);
}

}  // namespace
}  // namespace ksl
