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

#include "ksl/powerlaw_fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"

#include "ksl/errors.hpp"

namespace ksl {

PowerLawFit fit_powerlaw(std::span<const double> xs, std::span<const double> ys, std::size_t k_min,
                         std::size_t k_max) {
  if (xs.size() != ys.size()) throw DomainError("fit_powerlaw: xs and ys differ in length");
  if (k_max > xs.size() || k_min >= k_max || k_max - k_min < 3) {
    throw DomainError("fit_powerlaw: need at least 3 points in range");
  }
  const std::size_t count = k_max - k_min;
  std::vector<double> lx(count), ly(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = xs[k_min + i];
    const double y = ys[k_min + i];
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw DomainError("fit_powerlaw: nonpositive or non-finite value at position " + std::to_string(k_min + i));
    }
    lx[i] = std::log(x);
    ly[i] = std::log(y);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DomainError("fit_powerlaw: xs are all equal in range");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.k_min = k_min;
  fit.k_max = k_max;
  if (syy > 0.0) {
    double sse = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
      sse += e * e;
    }
    fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

std::string PowerLawFit::to_json() const {
  return nlohmann::json{{"slope", slope},
                        {"intercept", intercept},
                        {"k_min", k_min},
                        {"k_max", k_max},
                        {"r_squared", r_squared}}
      .dump();
}

}  // namespace ksl
