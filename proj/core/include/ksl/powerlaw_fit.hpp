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
#include <string>

namespace ksl {

// Ordinary least squares of log y on log x.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Half-open, 0-based position range [k_min, k_max) that was fitted.
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  double r_squared = 0.0;

  std::string to_json() const;
};

// Fits positions [k_min, k_max) of (xs, ys). Throws DomainError for fewer than
// three points, mismatched lengths or nonpositive values in range.
PowerLawFit fit_powerlaw(std::span<const double> xs, std::span<const double> ys, std::size_t k_min,
                         std::size_t k_max);

}  // namespace ksl
