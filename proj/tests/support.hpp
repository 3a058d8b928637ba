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

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/special_functions/owens_t.hpp>

namespace ksl::testing {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Least-squares slope of log y on log x, written independently of the
// library's fitter.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double lx = std::log(static_cast<long double>(x[i]));
    const long double ly = std::log(static_cast<long double>(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

// Closed forms of int_{-inf}^h Dx 2 Phi(c x) x^j for j = 0, 1, 2, built on
// int_{-inf}^h phi(x) Phi(c x) dx = Phi(h) / 2 - T(h, c) with Owen's T.
struct SkewMoments {
  double c;

  double base(double h) const {
    if (std::isinf(h)) return h > 0 ? 0.5 : 0.0;
    return 0.5 * Phi(h) - boost::math::owens_t(h, c);
  }
  double m0(double h) const { return 2.0 * base(h); }
  double m1(double h) const {
    const double s = std::sqrt(1.0 + c * c);
    const double edge = std::isinf(h) ? 0.0 : -phi(h) * Phi(c * h);
    return 2.0 * (edge + c / (s * std::sqrt(2.0 * M_PI)) * Phi(h * s));
  }
  double m2(double h) const {
    const double s = std::sqrt(1.0 + c * c);
    const double edge = std::isinf(h) ? 0.0 : -h * phi(h) * Phi(c * h);
    const double j = std::isinf(h) ? 0.0 : -phi(s * h) / (s * s * std::sqrt(2.0 * M_PI));
    return 2.0 * (edge + base(h) + c * j);
  }
  // int_lo^hi Dx [1 + erf(c x / sqrt 2)] (1 - sqrt(q) x)^moment.
  double integral(double q, double lo, double hi, int moment) const {
    const double a0 = m0(hi) - m0(lo);
    if (moment == 0) return a0;
    const double a1 = m1(hi) - m1(lo);
    const double sq = std::sqrt(q);
    if (moment == 1) return a0 - sq * a1;
    const double a2 = m2(hi) - m2(lo);
    return a0 - 2.0 * sq * a1 + q * a2;
  }
};

}  // namespace ksl::testing
