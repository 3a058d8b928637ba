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

#include "ksl/gaussian_integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ksl/errors.hpp"

namespace ksl {

namespace {

constexpr double kTailCut = 12.0;

double weight_power(double w, int moment) {
  switch (moment) {
    case 0:
      return 1.0;
    case 1:
      return w;
    default:
      return w * w;
  }
}

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// `scale` is the shortest length on which the integrand varies.
void integrate_piece(auto&& f, double a, double b, double scale, const QuadratureOptions& options,
                     Accumulator& acc) {
  if (!(b > a)) return;
  if (b - a < 1e-3 * scale) {
    // Sliver: Simpson is exact to roundoff here, while adaptive abscissae
    // would collapse onto a handful of doubles.
    const double value = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    acc.value += value;
    acc.l1 += std::abs(value);
    return;
  }
  double error = 0.0;
  double l1 = 0.0;
  // Map to [-1, 1] first: the library's recursive error estimate is not
  // rescaled by the half-width, which overstates it on narrow pieces.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double u) { return half * f(mid + half * u); };
  acc.value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, options.max_depth,
                                                                              options.rel_tol, &error, &l1);
  acc.error += error;
  acc.l1 += l1;
}

// The L1 norm is the natural scale: moment 1 may change sign.
double finish(const Accumulator& acc, const QuadratureOptions& options, double lo, double hi) {
  if (acc.error > options.rel_tol * acc.l1 && acc.error > 1e-300) {
    throw ConvergenceError("gaussian_indicator_integral: tolerance not met on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]",
                           {acc.error, acc.l1});
  }
  return acc.value;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_indicator_integral(double q, double eta, double lower, double upper, int moment,
                                   const QuadratureOptions& options) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("gaussian_indicator_integral: q must be > 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("gaussian_indicator_integral: eta outside [0, 1]");
  if (moment < 0 || moment > 2) throw DomainError("gaussian_indicator_integral: moment must be 0, 1 or 2");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw DomainError("gaussian_indicator_integral: bounds must be ordered");
  }
  double lo = std::max(lower, -kTailCut);
  double hi = std::min(upper, kTailCut);
  if (!(hi > lo)) return 0.0;

  const double sq = std::sqrt(q);
  const bool degenerate = eta >= options.eta_clamp;
  if (degenerate) {
    // 2 * 1{x > 0}: the erf argument slope is infinite.
    lo = std::max(lo, 0.0);
    if (!(hi > lo)) return 0.0;
    auto f = [&](double x) { return 2.0 * normal_pdf(x) * weight_power(1.0 - sq * x, moment); };
    Accumulator acc;
    integrate_piece(f, lo, hi, 1.0, options, acc);
    return finish(acc, options, lo, hi);
  }

  const double slope = std::sqrt(eta / (2.0 * (1.0 - eta)));
  auto f = [&](double x) {
    // 1 + erf(s x) written as erfc(-s x) keeps precision on the left tail.
    return normal_pdf(x) * std::erfc(-slope * x) * weight_power(1.0 - sq * x, moment);
  };

  // Break the interval where the bracket switches, so the adaptive rule
  // sees the transition layer of width ~1/slope.
  std::vector<double> cuts{lo, hi, 0.0};
  if (slope > 1.0) {
    for (const double k : {1.0, 4.0}) {
      cuts.push_back(k / slope);
      cuts.push_back(-k / slope);
    }
  }
  if (sq > 1.0 / kTailCut) cuts.push_back(1.0 / sq);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Accumulator acc;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], lo);
    const double b = std::min(cuts[i + 1], hi);
    integrate_piece(f, a, b, std::min(1.0, 1.0 / slope), options, acc);
  }
  return finish(acc, options, lo, hi);
}

double hinge_prox(double omega, int y, double V) {
  if (!(V > 0.0)) throw DomainError("hinge_prox: V must be > 0");
  if (y != 1 && y != -1) throw DomainError("hinge_prox: y must be +1 or -1");
  const double margin = y * omega;
  if (margin <= 1.0 - V) return omega + y * V;
  if (margin <= 1.0) return static_cast<double>(y);
  return omega;
}

}  // namespace ksl
