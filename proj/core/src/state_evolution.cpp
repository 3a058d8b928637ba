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

#include "ksl/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>
#include "json.hpp"

#include "ksl/errors.hpp"
#include "ksl/gaussian_integrals.hpp"

namespace ksl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kFloor = 1.0 / 64.0;
constexpr int kAlternationLimit = 10;

// Every kappa-resolvent needed by the solvers, with kappa = z / n, in one
// tail-first pass. kappa = 0 is allowed (the ridgeless limit).
struct KappaSums {
  double m = 0.0;   // sum omega^2 theta^2 / (kappa + omega)
  double q1 = 0.0;  // sum theta^2 omega^3 / (kappa + omega)^2
  double q2 = 0.0;  // sum omega^2 / (kappa + omega)^2
  double v = 0.0;   // sum omega / (kappa + omega)
  double w1 = 0.0;  // sum theta^2 omega^2 / (kappa + omega)^2
  double w2 = 0.0;  // sum omega / (kappa + omega)^2
};

KappaSums kappa_sums(const Spectrum& s, double kappa) {
  const auto omega = s.eigenvalues();
  const auto power = s.teacher_power();
  KappaSums out;
  for (std::size_t i = omega.size(); i-- > 0;) {
    const double w = omega[i];
    const double inv = 1.0 / (kappa + w);
    const double inv2 = inv * inv;
    out.m += power[i] * w * inv;
    out.q1 += power[i] * w * w * inv2;
    out.q2 += w * w * inv2;
    out.v += w * inv;
    out.w1 += power[i] * w * inv2;
    out.w2 += w * inv2;
  }
  return out;
}

double occupancy(const Spectrum& s, double kappa) {
  const auto omega = s.eigenvalues();
  double acc = 0.0;
  for (std::size_t i = omega.size(); i-- > 0;) acc += omega[i] / (kappa + omega[i]);
  return acc;
}

// Solves (1/n) sum omega / (kappa + omega) = target for kappa > 0. Returns 0
// when the target is not below p / n.
double solve_kappa(const Spectrum& s, double n, double target) {
  if (!(target > 0.0)) throw DomainError("solve_kappa: target occupancy must be > 0");
  if (target * n >= static_cast<double>(s.size())) return 0.0;
  auto g = [&](double u) { return occupancy(s, std::exp(u)) / n - target; };
  double hi = std::log(trace_sigma(s) / (n * target));
  double lo = hi - std::log(10.0);
  while (g(lo) <= 0.0) {
    lo -= std::log(10.0);
    if (lo < -700.0) return 0.0;
  }
  std::uintmax_t iters = 200;
  const auto [a, b] =
      boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::exp(0.5 * (a + b));
}

double rel_diff(double proposal, double current) {
  const double scale = std::max(std::abs(proposal), std::abs(current));
  if (scale == 0.0) return 0.0;
  return std::abs(proposal - current) / scale;
}

double eta_of(double m, double q, double rho) { return std::clamp(m * m / (rho * q), 0.0, 1.0); }

QuadratureOptions quad_options(const SolverConfig& c) {
  QuadratureOptions o;
  o.rel_tol = c.quad_tol;
  o.eta_clamp = c.eta_clamp;
  return o;
}

// Sign-alternation watchdog for the damped update.
class DampingControl {
 public:
  explicit DampingControl(double damping) : damping_(damping) {}

  double value() const { return damping_; }

  void observe(double signed_residual, std::size_t iteration, SolverDiagnostics& diag) {
    const int sign = signed_residual > 0.0 ? 1 : (signed_residual < 0.0 ? -1 : 0);
    if (sign != 0 && last_sign_ != 0 && sign != last_sign_) {
      ++alternations_;
    } else {
      alternations_ = 0;
    }
    last_sign_ = sign;
    if (alternations_ >= kAlternationLimit && damping_ > kFloor) {
      damping_ = std::max(kFloor, 0.5 * damping_);
      diag.damping_trace.push_back({iteration, damping_});
      alternations_ = 0;
    }
  }

 private:
  double damping_;
  int last_sign_ = 0;
  int alternations_ = 0;
};

void check_inputs(const Spectrum& s, double n, const SolverConfig& config) {
  config.validate();
  if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("solver: n must be finite and >= 1");
  (void)s;
}

// ---- max-margin ----

struct MaxMarginProposal {
  double m, q, V, rhat1, rhat2, kappa, eta_raw;
};

MaxMarginProposal maxmargin_step(const Spectrum& s, double n, double rho, double m, double q,
                                 const SolverConfig& config) {
  const double eta_raw = m * m / (rho * q);
  const double eta = std::clamp(eta_raw, 0.0, config.eta_clamp);
  const auto opts = quad_options(config);
  const double edge = 1.0 / std::sqrt(q);
  const double i0 = gaussian_indicator_integral(q, eta, -kInf, edge, 0, opts);
  const double i2 = gaussian_indicator_integral(q, eta, -kInf, edge, 2, opts);
  const double s2 = q * (1.0 - eta);
  double norm = 2.0 * kSqrt2Pi;
  if (s2 > 0.0) {
    norm = kSqrt2Pi * std::erfc(-1.0 / std::sqrt(2.0 * s2)) + 2.0 * std::sqrt(s2) * std::exp(-0.5 / s2);
  }
  MaxMarginProposal p{};
  p.eta_raw = eta_raw;
  p.rhat1 = norm / (2.0 * std::numbers::pi * std::sqrt(rho) * i0);
  p.rhat2 = i2 / (i0 * i0);
  p.kappa = solve_kappa(s, n, i0);
  const KappaSums k = kappa_sums(s, p.kappa);
  p.m = p.rhat1 * k.m;
  p.q = p.rhat1 * p.rhat1 * k.q1 + p.rhat2 * k.q2 / n;
  p.V = p.kappa * k.v;
  return p;
}

// ---- regularized hinge ----

struct HingeProposal {
  double m, q, V, rhat1, rhat2, kappa, eta_raw;
};

struct HingeIntegrals {
  double low0, low1, mid0, mid2;
};

HingeIntegrals hinge_integrals(double q, double eta, double V, const SolverConfig& config) {
  const auto opts = quad_options(config);
  const double sq = std::sqrt(q);
  const double a = (1.0 - V) / sq;
  const double b = 1.0 / sq;
  HingeIntegrals h{};
  h.low0 = gaussian_indicator_integral(q, eta, -kInf, a, 0, opts);
  h.low1 = gaussian_indicator_integral(q, eta, -kInf, a, 1, opts);
  h.mid0 = gaussian_indicator_integral(q, eta, a, b, 0, opts);
  h.mid2 = gaussian_indicator_integral(q, eta, a, b, 2, opts);
  return h;
}

HingeProposal hinge_step(const Spectrum& s, double n, double lambda, double rho, double m, double q, double V,
                         const SolverConfig& config) {
  const double eta_raw = m * m / (rho * q);
  const double eta = std::clamp(eta_raw, 0.0, config.eta_clamp);
  const HingeIntegrals h = hinge_integrals(q, eta, V, config);
  if (!(h.mid0 > 0.0)) {
    throw ConvergenceError("solve_hinge_regularized: empty margin region", {q, V});
  }
  const double sd = std::sqrt(q * (1.0 - eta));
  double num;
  if (sd > 0.0) {
    const double A = (1.0 - V) / (std::numbers::sqrt2 * sd);
    const double B = 1.0 / (std::numbers::sqrt2 * sd);
    num = kSqrt2Pi * V * std::erfc(-A) + kSqrt2Pi * (std::erfc(A) - std::erfc(B)) +
          2.0 * sd * (std::exp(-B * B) - std::exp(-A * A));
  } else {
    num = kSqrt2Pi * (V * 2.0 * (V < 1.0 ? 1.0 : 0.0) + (V >= 1.0 ? 2.0 : 0.0));
  }
  HingeProposal p{};
  p.eta_raw = eta_raw;
  p.rhat1 = num / (2.0 * std::numbers::pi * std::sqrt(rho) * h.mid0);
  p.rhat2 = (V * V * h.low0 + h.mid2) / (h.mid0 * h.mid0);
  // Effective regularization from the regularized susceptibility
  // Vhat = n mid0 / V and the penalty 2 n lambda of the (1/n)-normalized risk.
  p.kappa = 2.0 * lambda * V / h.mid0;
  const KappaSums k = kappa_sums(s, p.kappa);
  p.m = p.rhat1 * k.m;
  p.q = p.rhat1 * p.rhat1 * k.q1 + p.rhat2 * k.q2 / n;
  p.V = p.kappa * k.v / (2.0 * n * lambda);
  return p;
}

// ---- ridge ----

double ridge_c(double rho, double sigma) {
  return std::sqrt(2.0 / (std::numbers::pi * (rho + sigma * sigma)));
}

double ridge_z_equation(const Spectrum& s, double n, double lambda, double z) {
  return n * lambda + z * occupancy(s, z / n) / n - z;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw DomainError("SolverConfig: tol must be > 0");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("SolverConfig: damping must be in (0, 1]");
  if (max_iter < 1) throw DomainError("SolverConfig: max_iter must be >= 1");
  if (!(eta_clamp > 0.0 && eta_clamp <= 1.0)) throw DomainError("SolverConfig: eta_clamp must be in (0, 1]");
  if (!(quad_tol > 0.0)) throw DomainError("SolverConfig: quad_tol must be > 0");
}

std::string SolverDiagnostics::to_json() const {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& d : damping_trace) trace.push_back({{"iteration", d.iteration}, {"damping", d.damping}});
  const nlohmann::json j = {{"iterations", iterations},
                            {"converged", converged},
                            {"eta_saturated", eta_saturated},
                            {"residuals", residuals},
                            {"damping_trace", trace}};
  return j.dump();
}

std::string OrderParameters::to_json() const {
  auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  const nlohmann::json j = {{"m", finite(m)},         {"q", finite(q)},       {"V", finite(V)},
                            {"rhat1", finite(rhat1)}, {"rhat2", finite(rhat2)}, {"z", finite(z)},
                            {"rho", finite(rho)},     {"eta", finite(eta)},
                            {"diagnostics", nlohmann::json::parse(diagnostics.to_json())}};
  return j.dump();
}

OrderParameters solve_maxmargin(const Spectrum& spectrum, double n, const SolverConfig& config) {
  check_inputs(spectrum, n, config);
  const double rh = rho(spectrum);
  double q = 1.0;
  double m = std::sqrt(0.5 * rh * q);
  OrderParameters out;
  out.rho = rh;
  DampingControl damping(config.damping);
  double last_kappa = -1.0;
  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const MaxMarginProposal p = maxmargin_step(spectrum, n, rh, m, q, config);
    const double rz = last_kappa < 0.0 ? 1.0 : rel_diff(p.kappa, last_kappa);
    last_kappa = p.kappa;
    out.diagnostics.residuals = {rel_diff(p.m, m), rel_diff(p.q, q), rz};
    out.diagnostics.iterations = it;
    if (std::max({out.diagnostics.residuals[0], out.diagnostics.residuals[1], rz}) < config.tol &&
        p.kappa > 0.0) {
      out.m = p.m;
      out.q = p.q;
      out.V = p.V;
      out.rhat1 = p.rhat1;
      out.rhat2 = p.rhat2;
      out.z = n * p.kappa;
      out.eta = eta_of(p.m, p.q, rh);
      out.diagnostics.converged = true;
      out.diagnostics.eta_saturated = p.eta_raw >= config.eta_clamp || out.eta >= config.eta_clamp;
      return out;
    }
    damping.observe(p.q - q, it, out.diagnostics);
    const double d = damping.value();
    m = d * p.m + (1.0 - d) * m;
    q = d * p.q + (1.0 - d) * q;
  }
  throw ConvergenceError("solve_maxmargin: no convergence after " + std::to_string(config.max_iter) +
                             " iterations",
                         out.diagnostics.residuals);
}

OrderParameters solve_hinge_regularized(const Spectrum& spectrum, double n, double lambda,
                                        const SolverConfig& config) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_hinge_regularized: lambda must be >= 0");
  if (lambda == 0.0) return solve_maxmargin(spectrum, n, config);
  check_inputs(spectrum, n, config);
  const double rh = rho(spectrum);
  double q = 1.0;
  double m = std::sqrt(0.5 * rh * q);
  const double z0 = std::max(n * lambda, 1.0);
  double V = (z0 / n) * occupancy(spectrum, z0 / n) / (2.0 * n * lambda);
  OrderParameters out;
  out.rho = rh;
  DampingControl damping(config.damping);
  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const HingeProposal p = hinge_step(spectrum, n, lambda, rh, m, q, V, config);
    out.diagnostics.residuals = {rel_diff(p.m, m), rel_diff(p.q, q), rel_diff(p.V, V)};
    out.diagnostics.iterations = it;
    const auto& r = out.diagnostics.residuals;
    if (std::max({r[0], r[1], r[2]}) < config.tol) {
      out.m = p.m;
      out.q = p.q;
      out.V = p.V;
      out.rhat1 = p.rhat1;
      out.rhat2 = p.rhat2;
      out.z = n * p.kappa;
      out.eta = eta_of(p.m, p.q, rh);
      out.diagnostics.converged = true;
      out.diagnostics.eta_saturated = p.eta_raw >= config.eta_clamp || out.eta >= config.eta_clamp;
      return out;
    }
    damping.observe(p.q - q, it, out.diagnostics);
    const double d = damping.value();
    m = d * p.m + (1.0 - d) * m;
    q = d * p.q + (1.0 - d) * q;
    V = d * p.V + (1.0 - d) * V;
  }
  throw ConvergenceError("solve_hinge_regularized: no convergence after " + std::to_string(config.max_iter) +
                             " iterations",
                         out.diagnostics.residuals);
}

double solve_z_ridge(const Spectrum& spectrum, double n, double lambda) {
  if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("solve_z_ridge: n must be finite and >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_z_ridge: lambda must be >= 0");
  const double tr = trace_sigma(spectrum);
  // h(z) = n lambda / z + (1/n) sum omega / (omega + z/n) - 1, decreasing.
  auto h = [&](double z) { return n * lambda / z + occupancy(spectrum, z / n) / n - 1.0; };
  double lo = n * lambda;
  const double hi0 = n * lambda + tr;
  if (lambda == 0.0) {
    if (static_cast<double>(spectrum.size()) <= n) return 0.0;
    lo = std::numeric_limits<double>::min();
  }
  double hi = hi0;
  if (h(lo) <= 0.0) return lo;
  if (h(hi) > 0.0) throw ConvergenceError("solve_z_ridge: bracket failure", {h(lo), h(hi)});
  while (true) {
    // Geometric midpoint while the bracket spans decades, then arithmetic.
    double mid = (hi > 4.0 * lo && lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(ridge_z_equation(spectrum, n, lambda, lo)) <= std::abs(ridge_z_equation(spectrum, n, lambda, hi))
             ? lo
             : hi;
}

OrderParameters solve_ridge(const Spectrum& spectrum, double n, double lambda, double sigma,
                            const SolverConfig& config) {
  check_inputs(spectrum, n, config);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("solve_ridge: sigma must be >= 0");
  const double z = solve_z_ridge(spectrum, n, lambda);
  const double kappa = z / n;
  const double rh = rho(spectrum);
  const double c = ridge_c(rh, sigma);
  const KappaSums k = kappa_sums(spectrum, kappa);
  const double m = c * k.m;
  const double t1 = c * c * k.q1;
  const double t2 = k.q2 / n;
  if (!(t2 < 1.0)) {
    throw DomainError("solve_ridge: self-consistency breakdown (T2 = " + std::to_string(t2) + " >= 1)");
  }
  OrderParameters out;
  out.m = m;
  out.q = (t1 + (1.0 - 2.0 * m * c) * t2) / (1.0 - t2);
  out.z = z;
  out.rho = rh;
  out.rhat1 = c;
  out.rhat2 = 1.0 + out.q - 2.0 * m * c;
  out.V = lambda > 0.0 ? kappa * k.v / (n * lambda) : kInf;
  out.eta = eta_of(out.m, out.q, rh);
  out.diagnostics.iterations = 1;
  out.diagnostics.converged = true;
  out.diagnostics.residuals = ridge_residuals(spectrum, n, lambda, sigma, out);
  return out;
}

double misclassification_error(const OrderParameters& params, double sigma) {
  const double eta = std::clamp(params.eta, 0.0, 1.0);
  const double shrink = params.rho / (params.rho + sigma * sigma);
  return std::acos(std::clamp(std::sqrt(shrink * eta), 0.0, 1.0)) / std::numbers::pi;
}

double residual_error(double rho, double sigma) {
  if (!(rho > 0.0)) throw DomainError("residual_error: rho must be > 0");
  if (!(sigma >= 0.0)) throw DomainError("residual_error: sigma must be >= 0");
  return std::acos(std::sqrt(rho / (rho + sigma * sigma))) / std::numbers::pi;
}

double approximation_error(const Spectrum& spectrum, double lambda, double ratio, const SolverConfig& config) {
  if (!(lambda > 0.0)) throw DomainError("approximation_error: lambda must be > 0");
  if (!(ratio >= 1.0)) throw DomainError("approximation_error: ratio must be >= 1");
  const double n = ratio * static_cast<double>(spectrum.size());
  const OrderParameters p = solve_hinge_regularized(spectrum, n, lambda, config);
  const double eta = std::min(p.eta, config.eta_clamp);
  const auto opts = quad_options(config);
  const double a = (1.0 - p.V) / std::sqrt(p.q);
  const double train = gaussian_indicator_integral(p.q, eta, -kInf, a, 1, opts) -
                       p.V * gaussian_indicator_integral(p.q, eta, -kInf, a, 0, opts);
  const KappaSums k = kappa_sums(spectrum, p.z / n);
  const double norm2 = p.rhat1 * p.rhat1 * k.w1 + p.rhat2 * k.w2 / n;
  return train + lambda * norm2;
}

std::vector<double> maxmargin_residuals(const Spectrum& spectrum, double n, const OrderParameters& params,
                                        const SolverConfig& config) {
  const double eta = std::min(params.eta, config.eta_clamp);
  const auto opts = quad_options(config);
  const double i0 = gaussian_indicator_integral(params.q, eta, -kInf, 1.0 / std::sqrt(params.q), 0, opts);
  const double kappa = params.z / n;
  const MaxMarginProposal p = maxmargin_step(spectrum, n, params.rho, params.m, params.q, config);
  const KappaSums k = kappa_sums(spectrum, kappa);
  const double m = p.rhat1 * k.m;
  const double q = p.rhat1 * p.rhat1 * k.q1 + p.rhat2 * k.q2 / n;
  return {rel_diff(m, params.m), rel_diff(q, params.q), rel_diff(occupancy(spectrum, kappa) / n, i0)};
}

std::vector<double> hinge_residuals(const Spectrum& spectrum, double n, double lambda,
                                    const OrderParameters& params, const SolverConfig& config) {
  const HingeProposal p = hinge_step(spectrum, n, lambda, params.rho, params.m, params.q, params.V, config);
  return {rel_diff(p.m, params.m), rel_diff(p.q, params.q), rel_diff(p.V, params.V)};
}

std::vector<double> ridge_residuals(const Spectrum& spectrum, double n, double lambda, double sigma,
                                    const OrderParameters& params) {
  const double kappa = params.z / n;
  const double c = ridge_c(params.rho, sigma);
  const KappaSums k = kappa_sums(spectrum, kappa);
  const double q_rhs = c * c * k.q1 + (1.0 + params.q - 2.0 * params.m * c) * k.q2 / n;
  const double z_rhs = n * lambda + params.z * occupancy(spectrum, kappa) / n;
  return {rel_diff(z_rhs, params.z), rel_diff(q_rhs, params.q)};
}

}  // namespace ksl
