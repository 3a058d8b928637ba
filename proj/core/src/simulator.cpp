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

#include "ksl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ksl/errors.hpp"
#include "ksl/rng.hpp"

namespace ksl {

namespace {

constexpr std::uint32_t kFeatureStream = 0;
constexpr std::uint32_t kNoiseStream = 1;
constexpr std::uint32_t kFoldStream = 2;

Eigen::MatrixXd gram_of(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

std::string sim_label(Method method) {
  switch (method) {
    case Method::MaxMargin:
      return "sim-svm";
    case Method::Hinge:
      return "sim-hinge";
    case Method::Ridge:
      return "sim-ridge";
  }
  return "sim";
}

// Ridge dual coefficients for every lambda from one eigendecomposition of
// the gram: beta(lambda) = U (D + n lambda)^+ U^T y.
class RidgePath {
 public:
  RidgePath(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y) : solver_(gram) {
    if (solver_.info() != Eigen::Success) throw ConvergenceError("ridge path: eigensolver failed", {});
    uty_ = solver_.eigenvectors().transpose() * y;
    const double top = solver_.eigenvalues().cwiseAbs().maxCoeff();
    cutoff_ = 1e-12 * std::max(top, 1e-300);
  }

  Eigen::VectorXd beta(double lambda) const {
    const auto n = static_cast<double>(uty_.size());
    Eigen::VectorXd scaled(uty_.size());
    for (Eigen::Index i = 0; i < uty_.size(); ++i) {
      const double d = solver_.eigenvalues()[i] + n * lambda;
      scaled[i] = d > cutoff_ ? uty_[i] / d : 0.0;
    }
    return solver_.eigenvectors() * scaled;
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
  Eigen::VectorXd uty_;
  double cutoff_ = 0.0;
};

std::vector<double> log_grid(double lo, double hi, double step) {
  std::vector<double> out;
  for (double x = lo; x <= hi + 1e-12; x += step) out.push_back(std::pow(10.0, x));
  return out;
}

}  // namespace

SyntheticDataset sample_dataset(const Spectrum& spectrum, std::size_t n, double sigma, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_dataset: n must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sample_dataset: sigma must be >= 0");
  const std::size_t p = spectrum.size();
  SyntheticDataset d;
  d.sigma = sigma;
  d.seed = seed;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  d.teacher.resize(static_cast<Eigen::Index>(p));
  const auto omega = spectrum.eigenvalues();
  const auto theta = spectrum.teacher();
  for (std::size_t k = 0; k < p; ++k) {
    const double scale = std::sqrt(omega[k]);
    d.teacher[static_cast<Eigen::Index>(k)] = theta[k];
    for (std::size_t mu = 0; mu < n; ++mu) {
      d.features(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(k)) =
          scale * counter_normal(seed, mu, static_cast<std::uint32_t>(k), kFeatureStream);
    }
  }
  d.noise = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (sigma > 0.0) {
    for (std::size_t mu = 0; mu < n; ++mu) {
      d.noise[static_cast<Eigen::Index>(mu)] = counter_normal(seed, mu, 0, kNoiseStream);
    }
  }
  const Eigen::VectorXd field = d.features * d.teacher + sigma * d.noise;
  d.labels = field.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  return d;
}

double LinearClassifier::relative_duality_gap() const {
  return (primal_objective - dual_objective) / primal_objective;
}

LinearClassifier train_ridge(const SyntheticDataset& data, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("train_ridge: lambda must be >= 0");
  const Eigen::Index n = data.features.rows();
  const Eigen::Index p = data.features.cols();
  const double shift = static_cast<double>(n) * lambda;
  LinearClassifier c;
  c.method = ClassifierMethod::Ridge;
  c.lambda = lambda;
  if (n <= p) {
    Eigen::MatrixXd a = gram_of(data.features);
    a.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw DomainError("train_ridge: singular system (lambda = 0 needs a full-rank gram)");
    c.weights = data.features.transpose() * llt.solve(data.labels);
  } else {
    Eigen::MatrixXd a = gram_of(data.features.transpose());
    a.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw DomainError("train_ridge: singular system (lambda = 0 needs full column rank)");
    c.weights = llt.solve(data.features.transpose() * data.labels);
  }
  return c;
}

LinearClassifier train_svm_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double lambda,
                                const SvmOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("train_svm_hinge: lambda must be > 0");
  if (!(options.tol > 0.0) || !(options.gap_tol > 0.0)) throw DomainError("train_svm_hinge: tolerances must be > 0");
  const Eigen::Index n = gram.rows();
  if (n < 1 || gram.cols() != n || labels.size() != n) throw DomainError("train_svm_hinge: shape mismatch");
  const double C = 1.0 / (2.0 * static_cast<double>(n) * lambda);
  // Q = diag(y) K diag(y); the gradient of the dual objective is Q alpha - 1.
  const Eigen::MatrixXd Q = labels.asDiagonal() * gram * labels.asDiagonal();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  auto projected = [&](Eigen::Index i) {
    if (alpha[i] <= 0.0) return std::min(grad[i], 0.0);
    if (alpha[i] >= C) return std::max(grad[i], 0.0);
    return grad[i];
  };
  const std::size_t cap = options.max_sweeps * static_cast<std::size_t>(n);
  std::size_t updates = 0;
  double violation = 0.0;
  double tol = options.tol;
  Eigen::VectorXd qa;
  double primal = 0.0, dual = 0.0;
  while (true) {
    Eigen::Index best = 0;
    violation = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = std::abs(projected(i));
      if (v > violation) {
        violation = v;
        best = i;
      }
    }
    if (violation < tol) {
      // Objectives from a fresh product, free of accumulated gradient drift,
      // scaled by 2 lambda to the risk (1/n) sum loss + lambda |w|^2.
      qa = Q * alpha;
      const double w2 = alpha.dot(qa);
      const double hinge = (1.0 - qa.array()).max(0.0).sum();
      primal = 2.0 * lambda * (0.5 * w2 + C * hinge);
      dual = 2.0 * lambda * (alpha.sum() - 0.5 * w2);
      if ((primal - dual) / primal < options.gap_tol || tol < 1e-14) break;
      tol *= 0.25;
      grad = qa.array() - 1.0;
      continue;
    }
    if (updates >= cap) {
      throw ConvergenceError("train_svm_hinge: update cap reached with KKT violation " + std::to_string(violation),
                             {violation});
    }
    const double qii = Q(best, best);
    const double target = qii > 0.0 ? std::clamp(alpha[best] - grad[best] / qii, 0.0, C) : (grad[best] < 0.0 ? C : 0.0);
    const double delta = target - alpha[best];
    alpha[best] = target;
    grad.noalias() += delta * Q.col(best);
    ++updates;
  }

  LinearClassifier c;
  c.method = ClassifierMethod::Hinge;
  c.lambda = lambda;
  c.C = C;
  c.dual_coeffs = alpha;
  c.margins = qa;
  c.iterations = updates;
  c.kkt_violation = violation;
  c.primal_objective = primal;
  c.dual_objective = dual;
  return c;
}

LinearClassifier train_svm_hinge(const SyntheticDataset& data, double lambda, const SvmOptions& options) {
  LinearClassifier c = train_svm_gram(gram_of(data.features), data.labels, lambda, options);
  c.weights = data.features.transpose() * c.dual_coeffs->cwiseProduct(data.labels);
  return c;
}

double analytic_error(const Eigen::VectorXd& weights, const Spectrum& spectrum, double sigma) {
  if (static_cast<std::size_t>(weights.size()) != spectrum.size()) {
    throw DomainError("analytic_error: weight length differs from spectrum size");
  }
  if (!(sigma >= 0.0)) throw DomainError("analytic_error: sigma must be >= 0");
  const auto omega = spectrum.eigenvalues();
  const auto theta = spectrum.teacher();
  double m = 0.0, q = 0.0;
  for (std::size_t k = spectrum.size(); k-- > 0;) {
    const double w = weights[static_cast<Eigen::Index>(k)];
    m += omega[k] * w * theta[k];
    q += omega[k] * w * w;
  }
  if (!(q > 0.0)) throw DomainError("analytic_error: zero-weight classifier");
  const double cosine = m / std::sqrt(q * (rho(spectrum) + sigma * sigma));
  return std::acos(std::clamp(cosine, -1.0, 1.0)) / std::numbers::pi;
}

double analytic_error(const LinearClassifier& classifier, const Spectrum& spectrum, double sigma) {
  return analytic_error(classifier.weights, spectrum, sigma);
}

double empirical_error(const LinearClassifier& classifier, const SyntheticDataset& test) {
  if (test.features.rows() < 1) throw DomainError("empirical_error: empty test set");
  if (test.features.cols() != classifier.weights.size()) throw DomainError("empirical_error: dimension mismatch");
  const Eigen::VectorXd score = test.features * classifier.weights;
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    const double pred = score[i] >= 0.0 ? 1.0 : -1.0;
    if (pred != test.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(score.size());
}

CvResult cross_validate_lambda(const SyntheticDataset& data, const std::vector<double>& grid, std::size_t folds,
                               std::uint64_t seed) {
  if (folds < 2) throw DomainError("cross_validate_lambda: folds must be >= 2");
  if (grid.empty()) throw DomainError("cross_validate_lambda: grid is empty");
  for (const double l : grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("cross_validate_lambda: lambdas must be >= 0");
  }
  const auto n = static_cast<std::size_t>(data.features.rows());
  if (n < folds) throw DomainError("cross_validate_lambda: fewer samples than folds");

  auto assign = [&](std::uint32_t draw) {
    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = counter_uniform(seed, i, draw, kFoldStream);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    std::vector<std::size_t> fold(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % folds;
    return fold;
  };
  auto degenerate = [&](const std::vector<std::size_t>& fold) {
    for (std::size_t f = 0; f < folds; ++f) {
      bool pos = false, neg = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] == f) continue;
        (data.labels[static_cast<Eigen::Index>(i)] > 0 ? pos : neg) = true;
      }
      if (!(pos && neg)) return true;
    }
    return false;
  };
  std::vector<std::size_t> fold = assign(0);
  if (degenerate(fold)) {
    fold = assign(1);
    if (degenerate(fold)) throw DomainError("cross_validate_lambda: a training fold contains a single class");
  }

  const Eigen::MatrixXd gram = gram_of(data.features);
  std::vector<double> err_sum(grid.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? va : tr).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd k_tr = gram(tr, tr);
    const Eigen::MatrixXd k_va = gram(va, tr);
    const Eigen::VectorXd y_tr = data.labels(tr);
    const Eigen::VectorXd y_va = data.labels(va);
    const RidgePath path(k_tr, y_tr);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Eigen::VectorXd score = k_va * path.beta(grid[g]);
      std::size_t wrong = 0;
      for (Eigen::Index i = 0; i < score.size(); ++i) {
        if ((score[i] >= 0.0 ? 1.0 : -1.0) != y_va[i]) ++wrong;
      }
      err_sum[g] += static_cast<double>(wrong) / static_cast<double>(va.size());
    }
  }
  CvResult out;
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double e = err_sum[g] / static_cast<double>(folds);
    out.curve.emplace_back(grid[g], e);
    const double be = out.curve[best].second;
    if (e < be || (e == be && grid[g] < grid[best])) best = g;
  }
  out.lambda_best = grid[best];
  return out;
}

EmpiricalCurve empirical_learning_curve(Method method, const Spectrum& spectrum, const std::vector<double>& n_grid,
                                        std::size_t seeds, const LambdaRule& rule, double sigma,
                                        const SimulationOptions& options) {
  if (seeds < 1) throw DomainError("empirical_learning_curve: seeds must be >= 1");
  if (n_grid.empty()) throw DomainError("empirical_learning_curve: n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] >= 1.0) || n_grid[i] != std::floor(n_grid[i])) {
      throw DomainError("empirical_learning_curve: n values must be positive integers");
    }
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw DomainError("empirical_learning_curve: n grid must increase");
  }
  if (rule.kind == LambdaRule::Kind::Optimal && method != Method::Ridge) {
    throw DomainError("empirical_learning_curve: the optimal lambda rule is only available for ridge");
  }
  const std::size_t jobs_total = n_grid.size() * seeds;
  std::vector<CurvePoint> records(jobs_total);
  parallel_for(jobs_total, options.jobs, [&](std::size_t job) {
    const std::size_t i = job / seeds;
    const std::size_t s = job % seeds;
    CurvePoint& rec = records[job];
    rec.n = n_grid[i];
    rec.seed = options.base_seed + s;
    try {
      const SyntheticDataset data =
          sample_dataset(spectrum, static_cast<std::size_t>(rec.n), sigma, options.base_seed + s);
      if (method == Method::Ridge && rule.kind == LambdaRule::Kind::Optimal) {
        const RidgePath path(gram_of(data.features), data.labels);
        double best = 2.0;
        for (const double l : log_grid(options.log10_lambda_min, options.log10_lambda_max, options.log10_lambda_step)) {
          const double e = analytic_error(Eigen::VectorXd(data.features.transpose() * path.beta(l)), spectrum, sigma);
          if (e < best) {
            best = e;
            rec.lambda = l;
          }
        }
        rec.value = best;
      } else {
        rec.lambda = method == Method::MaxMargin ? options.maxmargin_lambda : rule.at(rec.n);
        const LinearClassifier c =
            method == Method::Ridge ? train_ridge(data, rec.lambda) : train_svm_hinge(data, rec.lambda, options.svm);
        rec.value = analytic_error(c, spectrum, sigma);
      }
    } catch (const ConvergenceError& e) {
      rec.ok = false;
      rec.nonconvergence = true;
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });

  EmpiricalCurve out;
  out.curve.label = sim_label(method);
  out.curve.meta.p = spectrum.size();
  out.curve.meta.sigma = sigma;
  out.curve.meta.rule = rule;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    CurvePoint pt;
    pt.n = n_grid[i];
    double sum = 0.0, sum2 = 0.0;
    std::size_t good = 0, bad = 0;
    std::string first_error;
    for (std::size_t s = 0; s < seeds; ++s) {
      const CurvePoint& rec = records[i * seeds + s];
      if (rec.ok) {
        sum += rec.value;
        ++good;
      } else {
        if (first_error.empty()) first_error = rec.error;
        pt.nonconvergence = pt.nonconvergence || rec.nonconvergence;
        ++bad;
      }
    }
    if (good > 0) {
      pt.value = sum / static_cast<double>(good);
      for (std::size_t s = 0; s < seeds; ++s) {
        const CurvePoint& rec = records[i * seeds + s];
        if (rec.ok) sum2 += (rec.value - pt.value) * (rec.value - pt.value);
      }
      if (good > 1) pt.std_error = std::sqrt(sum2 / static_cast<double>(good - 1) / static_cast<double>(good));
    }
    pt.lambda = rule.kind == LambdaRule::Kind::Fixed ? rule.value
                : method == Method::MaxMargin       ? options.maxmargin_lambda
                : rule.kind == LambdaRule::Kind::Decay ? rule.at(pt.n)
                                                       : std::numeric_limits<double>::quiet_NaN();
    pt.ok = good > 0 && pt.value > 0.0;
    if (bad > 0) pt.error = std::to_string(bad) + " of " + std::to_string(seeds) + " seeds failed: " + first_error;
    out.curve.points.push_back(pt);
  }
  out.records = std::move(records);
  return out;
}

double support_vector_fraction(const LinearClassifier& classifier) {
  if (classifier.method != ClassifierMethod::Hinge || !classifier.dual_coeffs) {
    throw DomainError("support_vector_fraction: classifier has no dual coefficients");
  }
  const Eigen::VectorXd& a = *classifier.dual_coeffs;
  if (a.size() == 0) return 0.0;
  const double threshold = 1e-8 * classifier.C;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool on_margin = classifier.margins && std::abs((*classifier.margins)[i] - 1.0) <= 1e-6;
    if (a[i] > threshold || on_margin) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(a.size());
}

EmpiricalCurve double_descent_probe(const Spectrum& spectrum, const std::vector<double>& n_grid, double lambda,
                                    std::size_t seeds, const SimulationOptions& options) {
  if (!(lambda > 0.0)) throw DomainError("double_descent_probe: lambda must be > 0");
  return empirical_learning_curve(Method::Ridge, spectrum, n_grid, seeds, LambdaRule::fixed(lambda), 0.0, options);
}

std::string to_csv(const EmpiricalCurve& curve) {
  std::string out = to_csv(curve.curve, true);
  LearningCurve records = curve.curve;
  records.points = curve.records;
  const std::string body = to_csv(records, true);
  out += body.substr(body.find('\n') + 1);
  return out;
}

}  // namespace ksl
