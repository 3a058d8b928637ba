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
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ksl/errors.hpp"
#include "ksl/simulator.hpp"
#include "ksl/state_evolution.hpp"
#include "support.hpp"

namespace ksl {
namespace {

SyntheticDataset toy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  SyntheticDataset d;
  d.features = X;
  d.labels = y;
  d.teacher = Eigen::VectorXd::Ones(X.cols());
  d.noise = Eigen::VectorXd::Zero(X.rows());
  return d;
}

Eigen::MatrixXd random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = g(gen);
  }
  return m;
}

Eigen::VectorXd sign_of(const Eigen::VectorXd& v) { return v.unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; }); }

double hinge_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double lambda) {
  const Eigen::VectorXd margins = y.cwiseProduct(X * w);
  double loss = 0.0;
  for (int i = 0; i < margins.size(); ++i) loss += std::max(0.0, 1.0 - margins(i));
  return loss / static_cast<double>(X.rows()) + lambda * w.squaredNorm();
}

// Exact box-constrained dual solution by enumerating every assignment of
// coordinates to {0, C, free} and keeping the KKT-consistent one.
Eigen::VectorXd brute_force_dual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C) {
  const int n = static_cast<int>(X.rows());
  const Eigen::MatrixXd Q = (y.asDiagonal() * X) * (y.asDiagonal() * X).transpose();
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  double best = -INFINITY;
  Eigen::VectorXd best_alpha;
  for (int code = 0; code < total; ++code) {
    std::vector<int> state(n), free;
    for (int i = 0, c = code; i < n; ++i, c /= 3) state[i] = c % 3;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) a(i) = C;
      if (state[i] == 2) free.push_back(i);
    }
    if (!free.empty()) {
      const int f = static_cast<int>(free.size());
      Eigen::MatrixXd Qff(f, f);
      Eigen::VectorXd rhs(f);
      for (int i = 0; i < f; ++i) {
        rhs(i) = 1.0 - Q.row(free[i]).dot(a);
        for (int j = 0; j < f; ++j) Qff(i, j) = Q(free[i], free[j]);
      }
      const Eigen::VectorXd af = Qff.fullPivLu().solve(rhs);
      for (int i = 0; i < f; ++i) a(free[i]) = af(i);
    }
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(n) - Q * a;
    bool kkt = true;
    for (int i = 0; i < n && kkt; ++i) {
      if (a(i) < -1e-10 || a(i) > C + 1e-10) kkt = false;
      if (state[i] == 0 && g(i) > 1e-9) kkt = false;
      if (state[i] == 1 && g(i) < -1e-9) kkt = false;
      if (state[i] == 2 && std::abs(g(i)) > 1e-9) kkt = false;
    }
    if (!kkt) continue;
    const double value = a.sum() - 0.5 * a.dot(Q * a);
    if (value > best) {
      best = value;
      best_alpha = a;
    }
  }
  return best_alpha;
}

TEST(Sampling, ColumnVarianceFollowsSpectrum) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 6});
  const SyntheticDataset d = sample_dataset(s, 100000, 0.0, 4);
  ASSERT_EQ(d.features.cols(), 6);
  for (int k = 0; k < 6; ++k) {
    const double omega = std::pow(k + 1.0, -2.0);
    const double var = d.features.col(k).squaredNorm() / 100000.0;
    EXPECT_NEAR(var, omega, 3.0 * omega * std::sqrt(2.0 / 100000.0)) << k;
  }
}

TEST(Sampling, LabelsFollowTeacherAndNoise) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 50});
  for (const double sigma : {0.0, 0.8}) {
    const SyntheticDataset d = sample_dataset(s, 300, sigma, 9);
    EXPECT_EQ(d.features.cols(), 50);
    const Eigen::VectorXd field = d.features * d.teacher + sigma * d.noise;
    EXPECT_EQ(d.labels, sign_of(field));
    if (sigma == 0.0) {
      EXPECT_EQ(d.noise.squaredNorm(), 0.0);
    }
  }
}

TEST(Sampling, DeterministicAndPrefixStable) {
  const Spectrum s(PowerLawModel{1.5, 0.3, 40});
  const SyntheticDataset a = sample_dataset(s, 100, 0.5, 77);
  const SyntheticDataset b = sample_dataset(s, 100, 0.5, 77);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.noise, b.noise);
  const SyntheticDataset c = sample_dataset(s, 150, 0.5, 77);
  EXPECT_EQ(c.features.topRows(100), a.features);
  EXPECT_NE(sample_dataset(s, 100, 0.5, 78).features, a.features);
  EXPECT_THROW(sample_dataset(s, 0, 0.0, 1), DomainError);
}

TEST(RidgeTrainer, RankOneClosedForm) {
  Eigen::MatrixXd X(1, 3);
  X << 0.5, -1.0, 2.0;
  Eigen::VectorXd y(1);
  y << -1.0;
  const LinearClassifier c = train_ridge(toy(X, y), 0.3);
  const Eigen::VectorXd want = X.row(0).transpose() * y(0) / (X.squaredNorm() + 0.3);
  EXPECT_LT((c.weights - want).norm(), 1e-14);
}

TEST(RidgeTrainer, InterpolatesWithoutRegularization) {
  const Eigen::MatrixXd X = random_matrix(10, 25, 3);
  const Eigen::VectorXd y = sign_of(random_matrix(10, 1, 4).col(0));
  const LinearClassifier c = train_ridge(toy(X, y), 0.0);
  EXPECT_LT((X * c.weights - y).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RidgeTrainer, MatchesNormalEquations) {
  const Eigen::MatrixXd X = random_matrix(8, 16, 5);
  const Eigen::VectorXd y = sign_of(random_matrix(8, 1, 6).col(0));
  const double lam = 0.05;
  const Eigen::MatrixXd A = X.transpose() * X / 8.0 + lam * Eigen::MatrixXd::Identity(16, 16);
  const Eigen::VectorXd want = A.completeOrthogonalDecomposition().solve(X.transpose() * y / 8.0);
  const LinearClassifier c = train_ridge(toy(X, y), lam);
  EXPECT_LT((c.weights - want).norm(), 1e-8 * want.norm());
}

TEST(RidgeTrainer, PrimalAndDualFormsAgree) {
  for (const auto& [n, p] : {std::pair{12, 40}, std::pair{40, 12}, std::pair{64, 64}, std::pair{30, 31}}) {
    const Eigen::MatrixXd X = random_matrix(n, p, 10 + n);
    const Eigen::VectorXd y = sign_of(random_matrix(n, 1, 20 + p).col(0));
    const double nl = n * 0.01;
    const Eigen::VectorXd primal = (X.transpose() * X + nl * Eigen::MatrixXd::Identity(p, p)).ldlt().solve(X.transpose() * y);
    const Eigen::VectorXd dual = X.transpose() * (X * X.transpose() + nl * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(y);
    const LinearClassifier c = train_ridge(toy(X, y), 0.01);
    EXPECT_LT((primal - dual).norm(), 1e-8 * primal.norm());
    EXPECT_LT((c.weights - primal).norm(), 1e-8 * primal.norm()) << n << "x" << p;
  }
}

TEST(SvmTrainer, SymmetricOneDimensionalMaxMargin) {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, -1.0;
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  const LinearClassifier c = train_svm_hinge(toy(X, y), 1e-6);
  EXPECT_NEAR(c.weights(0), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(support_vector_fraction(c), 1.0);
}

TEST(SvmTrainer, MatchesBruteForceDual) {
  for (const unsigned seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd X = random_matrix(6, 10, seed);
    const Eigen::VectorXd y = sign_of(X * random_matrix(10, 1, seed + 100).col(0));
    for (const double lam : {1e-3, 0.2}) {
      const double C = 1.0 / (2.0 * 6 * lam);
      const Eigen::VectorXd alpha = brute_force_dual(X, y, C);
      ASSERT_EQ(alpha.size(), 6);
      const Eigen::VectorXd w_star = X.transpose() * y.cwiseProduct(alpha);
      const double want = hinge_objective(X, y, w_star, lam);
      SvmOptions opt;
      opt.tol = 1e-10;
      const LinearClassifier c = train_svm_hinge(toy(X, y), lam, opt);
      EXPECT_NEAR(hinge_objective(X, y, c.weights, lam), want, 1e-6 * std::max(1.0, want));
      EXPECT_NEAR(c.primal_objective, want, 1e-6 * std::max(1.0, want));
    }
  }
}

TEST(SvmTrainer, DualityGapAndBoxOnRandomInstances) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 200});
  for (const std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    for (const double lam : {1e-4, 1e-2}) {
      const SyntheticDataset d = sample_dataset(s, 120, 0.3, seed);
      const LinearClassifier c = train_svm_hinge(d, lam);
      EXPECT_LT(c.relative_duality_gap(), 1e-6) << seed << " " << lam;
      EXPECT_GE(c.relative_duality_gap(), -1e-12);
      ASSERT_TRUE(c.dual_coeffs.has_value());
      EXPECT_GE(c.dual_coeffs->minCoeff(), 0.0);
      EXPECT_LE(c.dual_coeffs->maxCoeff(), c.C);
      EXPECT_NEAR(c.C, 1.0 / (2.0 * 120 * lam), 1e-12 * c.C);
      EXPECT_LE(c.kkt_violation, 1e-6);
    }
  }
}

TEST(SvmTrainer, GramAndFeatureFormsAgree) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 60});
  const SyntheticDataset d = sample_dataset(s, 50, 0.0, 5);
  const LinearClassifier a = train_svm_hinge(d, 1e-3);
  const LinearClassifier b = train_svm_gram(d.features * d.features.transpose(), d.labels, 1e-3);
  ASSERT_TRUE(b.dual_coeffs.has_value());
  EXPECT_LT((*a.dual_coeffs - *b.dual_coeffs).norm(), 1e-6 * a.dual_coeffs->norm());
}

TEST(SvmTrainer, UpdateCapRaises) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 200});
  SvmOptions opt;
  opt.max_sweeps = 1;
  opt.tol = 1e-14;
  EXPECT_THROW(train_svm_hinge(sample_dataset(s, 100, 0.5, 1), 1e-5, opt), ConvergenceError);
}

TEST(SupportVectors, DegenerateDualsGiveZero) {
  LinearClassifier c;
  c.method = ClassifierMethod::Hinge;
  c.C = 1.0;
  c.dual_coeffs = Eigen::VectorXd::Zero(5);
  EXPECT_DOUBLE_EQ(support_vector_fraction(c), 0.0);
  LinearClassifier ridge;
  EXPECT_THROW(support_vector_fraction(ridge), DomainError);
}

TEST(AnalyticError, AlignedAndOrthogonal) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 30});
  const SyntheticDataset d = sample_dataset(s, 1, 0.0, 1);
  EXPECT_NEAR(analytic_error(d.teacher * 3.7, s), 0.0, 1e-7);
  EXPECT_NEAR(analytic_error(-d.teacher, s), 1.0, 1e-7);
  // w with w' Sigma theta = 0: mix the first two modes.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(30);
  const auto omega = s.eigenvalues();
  w(0) = omega[1] * d.teacher(1);
  w(1) = -omega[0] * d.teacher(0);
  EXPECT_NEAR(analytic_error(w, s), 0.5, 1e-12);
  EXPECT_NEAR(analytic_error(d.teacher, s, 1.0), residual_error(rho(s), 1.0), 1e-12);
}

TEST(AnalyticError, AgreesWithLargeTestSet) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 20});
  const SyntheticDataset test = sample_dataset(s, 1000000, 0.5, 31337);
  LinearClassifier c;
  c.weights = random_matrix(20, 1, 8).col(0) + 2.0 * test.teacher;
  const double a = analytic_error(c, s, 0.5);
  const double e = empirical_error(c, test);
  EXPECT_NEAR(e, a, 3.0 * std::sqrt(a * (1 - a) / 1e6));
}

TEST(EmpiricalError, TeacherAndConstantClassifier) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 20});
  const SyntheticDataset test = sample_dataset(s, 20000, 0.0, 2);
  LinearClassifier teacher;
  teacher.weights = test.teacher;
  EXPECT_DOUBLE_EQ(empirical_error(teacher, test), 0.0);
  LinearClassifier zero;
  zero.weights = Eigen::VectorXd::Zero(20);
  EXPECT_NEAR(empirical_error(zero, test), 0.5, 4.0 * std::sqrt(0.25 / 20000));
}

TEST(CrossValidation, GridEdgeCases) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 40});
  const SyntheticDataset d = sample_dataset(s, 60, 0.5, 3);
  EXPECT_DOUBLE_EQ(cross_validate_lambda(d, {0.3}, 5).lambda_best, 0.3);
  const CvResult dup = cross_validate_lambda(d, {0.1, 0.1, 0.1}, 5);
  EXPECT_DOUBLE_EQ(dup.lambda_best, 0.1);
  EXPECT_EQ(dup.curve.size(), 3u);
  EXPECT_EQ(cross_validate_lambda(d, {1e-3, 1e-2, 1e-1}, 4, 9).lambda_best,
            cross_validate_lambda(d, {1e-3, 1e-2, 1e-1}, 4, 9).lambda_best);
}

TEST(CrossValidation, TracksAnalyticMinimizer) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 400});
  const SyntheticDataset d = sample_dataset(s, 400, 1.0, 12);
  std::vector<double> grid;
  for (double e = -4.0; e <= 1.01; e += 0.5) grid.push_back(std::pow(10.0, e));
  std::size_t best = 0;
  double best_err = INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double err = analytic_error(train_ridge(d, grid[i]), s, 1.0);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  ASSERT_GT(best, 0u);
  ASSERT_LT(best, grid.size() - 1);
  const double chosen = cross_validate_lambda(d, grid, 5, 1).lambda_best;
  EXPECT_NEAR(std::log10(chosen), std::log10(grid[best]), 0.5 + 1e-9);
}

TEST(EmpiricalCurve, SingleSeedMatchesDirectTraining) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 100});
  SimulationOptions opt;
  opt.base_seed = 40;
  const EmpiricalCurve c = empirical_learning_curve(Method::Ridge, s, {64}, 1, LambdaRule::fixed(0.01), 0.0, opt);
  const double want = analytic_error(train_ridge(sample_dataset(s, 64, 0.0, 40), 0.01), s);
  ASSERT_EQ(c.curve.points.size(), 1u);
  EXPECT_DOUBLE_EQ(c.curve.points[0].value, want);
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].seed, 40u);
  EXPECT_EQ(c.curve.label, "sim-ridge");
}

TEST(EmpiricalCurve, ParallelRunIsIdentical) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 128});
  SimulationOptions one, four;
  four.jobs = 4;
  const auto a = empirical_learning_curve(Method::Hinge, s, {32, 64}, 3, LambdaRule::decay(1.0), 0.2, one);
  const auto b = empirical_learning_curve(Method::Hinge, s, {32, 64}, 3, LambdaRule::decay(1.0), 0.2, four);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_EQ(a.curve.label, "sim-hinge");
}

TEST(EmpiricalCurve, RidgeMatchesTheory) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 1024});
  const std::vector<double> ns = {128, 256};
  // Ten seeds leave the n = 128 mean about 11% low; forty bring it to 6%.
  const auto sim = empirical_learning_curve(Method::Ridge, s, ns, 40, LambdaRule::decay(0.5));
  const auto th = theory_sweep(Method::Ridge, s, ns, LambdaRule::decay(0.5));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double t = th.points[i].value, m = sim.curve.points[i].value;
    EXPECT_LE(std::abs(m - t), std::max(2.0 * sim.curve.points[i].std_error, 0.1 * t)) << ns[i];
  }
}

TEST(DoubleDescent, PeakNearInterpolationThreshold) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 32});
  const std::vector<double> ns = {8, 16, 28, 32, 36, 64, 1600, 6400};
  const EmpiricalCurve c = double_descent_probe(s, ns, 1e-8, 8);
  std::vector<double> v;
  for (const auto& p : c.curve.points) v.push_back(p.value);
  EXPECT_GT(v[2], 0.1);
  EXPECT_LT(v[2], 0.5);
  bool rises = false;
  for (std::size_t i = 1; i < 5; ++i) rises = rises || v[i] > v[i - 1];
  EXPECT_TRUE(rises);
  // Far past p the least-squares direction converges to the teacher with
  // angle^2 ~ (pi/2 - 1) p / n, so the error falls like sqrt(p / n).
  for (std::size_t i = 6; i < ns.size(); ++i) {
    const double predicted = std::sqrt((std::numbers::pi / 2.0 - 1.0) * 32.0 / ns[i]) / std::numbers::pi;
    EXPECT_NEAR(v[i], predicted, 0.2 * predicted) << ns[i];
  }
  EXPECT_LT(v.back(), 0.02);
}

}  // namespace
}  // namespace ksl
