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

#include <atomic>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "csv_schema.hpp"
#include "json.hpp"
#include "ksl/errors.hpp"
#include "ksl/learning_curve.hpp"
#include "support.hpp"

namespace ksl {
namespace {

TEST(LambdaRule, Evaluation) {
  EXPECT_DOUBLE_EQ(LambdaRule::fixed(0.3).at(100), 0.3);
  EXPECT_DOUBLE_EQ(LambdaRule::decay(0.5).at(100), 0.1);
  EXPECT_THROW(LambdaRule::optimal().at(100), DomainError);
}

TEST(Method, Parsing) {
  EXPECT_EQ(parse_method("maxmargin"), Method::MaxMargin);
  EXPECT_EQ(parse_method("svm"), Method::MaxMargin);
  EXPECT_EQ(parse_method("hinge"), Method::Hinge);
  EXPECT_EQ(parse_method("ridge"), Method::Ridge);
  EXPECT_THROW(parse_method("lasso"), DomainError);
}

TEST(TheorySweep, SinglePointIsOneSolve) {
  const PowerLawModel model{2.0, 0.5, 2000};
  const LearningCurve c = theory_sweep(Method::Ridge, model, {300}, LambdaRule::fixed(0.01));
  ASSERT_EQ(c.points.size(), 1u);
  const double want = misclassification_error(solve_ridge(Spectrum(model), 300, 0.01, 0.0));
  EXPECT_DOUBLE_EQ(c.points[0].value, want);
  EXPECT_DOUBLE_EQ(c.points[0].lambda, 0.01);
  EXPECT_EQ(c.label, "theory-ridge");
  EXPECT_EQ(c.meta.p, 2000u);
}

TEST(TheorySweep, LabelsAndOrdering) {
  const PowerLawModel model{2.0, 0.25, 1000};
  const std::vector<double> ns = {64, 128, 256, 512};
  SweepOptions par;
  par.jobs = 3;
  const LearningCurve a = theory_sweep(Method::Hinge, model, ns, LambdaRule::decay(1.0));
  const LearningCurve b = theory_sweep(Method::Hinge, model, ns, LambdaRule::decay(1.0), 0.0, par);
  EXPECT_EQ(a.label, "theory-hinge");
  EXPECT_EQ(to_csv(a), to_csv(b));
  for (std::size_t i = 0; i < ns.size(); ++i) EXPECT_EQ(b.points[i].n, ns[i]);
  EXPECT_EQ(theory_sweep(Method::MaxMargin, model, {64}, LambdaRule::fixed(0)).label, "theory-svm");
}

TEST(TheorySweep, FailuresAreRecordedPerPoint) {
  SweepOptions tight;
  tight.solver.max_iter = 2;
  const LearningCurve c = theory_sweep(Method::MaxMargin, PowerLawModel{2.0, 0.5, 500}, {64, 128},
                                       LambdaRule::fixed(0), 0.0, tight);
  ASSERT_EQ(c.points.size(), 2u);
  for (const auto& p : c.points) {
    EXPECT_FALSE(p.ok);
    EXPECT_TRUE(p.nonconvergence);
    EXPECT_FALSE(p.error.empty());
  }
  EXPECT_TRUE(c.valid_points().empty());
  EXPECT_EQ(to_csv(c), csv_header(false) + "\n");
}

TEST(TheorySweep, InvalidCombinationsThrow) {
  const PowerLawModel model{2.0, 0.5, 100};
  EXPECT_THROW(theory_sweep(Method::Hinge, model, {10}, LambdaRule::optimal()), DomainError);
  EXPECT_THROW(theory_sweep(Method::MaxMargin, model, {10}, LambdaRule::fixed(0), 0.5), DomainError);
  EXPECT_THROW(theory_sweep(Method::Ridge, model, {20, 10}, LambdaRule::fixed(0.1)), DomainError);
}

TEST(OptimalRidge, BeatsEveryGridLambda) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 4000});
  const auto [lam, err] = optimal_ridge_error(s, 500, 0.0);
  for (double e = -6; e <= 1; e += 0.5) {
    EXPECT_LE(err, misclassification_error(solve_ridge(s, 500, std::pow(10.0, e), 0.0)) + 1e-12);
  }
  EXPECT_NEAR(err, misclassification_error(solve_ridge(s, 500, lam, 0.0)), 1e-14);
}

TEST(CurveIo, CsvSchemaAndFormatting) {
  const LearningCurve c = theory_sweep(Method::Ridge, PowerLawModel{2.0, 0.5, 1000}, {100, 200}, LambdaRule::decay(0.3), 0.5);
  const std::string csv = to_csv(c);
  EXPECT_TRUE(testing::csv_schema_problems(csv).empty());
  EXPECT_TRUE(testing::csv_schema_problems(to_csv(c, true)).empty());
  EXPECT_NE(csv.find(",theory-ridge,2,0.5,0.29999999999999999,0.5\n"), std::string::npos) << csv;
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(NAN), "");
  const auto j = nlohmann::json::parse(to_json(c));
  EXPECT_EQ(j["points"].size(), 2u);
  EXPECT_EQ(j["label"], "theory-ridge");
}

TEST(CurveIo, SchemaValidatorRejectsDrift) {
  const std::string good = "n,value,method,alpha,r,ell,sigma\n128,0.1,theory-svm,2,0.5,,0\n";
  EXPECT_TRUE(testing::csv_schema_problems(good).empty());
  EXPECT_FALSE(testing::csv_schema_problems("n,value,method\n1,2,theory-svm\n").empty());
  EXPECT_FALSE(testing::csv_schema_problems("n,value,method,alpha,r,ell,sigma\n128,0,1,theory-svm,2,0.5,,0\n").empty());
  EXPECT_FALSE(testing::csv_schema_problems("n,value,method,alpha,r,ell,sigma\r\n128,0.1,theory-svm,2,0.5,,0\r\n").empty());
  EXPECT_FALSE(testing::csv_schema_problems("n,value,method,alpha,r,ell,sigma\n128,0.1,ridge,2,0.5,,0\n").empty());
  EXPECT_FALSE(testing::csv_schema_problems("n,value,method,alpha,r,ell,sigma\n256,0.1,sim-svm,2,0.5,,0\n128,0.1,sim-svm,2,0.5,,0\n").empty());
}

TEST(FitCurve, SlopeOfExactCurve) {
  LearningCurve c;
  for (const double n : {10.0, 20.0, 40.0, 80.0}) {
    CurvePoint p;
    p.n = n;
    p.value = 2.0 * std::pow(n, -0.4);
    c.points.push_back(p);
  }
  EXPECT_NEAR(c.fit().slope, -0.4, 1e-12);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(101);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

}  // namespace
}  // namespace ksl
