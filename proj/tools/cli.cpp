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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ksl/errors.hpp"
#include "ksl/estimation.hpp"
#include "ksl/io.hpp"
#include "ksl/learning_curve.hpp"
#include "ksl/rates.hpp"
#include "ksl/simulator.hpp"
#include "ksl/spectrum.hpp"
#include "ksl/state_evolution.hpp"

namespace ksl::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"theory-rates", "se-solve", "se-sweep", "simulate", "estimate", "fit-curve"};

bool has(const std::vector<std::string>& set, const std::string& c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

bool uses_model(const std::string& c) { return has({"theory-rates", "se-solve", "se-sweep", "simulate"}, c); }
bool uses_schedule(const std::string& c) { return has({"se-solve", "se-sweep", "simulate"}, c); }
bool uses_fit(const std::string& c) { return has({"se-sweep", "simulate"}, c); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string usage_text() {
  return "usage: ksl <command> [options]\n"
         "commands: theory-rates, se-solve, se-sweep, simulate, estimate, fit-curve\n"
         "run 'ksl <command> --help' for the options of a command\n";
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + " '" + text + "'", usage_text());
  }
  if (used != text.size() || !std::isfinite(v)) throw UsageError("invalid " + what + " '" + text + "'", usage_text());
  return v;
}

// Registers the options of `command` on `app`, bound to `cfg`.
struct Binder {
  CLI::App& app;
  RunConfig& cfg;
  // Raw values of optional fields, converted after parsing.
  double alpha = 0, r = 0, lambda = 0, ell = 0, tol = 0, damping = 0;
  std::size_t max_iter = 0;
  std::string range1, range2;
  bool normalize = false;
  std::map<std::string, CLI::Option*> opts;

  Binder(CLI::App& a, RunConfig& c) : app(a), cfg(c) {}

  void add(const std::string& name, auto& target, const std::string& help) {
    opts[name] = app.add_option("--" + name, target, help);
  }

  void bind(const std::string& command) {
    add("out", cfg.out, "output artifact path");
    add("jobs", cfg.jobs, "worker threads (default from KSL_JOBS)");
    if (uses_model(command)) {
      add("alpha", alpha, "capacity coefficient (> 1)");
      add("r", r, "source coefficient (>= 0)");
      opts["alpha"]->required();
      opts["r"]->required();
      add("ell", ell, "lambda = n^-ell");
    }
    if (command == "theory-rates") {
      opts["table"] = app.add_flag("--table", cfg.table, "print a text table instead of JSON");
    }
    if (uses_schedule(command)) {
      add("method", cfg.method, "maxmargin | hinge | ridge");
      add("p-cut", cfg.p_cut, "spectrum truncation");
      add("n", cfg.n_spec, "sample count or grid start:stop:xF | start:stop:+s");
      opts["n"]->required();
      add("lambda", lambda, "fixed regularization");
      opts["optimal"] = app.add_flag("--optimal", cfg.optimal, "minimize the error over lambda per n (ridge)");
      opts["lambda"]->excludes(opts["ell"])->excludes(opts["optimal"]);
      opts["ell"]->excludes(opts["optimal"]);
      add("sigma", cfg.sigma, "label noise standard deviation");
      add("tol", tol, "solver relative tolerance");
      add("damping", damping, "solver damping in (0, 1]");
      add("max-iter", max_iter, "solver iteration cap");
    }
    if (uses_fit(command)) {
      opts["fit"] = app.add_flag("--fit", cfg.fit, "report the log-log slope of the curve");
    }
    if (command == "simulate") {
      add("seeds", cfg.seeds, "datasets per sample count");
      add("seed", cfg.seed, "base seed; seed s uses base + s");
      add("svm-tol", cfg.svm_tol, "KKT tolerance of the hinge trainer");
      add("dump", cfg.dump, "write the largest first-seed design matrix (KMX)");
    }
    if (command == "estimate" || command == "fit-curve") {
      add("input", cfg.input, command == "estimate" ? "feature matrix (rows are samples)" : "curve CSV");
    }
    if (command == "fit-curve") opts["input"]->required();
    if (command == "estimate") {
      add("gram", cfg.gram, "precomputed gram matrix");
      opts["gram"]->excludes(opts["input"]);
      add("labels", cfg.labels, "label vector (+-1)");
      opts["labels"]->required();
      add("format", cfg.format, "auto | csv | kmx");
      add("kernel", cfg.kernel, "rbf | polynomial | linear");
      add("gamma", cfg.gamma, "rbf inverse variance");
      add("degree", cfg.degree, "polynomial degree");
      add("offset", cfg.offset, "polynomial offset");
      opts["normalize"] =
          app.add_flag("--normalize,!--no-normalize", normalize, "unit mean squared input norm (default on for polynomial)");
      add("range1", range1, "C1 fit range a:b (0-based, half-open)");
      add("range2", range2, "C2 fit range a:b");
      add("teacher-lambda", cfg.teacher_lambda, "regularization of the teacher fit");
      add("curves-out", cfg.curves_out, "CSV of k,C1,C2");
    }
  }

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  void finish() {
    if (given("alpha")) cfg.alpha = alpha;
    if (given("r")) cfg.r = r;
    if (given("ell")) cfg.ell = ell;
    if (given("lambda")) cfg.lambda = lambda;
    if (given("tol")) cfg.tol = tol;
    if (given("damping")) cfg.damping = damping;
    if (given("max-iter")) cfg.max_iter = max_iter;
    if (given("range1")) cfg.range1 = parse_range(range1);
    if (given("range2")) cfg.range2 = parse_range(range2);
    if (given("normalize")) cfg.normalize = normalize;
  }
};

void validate(const RunConfig& c, const std::string& help) {
  auto fail = [&](const std::string& m) { throw UsageError(m, help); };
  if (uses_schedule(c.command)) {
    if (c.method != "maxmargin" && c.method != "hinge" && c.method != "ridge") {
      fail("--method must be maxmargin, hinge or ridge");
    }
    const int rules = (c.lambda ? 1 : 0) + (c.ell ? 1 : 0) + (c.optimal ? 1 : 0);
    if (rules > 1) fail("--lambda, --ell and --optimal are mutually exclusive");
    if (c.method == "maxmargin" && rules > 0) fail("maxmargin takes no regularization flag");
    if (c.method != "maxmargin" && rules == 0) fail("--" + c.method + " needs one of --lambda, --ell, --optimal");
    if (c.optimal && c.method != "ridge") fail("--optimal is only available for ridge");
    if (c.command == "se-solve" && c.n_grid.size() != 1) fail("se-solve takes a single --n value");
  }
  if (c.command == "estimate" && c.input.empty() && c.gram.empty()) fail("estimate needs --input or --gram");
  if (c.format != "auto" && c.format != "csv" && c.format != "kmx") fail("--format must be auto, csv or kmx");
  if (c.jobs < 1) fail("--jobs must be >= 1");
}

unsigned default_jobs() {
  if (const char* env = std::getenv("KSL_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

// ---- run helpers ----

struct Failure {
  int code;
  json body;
};

json curve_summary(const LearningCurve& curve, bool fit, int& code) {
  json ns = json::array(), values = json::array(), lambdas = json::array(), errs = json::array();
  std::size_t failed = 0;
  for (const auto& p : curve.points) {
    ns.push_back(p.n);
    values.push_back(p.ok ? json(p.value) : json(nullptr));
    lambdas.push_back(std::isfinite(p.lambda) ? json(p.lambda) : json(nullptr));
    if (std::isfinite(p.std_error)) errs.push_back(p.std_error);
    if (!p.ok) {
      ++failed;
      if (p.nonconvergence) code = kExitNonConvergence;
    }
  }
  json j = {{"label", curve.label}, {"n", ns}, {"value", values}, {"lambda", lambdas}, {"failed", failed}};
  if (!errs.empty()) j["stderr"] = errs;
  if (fit) {
    if (curve.valid_points().size() >= 3) {
      j["fit"] = json::parse(curve.fit().to_json());
    } else {
      j["fit"] = nullptr;
    }
  }
  return j;
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  if (c.tol) s.tol = *c.tol;
  if (c.damping) s.damping = *c.damping;
  if (c.max_iter) s.max_iter = *c.max_iter;
  s.validate();
  return s;
}

LambdaRule lambda_rule(const RunConfig& c) {
  if (c.optimal) return LambdaRule::optimal();
  if (c.ell) return LambdaRule::decay(*c.ell);
  if (c.lambda) return LambdaRule::fixed(*c.lambda);
  return LambdaRule::fixed(0.0);
}

PowerLawModel model_of(const RunConfig& c) {
  PowerLawModel m{*c.alpha, *c.r, c.p_cut};
  m.validate();
  return m;
}

MatrixFormat matrix_format(const RunConfig& c, const std::string& path) {
  if (c.format == "csv") return MatrixFormat::Csv;
  if (c.format == "kmx") return MatrixFormat::Kmx;
  return format_from_path(path);
}

json order_json(const OrderParameters& p) { return json::parse(p.to_json()); }

json run_theory_rates(const RunConfig& c, std::ostream& out) {
  const RateReport rep = compare(*c.alpha, *c.r);
  json j = json::parse(rep.to_json());
  j["a_ridge"] = rep.a_ridge_opt;
  if (c.ell) {
    j["ell"] = *c.ell;
    j["a_ridge"] = ridge_rate(*c.alpha, *c.r, *c.ell);
    j["a_noisy_ridge"] = noisy_ridge_rate(*c.alpha, *c.r, *c.ell);
    if (*c.r <= 0.5) j["a_hinge"] = hinge_regularized_rate(*c.alpha, *c.r, *c.ell).exponent;
  }
  if (c.table) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-8s %-8s %-8s\n%-8.4g %-8.4g %-8.3f %-8.3f\n", "alpha", "r", "a_SVM", "a_r",
                  rep.alpha, rep.r, rep.a_svm, rep.a_ridge_opt);
    out << buf;
  }
  return j;
}

json run_se_solve(const RunConfig& c) {
  const Spectrum s(model_of(c));
  const SolverConfig cfg = solver_config(c);
  const double n = c.n_grid.front();
  const Method method = parse_method(c.method);
  json j;
  if (c.optimal) {
    SweepOptions opt;
    opt.solver = cfg;
    const auto [lambda, err] = optimal_ridge_error(s, n, c.sigma, opt);
    const OrderParameters p = solve_ridge(s, n, lambda, c.sigma, cfg);
    j = {{"lambda", lambda}, {"order_parameters", order_json(p)}, {"eps_g", err}};
  } else {
    const double lambda = c.ell ? std::pow(n, -*c.ell) : c.lambda.value_or(0.0);
    if (c.sigma > 0.0 && method != Method::Ridge) throw DomainError("label noise is only modelled for ridge");
    OrderParameters p;
    switch (method) {
      case Method::MaxMargin:
        p = solve_maxmargin(s, n, cfg);
        break;
      case Method::Hinge:
        p = solve_hinge_regularized(s, n, lambda, cfg);
        break;
      case Method::Ridge:
        p = solve_ridge(s, n, lambda, c.sigma, cfg);
        break;
    }
    j = {{"lambda", lambda}, {"order_parameters", order_json(p)}, {"eps_g", misclassification_error(p, c.sigma)}};
  }
  if (c.sigma > 0.0) j["eps_inf"] = residual_error(j["order_parameters"]["rho"].get<double>(), c.sigma);
  j["n"] = n;
  if (!c.out.empty()) write_file_atomic(c.out, j.dump() + "\n");
  return j;
}

json run_se_sweep(const RunConfig& c, int& code) {
  SweepOptions opt;
  opt.solver = solver_config(c);
  opt.jobs = c.jobs;
  LearningCurve curve = theory_sweep(parse_method(c.method), model_of(c), c.n_grid, lambda_rule(c), c.sigma, opt);
  if (!c.out.empty()) write_file_atomic(c.out, to_csv(curve));
  return curve_summary(curve, c.fit, code);
}

json run_simulate(const RunConfig& c, int& code) {
  const PowerLawModel model = model_of(c);
  const Spectrum s(model);
  for (const double n : c.n_grid) {
    if (n != std::floor(n)) throw DomainError("simulate: --n values must be integers");
  }
  SimulationOptions opt;
  opt.base_seed = c.seed;
  opt.jobs = c.jobs;
  opt.svm.tol = c.svm_tol;
  EmpiricalCurve curve =
      empirical_learning_curve(parse_method(c.method), s, c.n_grid, c.seeds, lambda_rule(c), c.sigma, opt);
  curve.curve.meta.alpha = model.alpha;
  curve.curve.meta.r = model.r;
  if (!c.out.empty()) write_file_atomic(c.out, to_csv(curve));
  if (!c.dump.empty()) {
    const SyntheticDataset d = sample_dataset(s, static_cast<std::size_t>(c.n_grid.back()), c.sigma, c.seed);
    write_matrix(c.dump, d.features, MatrixFormat::Kmx);
  }
  json j = curve_summary(curve.curve, c.fit, code);
  j["seeds"] = c.seeds;
  return j;
}

json run_estimate(const RunConfig& c) {
  Eigen::MatrixXd G;
  if (!c.gram.empty()) {
    G = load_matrix(c.gram, matrix_format(c, c.gram));
  } else {
    KernelSpec k;
    k.kind = parse_kernel_kind(c.kernel);
    k.gamma = c.gamma;
    k.degree = c.degree;
    k.offset = c.offset;
    k.normalize = c.normalize.value_or(k.kind == KernelSpec::Kind::Polynomial);
    G = gram_matrix(load_matrix(c.input, matrix_format(c, c.input)), k);
  }
  const Eigen::VectorXd y = load_labels(c.labels);
  GramSpectrum spec = spectral_embedding(G);
  TeacherOptions topt;
  topt.lambda = c.teacher_lambda;
  spec.teacher = fit_teacher(spec, y, topt);
  const CumulativeCurves curves = cumulative_curves(spec);
  const auto m = static_cast<std::size_t>(spec.eigenvalues.size());
  const Range r1 = auto_range(m, c.range1);
  const Range r2 = auto_range(m, c.range2);
  const CoefficientEstimate est = estimate_coefficients(curves, r1, r2);
  json j = json::parse(est.to_json());
  j["m"] = m;
  j["clipped_modes"] = spec.clipped_modes;
  j["range1"] = {r1.first, r1.second};
  j["range2"] = {r2.first, r2.second};
  if (!c.out.empty()) write_file_atomic(c.out, j.dump() + "\n");
  if (!c.curves_out.empty()) write_file_atomic(c.curves_out, cumulative_csv(curves));
  return j;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

json run_fit_curve(const RunConfig& c) {
  std::istringstream in(read_file(c.input));
  std::string line;
  if (!std::getline(in, line)) throw IoError(c.input + ": empty curve file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "n" || header[1] != "value") {
    throw IoError(c.input + ": header must start with n,value");
  }
  const auto seed_col = std::find(header.begin(), header.end(), "seed") - header.begin();
  std::vector<double> xs, ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw IoError(c.input + ":" + std::to_string(line_no) + ": wrong field count");
    // Per-seed records are skipped; only aggregate rows define the curve.
    if (seed_col < static_cast<std::ptrdiff_t>(f.size()) && !f[static_cast<std::size_t>(seed_col)].empty()) continue;
    xs.push_back(parse_number(f[0], "n"));
    ys.push_back(parse_number(f[1], "value"));
  }
  const PowerLawFit fit = fit_powerlaw(xs, ys, 0, xs.size());
  json j = json::parse(fit.to_json());
  j["points"] = xs.size();
  if (!c.out.empty()) write_file_atomic(c.out, j.dump() + "\n");
  return j;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw UsageError("empty grid", usage_text());
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 || parts[2].size() < 2) throw UsageError("grid must be start:stop:xF or start:stop:+s", usage_text());
    const double start = parse_number(parts[0], "grid start");
    const double stop = parse_number(parts[1], "grid stop");
    const double step = parse_number(parts[2].substr(1), "grid step");
    if (stop < start) throw UsageError("grid stop is below start", usage_text());
    if (parts[2][0] == 'x') {
      if (!(step > 1.0) || !(start > 0.0)) throw UsageError("geometric grid needs start > 0 and factor > 1", usage_text());
      // Integer stepping avoids drift in the accumulated product.
      for (int i = 0;; ++i) {
        const double v = start * std::pow(step, i);
        if (v > stop * (1.0 + 1e-12)) break;
        out.push_back(std::abs(v - std::round(v)) <= 1e-9 * v ? std::round(v) : v);
      }
    } else if (parts[2][0] == '+') {
      if (!(step > 0.0)) throw UsageError("arithmetic grid needs step > 0", usage_text());
      for (int i = 0;; ++i) {
        const double v = start + step * i;
        if (v > stop + 1e-12 * std::max(1.0, std::abs(stop))) break;
        out.push_back(v);
      }
    } else {
      throw UsageError("grid step must start with x or +", usage_text());
    }
  } else {
    for (const auto& f : split(text, ',')) out.push_back(parse_number(f, "grid value"));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw UsageError("grid must be strictly increasing", usage_text());
  }
  return out;
}

Range parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("range must be a:b", usage_text());
  const double a = parse_number(parts[0], "range start");
  const double b = parse_number(parts[1], "range end");
  if (a < 0 || b <= a || a != std::floor(a) || b != std::floor(b)) {
    throw UsageError("range must be integers with 0 <= a < b", usage_text());
  }
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.size() < 2) throw UsageError("missing command", usage_text());
  const std::string& command = args[1];
  if (command == "-h" || command == "--help") throw HelpRequested(usage_text());
  if (!has(kCommands, command)) throw UsageError("unknown command '" + command + "'", usage_text());

  RunConfig cfg;
  cfg.command = command;
  cfg.jobs = default_jobs();
  CLI::App app("ksl " + command, "ksl " + command);
  app.set_config("--config", "", "plain-text key=value file; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Binder binder(app, cfg);
  binder.bind(command);

  std::vector<std::string> rest(args.begin() + 2, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), app.help());
  }
  binder.finish();
  if (!cfg.n_spec.empty()) cfg.n_grid = parse_grid(cfg.n_spec);
  validate(cfg, app.help());
  return cfg;
}

RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return parse_args(args);
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  try {
    json j;
    if (c.command == "theory-rates") {
      j = run_theory_rates(c, out);
      if (c.table) {
        if (!c.out.empty()) write_file_atomic(c.out, j.dump() + "\n");
        return kExitOk;
      }
      if (!c.out.empty()) write_file_atomic(c.out, j.dump() + "\n");
    } else if (c.command == "se-solve") {
      j = run_se_solve(c);
    } else if (c.command == "se-sweep") {
      j = run_se_sweep(c, code);
    } else if (c.command == "simulate") {
      j = run_simulate(c, code);
    } else if (c.command == "estimate") {
      j = run_estimate(c);
    } else if (c.command == "fit-curve") {
      j = run_fit_curve(c);
    } else {
      throw DomainError("unknown command '" + c.command + "'");
    }
    json summary = {{"command", c.command}, {"status", code == kExitOk ? "ok" : "partial"}, {"result", j}};
    if (!c.out.empty()) summary["output"] = c.out;
    summary["config"] = json::parse(c.to_json());
    out << summary.dump() << "\n";
    return code;
  } catch (const ConvergenceError& e) {
    err << json{{"error", "nonconvergence"}, {"message", e.what()}, {"residuals", e.residuals()}}.dump() << "\n";
    return kExitNonConvergence;
  } catch (const DomainError& e) {
    err << json{{"error", "domain"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomain;
  } catch (const IoError& e) {
    err << json{{"error", "io"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomain;
  } catch (const UsageError& e) {
    err << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomain;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n" << e.help();
    return kExitDomain;
  }
  return run(cfg, out, err);
}

// ---- RunConfig serialization ----

std::string RunConfig::to_json() const {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  auto range = [](const std::optional<Range>& r) { return r ? json::array({r->first, r->second}) : json(nullptr); };
  const json j = {{"command", command},
                  {"method", method},
                  {"alpha", opt(alpha)},
                  {"r", opt(r)},
                  {"p_cut", p_cut},
                  {"n_spec", n_spec},
                  {"n_grid", n_grid},
                  {"lambda", opt(lambda)},
                  {"ell", opt(ell)},
                  {"optimal", optimal},
                  {"sigma", sigma},
                  {"seeds", seeds},
                  {"seed", seed},
                  {"tol", opt(tol)},
                  {"damping", opt(damping)},
                  {"max_iter", opt(max_iter)},
                  {"svm_tol", svm_tol},
                  {"fit", fit},
                  {"table", table},
                  {"jobs", jobs},
                  {"out", out},
                  {"input", input},
                  {"gram", gram},
                  {"labels", labels},
                  {"format", format},
                  {"curves_out", curves_out},
                  {"dump", dump},
                  {"kernel", kernel},
                  {"gamma", gamma},
                  {"degree", degree},
                  {"offset", offset},
                  {"normalize", opt(normalize)},
                  {"range1", range(range1)},
                  {"range2", range(range2)},
                  {"teacher_lambda", teacher_lambda}};
  return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  auto get_opt = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<typename std::decay_t<decltype(field)>::value_type>();
  };
  auto get_range = [&](const char* key, std::optional<Range>& field) {
    if (j.contains(key) && !j[key].is_null()) field = Range{j[key][0].get<std::size_t>(), j[key][1].get<std::size_t>()};
  };
  get("command", c.command);
  get("method", c.method);
  get_opt("alpha", c.alpha);
  get_opt("r", c.r);
  get("p_cut", c.p_cut);
  get("n_spec", c.n_spec);
  get("n_grid", c.n_grid);
  get_opt("lambda", c.lambda);
  get_opt("ell", c.ell);
  get("optimal", c.optimal);
  get("sigma", c.sigma);
  get("seeds", c.seeds);
  get("seed", c.seed);
  get_opt("tol", c.tol);
  get_opt("damping", c.damping);
  get_opt("max_iter", c.max_iter);
  get("svm_tol", c.svm_tol);
  get("fit", c.fit);
  get("table", c.table);
  get("jobs", c.jobs);
  get("out", c.out);
  get("input", c.input);
  get("gram", c.gram);
  get("labels", c.labels);
  get("format", c.format);
  get("curves_out", c.curves_out);
  get("dump", c.dump);
  get("kernel", c.kernel);
  get("gamma", c.gamma);
  get("degree", c.degree);
  get("offset", c.offset);
  get_opt("normalize", c.normalize);
  get_range("range1", c.range1);
  get_range("range2", c.range2);
  get("teacher_lambda", c.teacher_lambda);
  return c;
}

std::vector<std::string> RunConfig::to_args() const {
  const RunConfig d;
  std::vector<std::string> a = {command};
  auto push = [&](const std::string& flag, const std::string& value) {
    a.push_back("--" + flag);
    a.push_back(value);
  };
  auto range = [](const Range& r) { return std::to_string(r.first) + ":" + std::to_string(r.second); };
  push("jobs", std::to_string(jobs));
  if (!out.empty()) push("out", out);
  if (alpha) push("alpha", fmt(*alpha));
  if (r) push("r", fmt(*r));
  if (ell) push("ell", fmt(*ell));
  if (table) a.push_back("--table");
  if (method != d.method) push("method", method);
  if (p_cut != d.p_cut) push("p-cut", std::to_string(p_cut));
  if (!n_spec.empty()) {
    push("n", n_spec);
  } else if (!n_grid.empty()) {
    std::string s;
    for (std::size_t i = 0; i < n_grid.size(); ++i) s += (i ? "," : "") + fmt(n_grid[i]);
    push("n", s);
  }
  if (lambda) push("lambda", fmt(*lambda));
  if (optimal) a.push_back("--optimal");
  if (sigma != d.sigma) push("sigma", fmt(sigma));
  if (tol) push("tol", fmt(*tol));
  if (damping) push("damping", fmt(*damping));
  if (max_iter) push("max-iter", std::to_string(*max_iter));
  if (fit) a.push_back("--fit");
  if (seeds != d.seeds) push("seeds", std::to_string(seeds));
  if (seed != d.seed) push("seed", std::to_string(seed));
  if (svm_tol != d.svm_tol) push("svm-tol", fmt(svm_tol));
  if (!dump.empty()) push("dump", dump);
  if (!input.empty()) push("input", input);
  if (!gram.empty()) push("gram", gram);
  if (!labels.empty()) push("labels", labels);
  if (format != d.format) push("format", format);
  if (kernel != d.kernel) push("kernel", kernel);
  if (gamma != d.gamma) push("gamma", fmt(gamma));
  if (degree != d.degree) push("degree", std::to_string(degree));
  if (offset != d.offset) push("offset", fmt(offset));
  if (normalize) a.push_back(*normalize ? "--normalize" : "--no-normalize");
  if (range1) push("range1", range(*range1));
  if (range2) push("range2", range(*range2));
  if (teacher_lambda != d.teacher_lambda) push("teacher-lambda", fmt(teacher_lambda));
  if (!curves_out.empty()) push("curves-out", curves_out);
  return a;
}

}  // namespace ksl::cli
