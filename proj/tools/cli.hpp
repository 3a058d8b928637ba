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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ksl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitNonConvergence = 2;

// Bad command line; carries the help text of the offending command.
class UsageError : public std::invalid_argument {
 public:
  UsageError(const std::string& what, std::string help) : std::invalid_argument(what), help_(std::move(help)) {}
  const std::string& help() const noexcept { return help_; }

 private:
  std::string help_;
};

// --help was requested; carries the text to print.
class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

using Range = std::pair<std::size_t, std::size_t>;

struct RunConfig {
  std::string command;

  // Model.
  std::string method = "maxmargin";
  std::optional<double> alpha;
  std::optional<double> r;
  std::size_t p_cut = 10000;

  // Schedule.
  std::string n_spec;
  std::vector<double> n_grid;
  std::optional<double> lambda;
  std::optional<double> ell;
  bool optimal = false;
  double sigma = 0.0;
  std::size_t seeds = 40;
  std::uint64_t seed = 1;

  // Solver overrides.
  std::optional<double> tol;
  std::optional<double> damping;
  std::optional<std::size_t> max_iter;
  double svm_tol = 1e-6;

  bool fit = false;
  bool table = false;
  unsigned jobs = 1;

  // IO.
  std::string out;
  std::string input;
  std::string gram;
  std::string labels;
  std::string format = "auto";
  std::string curves_out;
  std::string dump;

  // Estimation.
  std::string kernel = "rbf";
  double gamma = 1.0;
  int degree = 5;
  double offset = 1.0;
  std::optional<bool> normalize;
  std::optional<Range> range1;
  std::optional<Range> range2;
  double teacher_lambda = 1e-6;

  bool operator==(const RunConfig&) const = default;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  // Flags that parse_args maps back to this config (argv[0] excluded).
  std::vector<std::string> to_args() const;
};

// `start:stop:xF` (geometric), `start:stop:+s` (arithmetic), a comma list, or
// a single value. Throws UsageError.
std::vector<double> parse_grid(const std::string& text);
Range parse_range(const std::string& text);

// argv[1] is the command. Flags override `--config FILE` entries. The
// default for --jobs comes from KSL_JOBS. Throws UsageError, or
// HelpRequested for --help.
RunConfig parse_args(const std::vector<std::string>& args);
RunConfig parse_args(int argc, const char* const* argv);

// Executes a validated config: artifacts are written atomically, a one-line
// JSON summary goes to `out`, JSON errors go to `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args then run, mapping usage errors to exit 1 with help text.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ksl::cli
