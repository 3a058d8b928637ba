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

#include "ksl/estimation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include <lapacke.h>

#include "json.hpp"

#include "ksl/errors.hpp"
#include "ksl/io.hpp"
#include "ksl/simulator.hpp"

namespace ksl {

namespace {

constexpr std::array<char, 4> kMagic = {'K', 'M', 'X', '1'};

std::uint64_t read_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, const std::string& where) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError(where + ": cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(v)) throw IoError(where + ": non-finite entry");
  return v;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string_view line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t f = 0;
    while (true) {
      const std::size_t comma = line.find(',', f);
      const std::string_view field = line.substr(f, comma == std::string_view::npos ? line.size() - f : comma - f);
      row.push_back(parse_double(field, path + ":" + std::to_string(line_no)));
      if (comma == std::string_view::npos) break;
      f = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> sorted_descending_clipped(Eigen::VectorXd w, std::size_t& clipped) {
  std::vector<double> out(w.data(), w.data() + w.size());
  std::reverse(out.begin(), out.end());
  clipped = 0;
  for (double& v : out) {
    if (v < 0.0) {
      v = 0.0;
      ++clipped;
    }
  }
  return out;
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "kmx") return MatrixFormat::Kmx;
  }
  return MatrixFormat::Csv;
}

Eigen::MatrixXd load_matrix(const std::string& path, MatrixFormat format) {
  const std::string bytes = read_file(path);
  if (format == MatrixFormat::Csv) {
    const auto rows = parse_csv(bytes, path);
    if (rows.empty()) throw IoError(path + ": empty matrix");
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) {
        throw IoError(path + ": dimension mismatch, row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " columns, expected " + std::to_string(cols));
      }
      for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
  }
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw IoError(path + ": malformed header (expected KMX1 magic and two u64 dimensions)");
  }
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = read_u64_le(u + 4);
  const std::uint64_t cols = read_u64_le(u + 12);
  const std::uint64_t payload = bytes.size() - 20;
  if (cols != 0 && rows > payload / 8 / cols) {
    throw IoError(path + ": dimension mismatch, header declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " but payload holds " + std::to_string(payload / 8) + " values");
  }
  if (rows * cols * 8 != payload) {
    throw IoError(path + ": dimension mismatch, header declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " but payload has " + std::to_string(payload) + " bytes");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      const double v = std::bit_cast<double>(read_u64_le(u + 20 + 8 * (i * cols + j)));
      if (!std::isfinite(v)) throw IoError(path + ": non-finite entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& matrix, MatrixFormat format) {
  if (!matrix.allFinite()) throw IoError("write_matrix: non-finite entry");
  std::string out;
  if (format == MatrixFormat::Csv) {
    char buf[32];
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        if (j > 0) out.push_back(',');
        const auto res = std::to_chars(buf, buf + sizeof buf, matrix(i, j));
        out.append(buf, res.ptr);
      }
      out.push_back('\n');
    }
  } else {
    out.append(kMagic.data(), kMagic.size());
    append_u64_le(out, static_cast<std::uint64_t>(matrix.rows()));
    append_u64_le(out, static_cast<std::uint64_t>(matrix.cols()));
    out.reserve(out.size() + static_cast<std::size_t>(matrix.size()) * 8);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < matrix.cols(); ++j) append_u64_le(out, std::bit_cast<std::uint64_t>(matrix(i, j)));
    }
  }
  write_file_atomic(path, out);
}

Eigen::VectorXd load_labels(const std::string& path) {
  const Eigen::MatrixXd m = load_matrix(path, MatrixFormat::Csv);
  if (m.rows() != 1 && m.cols() != 1) throw IoError(path + ": labels must be a single row or column");
  Eigen::VectorXd y = m.reshaped();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) throw IoError(path + ": labels must be +1 or -1");
  }
  return y;
}

void KernelSpec::validate() const {
  if (kind == Kind::Rbf && !(gamma >= 0.0 && std::isfinite(gamma))) {
    throw DomainError("KernelSpec: rbf gamma must be finite and >= 0");
  }
  if (kind == Kind::Polynomial && degree < 1) throw DomainError("KernelSpec: polynomial degree must be >= 1");
  if (!std::isfinite(offset)) throw DomainError("KernelSpec: offset must be finite");
}

KernelSpec::Kind parse_kernel_kind(const std::string& text) {
  if (text == "rbf") return KernelSpec::Kind::Rbf;
  if (text == "polynomial" || text == "poly") return KernelSpec::Kind::Polynomial;
  if (text == "linear") return KernelSpec::Kind::Linear;
  throw DomainError("unknown kernel '" + text + "' (expected rbf, polynomial or linear)");
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& input, const KernelSpec& kernel) {
  kernel.validate();
  if (input.rows() < 2) throw DomainError("gram_matrix: need at least 2 samples");
  if (!input.allFinite()) throw DomainError("gram_matrix: non-finite input");
  Eigen::MatrixXd X = input;
  if (kernel.normalize) {
    const double ms = X.rowwise().squaredNorm().mean();
    if (ms > 0.0) X /= std::sqrt(ms);
  }
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd dot = Eigen::MatrixXd::Zero(m, m);
  dot.selfadjointView<Eigen::Lower>().rankUpdate(X);
  dot.triangularView<Eigen::StrictlyUpper>() = dot.transpose();
  Eigen::MatrixXd G(m, m);
  switch (kernel.kind) {
    case KernelSpec::Kind::Linear:
      G = dot;
      break;
    case KernelSpec::Kind::Polynomial:
      G = (dot.array() + kernel.offset).pow(static_cast<double>(kernel.degree)).matrix();
      break;
    case KernelSpec::Kind::Rbf: {
      const Eigen::VectorXd sq = dot.diagonal();
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
          const double d2 = i == j ? 0.0 : std::max(0.0, sq[i] + sq[j] - 2.0 * dot(i, j));
          G(i, j) = std::exp(-kernel.gamma * d2);
        }
      }
      break;
    }
  }
  if (!G.allFinite()) throw DomainError("gram_matrix: non-finite kernel values");
  return G;
}

GramSpectrum spectral_embedding(const Eigen::MatrixXd& G) {
  const Eigen::Index m = G.rows();
  if (m < 1 || G.cols() != m) throw DomainError("spectral_embedding: gram must be square");
  const double scale = std::max(G.cwiseAbs().maxCoeff(), 1e-300);
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("spectral_embedding: gram is not symmetric");
  }
  Eigen::MatrixXd a = G / static_cast<double>(m);
  Eigen::VectorXd w(m);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(m), a.data(), static_cast<lapack_int>(m), w.data());
  if (info != 0) throw ConvergenceError("spectral_embedding: eigensolver failed (info " + std::to_string(info) + ")", {});
  GramSpectrum out;
  const std::vector<double> omega = sorted_descending_clipped(w, out.clipped_modes);
  out.eigenvalues = Eigen::Map<const Eigen::VectorXd>(omega.data(), m);
  out.embedding.resize(m, m);
  const double root_m = std::sqrt(static_cast<double>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    out.embedding.col(k) = a.col(m - 1 - k) * (root_m * std::sqrt(out.eigenvalues[k]));
  }
  return out;
}

Eigen::VectorXd fit_teacher(const GramSpectrum& spectrum, const Eigen::VectorXd& labels, const TeacherOptions& options) {
  const Eigen::MatrixXd& psi = spectrum.embedding;
  if (labels.size() != psi.rows()) throw DomainError("fit_teacher: label count differs from sample count");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) throw DomainError("fit_teacher: labels must be +1 or -1");
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(psi.rows(), psi.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(psi);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  SvmOptions svm;
  svm.tol = options.tol;
  svm.max_sweeps = options.max_sweeps;
  const LinearClassifier c = train_svm_gram(gram, labels, options.lambda, svm);
  const Eigen::VectorXd theta = psi.transpose() * c.dual_coeffs->cwiseProduct(labels);
  const Eigen::VectorXd score = psi * theta;
  std::size_t violations = 0;
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    if ((score[i] >= 0.0 ? 1.0 : -1.0) != labels[i]) ++violations;
  }
  if (violations > 0) {
    throw DomainError("fit_teacher: labels not separated, " + std::to_string(violations) + " violations");
  }
  return theta;
}

CumulativeCurves cumulative_curves(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& teacher) {
  if (eigenvalues.size() != teacher.size()) throw DomainError("cumulative_curves: teacher length differs");
  const auto m = static_cast<std::size_t>(eigenvalues.size());
  CumulativeCurves out;
  out.c1.assign(m, 0.0);
  out.c2.assign(m, 0.0);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    const auto i = static_cast<Eigen::Index>(k);
    s1 += eigenvalues[i];
    s2 += eigenvalues[i] * teacher[i] * teacher[i];
    out.c1[k] = s1;
    out.c2[k] = s2;
  }
  return out;
}

CumulativeCurves cumulative_curves(const GramSpectrum& spectrum) {
  if (spectrum.teacher.size() != spectrum.eigenvalues.size()) {
    throw DomainError("cumulative_curves: spectrum has no fitted teacher");
  }
  return cumulative_curves(spectrum.eigenvalues, spectrum.teacher);
}

std::pair<std::size_t, std::size_t> auto_range(std::size_t length,
                                               std::optional<std::pair<std::size_t, std::size_t>> override) {
  if (override) return *override;
  if (length < 30) throw DomainError("auto_range: sequence shorter than 30");
  return {length * 5 / 100, length * 70 / 100};
}

CoefficientEstimate estimate_coefficients(const CumulativeCurves& curves, std::pair<std::size_t, std::size_t> range1,
                                          std::pair<std::size_t, std::size_t> range2) {
  std::vector<double> k1(curves.c1.size()), k2(curves.c2.size());
  for (std::size_t i = 0; i < k1.size(); ++i) k1[i] = static_cast<double>(i + 1);
  for (std::size_t i = 0; i < k2.size(); ++i) k2[i] = static_cast<double>(i + 1);
  CoefficientEstimate est;
  est.fit_c1 = fit_powerlaw(k1, curves.c1, range1.first, range1.second);
  est.fit_c2 = fit_powerlaw(k2, curves.c2, range2.first, range2.second);
  est.alpha_hat = 1.0 - est.fit_c1.slope;
  est.r_hat = -est.fit_c2.slope / (2.0 * est.alpha_hat);
  est.outside_domain = !(est.alpha_hat > 1.0);
  if (!est.outside_domain && est.r_hat >= 0.0) est.predicted = compare(est.alpha_hat, est.r_hat);
  return est;
}

CoefficientEstimate estimate_coefficients(const GramSpectrum& spectrum, std::pair<std::size_t, std::size_t> range1,
                                          std::pair<std::size_t, std::size_t> range2) {
  return estimate_coefficients(cumulative_curves(spectrum), range1, range2);
}

std::string CoefficientEstimate::to_json() const {
  nlohmann::json j = {{"alpha_hat", alpha_hat},
                      {"r_hat", r_hat},
                      {"fit_c1", nlohmann::json::parse(fit_c1.to_json())},
                      {"fit_c2", nlohmann::json::parse(fit_c2.to_json())},
                      {"outside_domain", outside_domain}};
  j["predicted"] = predicted ? nlohmann::json::parse(predicted->to_json()) : nlohmann::json(nullptr);
  return j.dump();
}

std::string cumulative_csv(const CumulativeCurves& curves) {
  std::string out = "k,C1,C2\n";
  char buf[128];
  for (std::size_t k = 0; k < curves.c1.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k + 1, curves.c1[k], curves.c2[k]);
    out += buf;
  }
  return out;
}

}  // namespace ksl
