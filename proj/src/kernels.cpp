// Copyright 2026 The fusegp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fusegp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

constexpr double kLn10 = std::numbers::ln10;

void check_source(const Eigen::MatrixXd& x, std::span<const int> source) {
  if (!source.empty() && static_cast<Eigen::Index>(source.size()) != x.rows()) {
    fail(ErrorKind::kInvalidArgument, "source labels do not match input rows");
  }
}

Eigen::ArrayXd rate_of(const Hyperparams& hp) {
  return Eigen::pow(10.0, hp.omega.array());
}

}  // namespace

void Hyperparams::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    fail(ErrorKind::kInvalidArgument, "sigma2 must be positive and finite");
  }
  if (!(nugget >= 0.0) || !std::isfinite(nugget)) {
    fail(ErrorKind::kInvalidArgument, "nugget must be nonnegative and finite");
  }
  if (!omega.allFinite() || !beta.allFinite()) {
    fail(ErrorKind::kInvalidArgument, "omega and beta must be finite");
  }
  if (beta.size() < 1) fail(ErrorKind::kInvalidArgument, "beta needs at least one task");
  if (z && !std::isfinite(*z)) fail(ErrorKind::kInvalidArgument, "z must be finite");
  if (tasks() > 1 || task_factor.size() > 0) {
    if (task_factor.rows() != tasks() || task_factor.cols() != tasks()) {
      fail(ErrorKind::kInvalidArgument, "task_factor must be G x G");
    }
    for (Eigen::Index g = 0; g < task_factor.rows(); ++g) {
      if (!(task_factor(g, g) > 0.0)) {
        fail(ErrorKind::kInvalidArgument, "task_factor needs a positive diagonal");
      }
    }
  }
}

double rbf_corr(std::span<const double> x, std::span<const double> x2,
                std::span<const double> omega) {
  if (x.size() != x2.size() || x.size() != omega.size()) {
    fail(ErrorKind::kInvalidArgument, "rbf_corr: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x2[i];
    acc += std::pow(10.0, omega[i]) * d * d;
  }
  return std::exp(-acc);
}

SourceEmbedding::SourceEmbedding(std::vector<std::string> labels, double z)
    : labels_(std::move(labels)), z_(z) {
  if (labels_.size() > 2) {
    fail(ErrorKind::kInvalidArgument, "more than 2 sources are not supported");
  }
}

int SourceEmbedding::index(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    fail(ErrorKind::kInvalidArgument, "unknown source '" + std::string(label) + "'");
  }
  return static_cast<int>(it - labels_.begin());
}

double SourceEmbedding::corr(std::string_view s, std::string_view s2) const {
  return source_corr(index(s), index(s2), z_);
}

Eigen::MatrixXd signal_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                              const Hyperparams& hp) {
  check_source(x, source);
  if (hp.omega.size() != x.cols()) {
    fail(ErrorKind::kInvalidArgument, "omega size does not match input dimension");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::ArrayXd rate = rate_of(hp);
  const double cross = hp.z ? std::exp(-*hp.z * *hp.z) : 1.0;
  const bool fused = !source.empty() && hp.z.has_value();
  Eigen::MatrixXd s(n, n);
  // Each (i, j >= i) entry is written by exactly one thread.
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = hp.sigma2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        acc += rate(k) * diff * diff;
      }
      double v = hp.sigma2 * std::exp(-acc);
      if (fused && source[static_cast<std::size_t>(i)] != source[static_cast<std::size_t>(j)]) {
        v *= cross;
      }
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  if (!s.allFinite()) fail(ErrorKind::kNumerical, "non-finite covariance entry");
  return s;
}

Eigen::MatrixXd cov_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                           const Hyperparams& hp) {
  Eigen::MatrixXd c = signal_matrix(x, source, hp);
  c.diagonal().array() += hp.nugget;
  return c;
}

Eigen::VectorXd cross_cov(const Eigen::MatrixXd& x, std::span<const int> source,
                          const Eigen::VectorXd& xstar, int sstar,
                          const Hyperparams& hp) {
  check_source(x, source);
  if (xstar.size() != x.cols() || hp.omega.size() != x.cols()) {
    fail(ErrorKind::kInvalidArgument, "cross_cov: dimension mismatch");
  }
  const Eigen::ArrayXd rate = rate_of(hp);
  const bool fused = !source.empty() && hp.z.has_value();
  const double cross = fused ? std::exp(-*hp.z * *hp.z) : 1.0;
  Eigen::VectorXd k(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double acc = (rate * (x.row(i).transpose() - xstar).array().square()).sum();
    double v = hp.sigma2 * std::exp(-acc);
    if (fused && source[static_cast<std::size_t>(i)] != sstar) v *= cross;
    k(i) = v;
  }
  return k;
}

Eigen::VectorXd signal_gradient_contractions(const Eigen::MatrixXd& x,
                                             std::span<const int> source,
                                             const Hyperparams& hp,
                                             const Eigen::MatrixXd& w) {
  check_source(x, source);
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (w.rows() != n || w.cols() != n) {
    fail(ErrorKind::kInvalidArgument, "weight matrix must be n x n");
  }
  const bool fused = !source.empty() && hp.z.has_value();
  const Eigen::Index np = d + 1 + (hp.z ? 1 : 0);
  const Eigen::ArrayXd rate = rate_of(hp);
  const double z = hp.z.value_or(0.0);
  const double cross = std::exp(-z * z);
  // Per-row partial sums, reduced serially afterwards so that the result does
  // not depend on the thread count.
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(np, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    auto out = partial.col(i);
    out(d) += w(i, i) * hp.sigma2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        acc += rate(k) * diff * diff;
      }
      double sij = hp.sigma2 * std::exp(-acc);
      const bool differ =
          fused && source[static_cast<std::size_t>(i)] != source[static_cast<std::size_t>(j)];
      if (differ) sij *= cross;
      // Off-diagonal pairs appear twice in the symmetric sum.
      const double ws = (w(i, j) + w(j, i)) * sij;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        out(k) -= ws * kLn10 * rate(k) * diff * diff;
      }
      out(d) += ws;
      if (differ) out(d + 1) -= ws * 2.0 * z;
    }
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
  for (Eigen::Index i = 0; i < n; ++i) grad += partial.col(i);
  grad(d) *= kLn10;
  return grad;
}

TaskCov task_cov(const Eigen::MatrixXd& factor) {
  if (factor.rows() != factor.cols() || factor.rows() == 0) {
    fail(ErrorKind::kInvalidArgument, "task factor must be square");
  }
  for (Eigen::Index g = 0; g < factor.rows(); ++g) {
    if (!(factor(g, g) > 0.0)) {
      fail(ErrorKind::kInvalidArgument, "task factor needs a positive diagonal");
    }
  }
  const Eigen::MatrixXd lower = factor.triangularView<Eigen::Lower>();
  return {lower * lower.transpose()};
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index p = b.rows();
  const Eigen::Index q = b.cols();
  Eigen::MatrixXd out(a.rows() * p, a.cols() * q);
#pragma omp parallel for collapse(2) schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * p, j * q, p, q) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace fusegp
