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

#ifndef FUSEGP_KERNELS_HPP_
#define FUSEGP_KERNELS_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fusegp {

/// Kernel and mean hyperparameters shared by the single- and multi-task GPs.
///
/// `omega` holds log10 inverse squared lengthscales over normalized inputs.
/// `beta` has one constant mean per task. `z` is the latent coordinate of the
/// second source (the first is pinned at 0) and is only set for fused models.
/// `task_factor` is the lower-triangular factor of the task covariance and is
/// empty for single-output models.
struct Hyperparams {
  Eigen::VectorXd omega;
  double sigma2 = 1.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(1);
  double nugget = 1e-4;
  std::optional<double> z;
  Eigen::MatrixXd task_factor;

  int tasks() const { return static_cast<int>(beta.size()); }
  bool fused() const { return z.has_value(); }
  /// Throws kInvalidArgument when an invariant is broken.
  void validate() const;
};

/// exp(-sum_i 10^omega_i (x_i - x2_i)^2).
double rbf_corr(std::span<const double> x, std::span<const double> x2,
                std::span<const double> omega);

/// Two-source latent embedding: labels[0] -> 0, labels[1] -> z.
class SourceEmbedding {
 public:
  SourceEmbedding(std::vector<std::string> labels, double z);

  /// exp(-(latent(s) - latent(s2))^2).
  double corr(std::string_view s, std::string_view s2) const;
  int index(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }
  double z() const { return z_; }

 private:
  std::vector<std::string> labels_;
  double z_;
};

/// Source correlation on integer source indices (0 or 1).
inline double source_corr(int s, int s2, double z) {
  return s == s2 ? 1.0 : std::exp(-z * z);
}

/// sigma2 * r(x_i, x_j) * source_corr, no nugget. `source` is empty for
/// non-fused inputs.
Eigen::MatrixXd signal_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                              const Hyperparams& hp);

/// signal_matrix + nugget * I.
Eigen::MatrixXd cov_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                           const Hyperparams& hp);

/// Signal covariance between one query point and every training row.
Eigen::VectorXd cross_cov(const Eigen::MatrixXd& x, std::span<const int> source,
                          const Eigen::VectorXd& xstar, int sstar,
                          const Hyperparams& hp);

/// Contractions sum_ij W_ij dS_ij / dtheta for the signal part S, returned as
/// [d/d omega_0 .. d/d omega_{d-1}, d/d log10 sigma2, d/d z (fused only)].
/// W must be symmetric n x n.
Eigen::VectorXd signal_gradient_contractions(const Eigen::MatrixXd& x,
                                             std::span<const int> source,
                                             const Hyperparams& hp,
                                             const Eigen::MatrixXd& w);

struct TaskCov {
  Eigen::MatrixXd matrix;

  double correlation(int g, int g2) const {
    return matrix(g, g2) / std::sqrt(matrix(g, g) * matrix(g2, g2));
  }
};

/// C_T = L L^T for a lower-triangular L with strictly positive diagonal.
TaskCov task_cov(const Eigen::MatrixXd& factor);

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace fusegp

#endif  // FUSEGP_KERNELS_HPP_
