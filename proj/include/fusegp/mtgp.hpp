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

#ifndef FUSEGP_MTGP_HPP_
#define FUSEGP_MTGP_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fusegp/gp.hpp"

namespace fusegp {

/// Stacked response/covariance ordering of the multi-task model. Task-major:
/// index g * n + i addresses observation i of task g.
inline constexpr std::string_view kTaskMajor = "task-major";

/// Task covariance used by the multi-task model; identity when the factor is
/// empty (single task without an explicit factor).
Eigen::MatrixXd task_matrix(const Hyperparams& hp);

/// kron(C_T, S) + nugget * I over the task-major stacking, where S is the
/// signal covariance of the shared base kernel.
Eigen::MatrixXd assemble_cmt(const Eigen::MatrixXd& x, std::span<const int> source,
                             const Hyperparams& hp);

/// Negative log marginal likelihood of the stacked responses (any G >= 1).
double nll_mt(const Hyperparams& hp, const GpData& data);
double nll_mt_with_grad(const Hyperparams& hp, const GpData& data, Eigen::VectorXd& grad);

struct MultiTaskPrediction {
  Eigen::VectorXd mean;        // one entry per task
  Eigen::MatrixXd covariance;  // G x G joint predictive covariance

  PredictiveDistribution task(int g) const {
    return {mean(g), covariance(g, g)};
  }
};

/// Fitted multi-task GP. Immutable after construction.
class MultiTaskModel {
 public:
  static MultiTaskModel from_hyperparams(GpData data, Hyperparams hp);

  const GpData& data() const { return data_; }
  const Hyperparams& hyperparams() const { return hp_; }
  TaskCov task_covariance() const { return {task_matrix(hp_)}; }
  /// C_T(0,1) / sqrt(C_T(0,0) C_T(1,1)).
  double task_correlation() const;
  const std::optional<OptResult>& opt_result() const { return opt_; }
  int source_index(std::string_view label) const;

  /// Joint prediction in response units; marginal variances clamped at 0.
  MultiTaskPrediction predict(const Eigen::VectorXd& xstar, int source = 0) const;
  MultiTaskPrediction predict_standardized(const Eigen::VectorXd& xstar,
                                           int source = 0) const;

 private:
  friend MultiTaskModel fit_mt(const GpData& data, const FitOptions& options);

  GpData data_;
  Hyperparams hp_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  std::optional<OptResult> opt_;
};

/// Joint fit of (omega, sigma2, beta_g, nugget, z?, L_T) for G = 2 tasks,
/// with L_T started at the identity.
MultiTaskModel fit_mt(const GpData& data, const FitOptions& options = {});

}  // namespace fusegp

#endif  // FUSEGP_MTGP_HPP_
