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

#ifndef FUSEGP_GP_HPP_
#define FUSEGP_GP_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fusegp/dataset.hpp"
#include "fusegp/hyperopt.hpp"
#include "fusegp/kernels.hpp"

namespace fusegp {

/// Training data in model units: inputs normalized, responses standardized.
/// `y` has one column per task. `source` is empty for non-fused data; when
/// set, it indexes into `source_labels` (at most two labels).
/// `spec` maps model units back to raw units and names features/responses.
struct GpData {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  std::vector<int> source;
  std::vector<std::string> source_labels;
  NormalizationSpec spec;

  bool fused() const { return !source.empty(); }
  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index dims() const { return x.cols(); }
  Eigen::Index tasks() const { return y.cols(); }

  /// Wraps raw matrices with an identity spec (features x0.., responses y0..).
  static GpData make(Eigen::MatrixXd x, Eigen::MatrixXd y,
                     std::vector<int> source = {},
                     std::vector<std::string> source_labels = {});
  /// Selects response columns by name from normalized process data. With
  /// `fused` false, source indices are dropped and the data must hold a
  /// single material.
  static GpData from(const NormalizedData& data,
                     const std::vector<std::string>& properties, bool fused);

  void validate() const;
};

/// Packing of Hyperparams into the optimizer's flat vector:
/// [omega (d), log10 sigma2, beta (G), log10 nugget, z?, task params].
/// Task params for G = 2 are L_T(1,0) and log10 L_T(1,1); L_T(0,0) stays 1.
class ParamLayout {
 public:
  ParamLayout(Eigen::Index dims, Eigen::Index tasks, bool fused);

  Eigen::Index size() const;
  Eigen::Index omega(Eigen::Index k) const { return k; }
  Eigen::Index log_sigma2() const { return dims_; }
  Eigen::Index beta(Eigen::Index g) const { return dims_ + 1 + g; }
  Eigen::Index log_nugget() const { return dims_ + 1 + tasks_; }
  Eigen::Index z() const { return dims_ + 2 + tasks_; }
  Eigen::Index task_offset() const { return dims_ + 2 + tasks_ + (fused_ ? 1 : 0); }

  Eigen::VectorXd pack(const Hyperparams& hp) const;
  Hyperparams unpack(const Eigen::VectorXd& theta) const;
  Bounds bounds(const ParameterBounds& b) const;
  /// omega = 0, log10 sigma2 = 0, beta = 0, log10 nugget = -4, z = 1, L_T = I.
  Eigen::VectorXd canonical_start() const;
  std::vector<std::string> names(const std::vector<std::string>& features) const;

 private:
  Eigen::Index dims_;
  Eigen::Index tasks_;
  bool fused_;
};

struct PredictiveDistribution {
  double mean = 0.0;
  double variance = 0.0;
};

/// Clamps round-off negatives (>= -1e-8) to zero; throws on larger ones.
double clamp_variance(double variance);

/// 0.5 log|C| + 0.5 (y - beta)^T C^-1 (y - beta) for a single task.
/// Throws kNumerical naming the hyperparameters when C is not factorizable.
double nll(const Hyperparams& hp, const GpData& data);

/// Value and gradient over the ParamLayout vector (variance terms in log10).
double nll_with_grad(const Hyperparams& hp, const GpData& data,
                     Eigen::VectorXd& grad);
Eigen::VectorXd nll_grad(const Hyperparams& hp, const GpData& data);

struct FitOptions {
  OptimizerConfig optimizer;
};

/// Fitted single-output GP. Immutable; predict is safe from any thread.
class TrainedModel {
 public:
  /// Factorizes the covariance at fixed hyperparameters. On failure retries
  /// once with 10x nugget, then throws.
  static TrainedModel from_hyperparams(GpData data, Hyperparams hp);

  const GpData& data() const { return data_; }
  const Hyperparams& hyperparams() const { return hp_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const std::optional<OptResult>& opt_result() const { return opt_; }

  /// Prediction in response units at a normalized query point. `source` is
  /// an index into the model's source labels (ignored when not fused).
  PredictiveDistribution predict(const Eigen::VectorXd& xstar, int source = 0) const;
  PredictiveDistribution predict(const Eigen::VectorXd& xstar,
                                 std::string_view source) const;
  /// Same in model units (standardized).
  PredictiveDistribution predict_standardized(const Eigen::VectorXd& xstar,
                                              int source = 0) const;

  int source_index(std::string_view label) const;

 private:
  friend TrainedModel fit(const GpData& data, const FitOptions& options);

  GpData data_;
  Hyperparams hp_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  std::optional<OptResult> opt_;
};

/// Multi-start maximum-likelihood fit of a single-output GP.
TrainedModel fit(const GpData& data, const FitOptions& options = {});

}  // namespace fusegp

#endif  // FUSEGP_GP_HPP_
