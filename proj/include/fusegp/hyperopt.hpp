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

#ifndef FUSEGP_HYPEROPT_HPP_
#define FUSEGP_HYPEROPT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace fusegp {

/// Box constraints, lower(i) < upper(i).
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

/// Default box for each kind of GP hyperparameter. Variance-like terms are in
/// log10 units.
struct ParameterBounds {
  double omega_lo = -4.0, omega_hi = 3.0;
  double log_sigma2_lo = -4.0, log_sigma2_hi = 4.0;
  double beta_lo = -10.0, beta_hi = 10.0;
  double log_nugget_lo = -8.0, log_nugget_hi = 2.0;
  double z_lo = 0.0, z_hi = 10.0;
  double task_offdiag_lo = -10.0, task_offdiag_hi = 10.0;
  double log_task_diag_lo = -3.0, log_task_diag_hi = 2.0;
};

struct OptimizerConfig {
  int n_restarts = 8;
  int max_iters = 500;
  double grad_tol = 1e-6;
  /// Relative objective decrease below which an iteration counts as no
  /// progress; five such iterations in a row stop the restart as stalled.
  double f_rel_tol = 1e-12;
  ParameterBounds bounds;
  std::uint64_t seed = 0;
  /// Run restarts on OpenMP threads when not already inside a parallel region.
  bool parallel_restarts = true;

  void validate() const;
};

/// Objective value at `x`; writes the gradient when `grad` is non-null.
/// Returns +inf where the objective cannot be evaluated.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

enum class RestartStatus {
  kConverged,  // projected gradient norm <= grad_tol
  kMaxIters,
  kStalled,    // no further decrease possible in floating point
  kFailed,     // objective not evaluable at the start point
};

std::string to_string(RestartStatus status);

struct RestartTrace {
  int index = 0;
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  double start_value = 0.0;
  double end_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  RestartStatus status = RestartStatus::kFailed;
};

struct OptResult {
  Eigen::VectorXd best_params;
  double best_value = 0.0;
  int best_restart = -1;
  std::vector<RestartTrace> restarts;

  nlohmann::json to_json(const std::vector<std::string>& names = {}) const;
};

/// Single projected quasi-Newton descent from `start` (clamped into bounds).
RestartTrace descend(const Objective& f, const Eigen::VectorXd& start,
                     const Bounds& bounds, const OptimizerConfig& cfg);

/// Multi-start minimization. Restart 0 begins at `initial`; the others are
/// drawn uniformly in the box from cfg.seed. Ties on the objective go to the
/// lowest restart index. Throws kNumerical when every restart fails.
OptResult minimize(const Objective& f, const Eigen::VectorXd& initial,
                   const Bounds& bounds, const OptimizerConfig& cfg);

}  // namespace fusegp

#endif  // FUSEGP_HYPEROPT_HPP_
