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

#include "fusegp/hyperopt.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fusegp/error.hpp"
#include "fusegp/rng.hpp"

namespace fusegp {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 50;
constexpr int kStallLimit = 5;
// Largest per-coordinate step of a trial point before backtracking.
constexpr double kMaxStep = 2.0;

// Projected gradient x - P(x - g): zero where the bound blocks descent.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Bounds& b) {
  return x - b.clamp(x - g);
}

// Free variables: not pinned at a bound by a gradient pointing outward.
std::vector<Eigen::Index> free_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Bounds& b) {
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lo = x(i) <= b.lower(i) && g(i) > 0.0;
    const bool at_hi = x(i) >= b.upper(i) && g(i) < 0.0;
    if (!at_lo && !at_hi) free.push_back(i);
  }
  return free;
}

Eigen::VectorXd direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                          const std::vector<Eigen::Index>& free) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.size());
  for (const auto i : free) {
    double acc = 0.0;
    for (const auto j : free) acc += h(i, j) * g(j);
    d(i) = -acc;
  }
  return d;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (n_restarts < 1) fail(ErrorKind::kInvalidArgument, "n_restarts must be >= 1");
  if (max_iters < 1) fail(ErrorKind::kInvalidArgument, "max_iters must be >= 1");
  if (!(grad_tol > 0.0)) fail(ErrorKind::kInvalidArgument, "grad_tol must be > 0");
  const auto& b = bounds;
  if (!(b.omega_lo < b.omega_hi) || !(b.log_sigma2_lo < b.log_sigma2_hi) ||
      !(b.beta_lo < b.beta_hi) || !(b.log_nugget_lo < b.log_nugget_hi) ||
      !(b.z_lo < b.z_hi) || !(b.task_offdiag_lo < b.task_offdiag_hi) ||
      !(b.log_task_diag_lo < b.log_task_diag_hi)) {
    fail(ErrorKind::kInvalidArgument, "every bound needs lower < upper");
  }
}

std::string to_string(RestartStatus status) {
  switch (status) {
    case RestartStatus::kConverged: return "converged";
    case RestartStatus::kMaxIters: return "max_iters";
    case RestartStatus::kStalled: return "stalled";
    case RestartStatus::kFailed: return "failed";
  }
  return "unknown";
}

RestartTrace descend(const Objective& f, const Eigen::VectorXd& start,
                     const Bounds& bounds, const OptimizerConfig& cfg) {
  const Eigen::Index n = start.size();
  RestartTrace trace;
  trace.start = bounds.clamp(start);
  trace.end = trace.start;

  Eigen::VectorXd x = trace.start;
  Eigen::VectorXd g(n);
  double fx = f(x, &g);
  trace.start_value = fx;
  trace.end_value = fx;
  if (!std::isfinite(fx) || !g.allFinite()) {
    trace.status = RestartStatus::kFailed;
    trace.end_value = std::numeric_limits<double>::infinity();
    return trace;
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool h_is_identity = true;
  int no_progress = 0;
  trace.status = RestartStatus::kMaxIters;
  Eigen::VectorXd gt(n);

  for (int it = 0; it < cfg.max_iters; ++it) {
    trace.grad_norm = projected_gradient(x, g, bounds).norm();
    if (trace.grad_norm <= cfg.grad_tol) {
      trace.status = RestartStatus::kConverged;
      break;
    }
    trace.iterations = it + 1;

    const auto free = free_set(x, g, bounds);
    Eigen::VectorXd d = direction(h, g, free);
    if (!(g.dot(d) < 0.0)) {
      h = Eigen::MatrixXd::Identity(n, n);
      h_is_identity = true;
      d = direction(h, g, free);
    }
    const double longest = d.cwiseAbs().maxCoeff();
    if (longest > kMaxStep) d *= kMaxStep / longest;

    // Armijo backtracking along the projected path.
    bool accepted = false;
    Eigen::VectorXd xt;
    double ft = 0.0;
    double t = 1.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
      xt = bounds.clamp(x + t * d);
      const Eigen::VectorXd step = xt - x;
      if (step.squaredNorm() == 0.0) break;
      ft = f(xt, &gt);
      if (std::isfinite(ft) && gt.allFinite() && ft <= fx + kArmijo * g.dot(step) &&
          ft <= fx) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!h_is_identity) {
        h = Eigen::MatrixXd::Identity(n, n);
        h_is_identity = true;
        continue;
      }
      trace.status = RestartStatus::kStalled;
      break;
    }

    const Eigen::VectorXd s = xt - x;
    const Eigen::VectorXd y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (h_is_identity) {
        // Scale the initial inverse Hessian before the first update.
        h *= sy / y.squaredNorm();
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      h += rho * ((1.0 + rho * y.dot(hy)) * s * s.transpose() -
                  hy * s.transpose() - s * hy.transpose());
      h_is_identity = false;
    }

    const double decrease = fx - ft;
    no_progress = decrease <= cfg.f_rel_tol * (1.0 + std::abs(fx)) ? no_progress + 1 : 0;
    x = xt;
    fx = ft;
    g = gt;
    if (no_progress >= kStallLimit) {
      trace.grad_norm = projected_gradient(x, g, bounds).norm();
      trace.status = trace.grad_norm <= cfg.grad_tol ? RestartStatus::kConverged
                                                     : RestartStatus::kStalled;
      break;
    }
  }
  if (trace.status == RestartStatus::kMaxIters) {
    trace.grad_norm = projected_gradient(x, g, bounds).norm();
    if (trace.grad_norm <= cfg.grad_tol) trace.status = RestartStatus::kConverged;
  }
  trace.end = x;
  trace.end_value = fx;
  return trace;
}

OptResult minimize(const Objective& f, const Eigen::VectorXd& initial,
                   const Bounds& bounds, const OptimizerConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = initial.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n) {
    fail(ErrorKind::kInvalidArgument, "bounds do not match the parameter count");
  }
  if (!(bounds.lower.array() < bounds.upper.array()).all()) {
    fail(ErrorKind::kInvalidArgument, "every bound needs lower < upper");
  }

  // Start points are drawn up front so they do not depend on scheduling.
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(bounds.clamp(initial));
  Engine eng(cfg.seed);
  for (int r = 1; r < cfg.n_restarts; ++r) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = uniform(eng, bounds.lower(i), bounds.upper(i));
    starts.push_back(std::move(s));
  }

  OptResult result;
  result.restarts.resize(starts.size());
  bool parallel = cfg.parallel_restarts;
#ifdef _OPENMP
  parallel = parallel && !omp_in_parallel();
#endif
  const int count = static_cast<int>(starts.size());
  // Exceptions must not cross the parallel region; keep the first by index.
  std::vector<std::exception_ptr> errors(starts.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int r = 0; r < count; ++r) {
    const auto slot = static_cast<std::size_t>(r);
    try {
      RestartTrace trace = descend(f, starts[slot], bounds, cfg);
      trace.index = r;
      result.restarts[slot] = std::move(trace);
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const auto& trace : result.restarts) {
    if (trace.status == RestartStatus::kFailed) continue;
    if (result.best_restart < 0 || trace.end_value < result.best_value) {
      result.best_restart = trace.index;
      result.best_value = trace.end_value;
      result.best_params = trace.end;
    }
  }
  if (result.best_restart < 0) {
    fail(ErrorKind::kNumerical, "every optimizer restart failed to evaluate the objective");
  }
  return result;
}

nlohmann::json OptResult::to_json(const std::vector<std::string>& names) const {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json j;
  if (!names.empty()) j["parameter_names"] = names;
  j["best_restart"] = best_restart;
  j["best_value"] = best_value;
  j["best_params"] = vec(best_params);
  j["restarts"] = nlohmann::json::array();
  for (const auto& r : restarts) {
    nlohmann::json t;
    t["index"] = r.index;
    t["status"] = to_string(r.status);
    t["iterations"] = r.iterations;
    t["start"] = vec(r.start);
    t["end"] = vec(r.end);
    t["start_value"] = std::isfinite(r.start_value) ? nlohmann::json(r.start_value) : nlohmann::json();
    t["end_value"] = std::isfinite(r.end_value) ? nlohmann::json(r.end_value) : nlohmann::json();
    t["grad_norm"] = r.grad_norm;
    j["restarts"].push_back(std::move(t));
  }
  return j;
}

}  // namespace fusegp
