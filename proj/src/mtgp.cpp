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

#include "fusegp/mtgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

constexpr double kLn10 = std::numbers::ln10;

struct Factorized {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd signal;
  Eigen::MatrixXd ct;
  Eigen::VectorXd residual;
  Eigen::VectorXd alpha;
};

Eigen::VectorXd stacked(const Eigen::MatrixXd& y) {
  // Column-major storage already is the task-major stacking.
  return Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
}

void check_shapes(const Hyperparams& hp, const GpData& data) {
  if (hp.omega.size() != data.dims()) {
    fail(ErrorKind::kInvalidArgument, "omega size does not match input dimension");
  }
  if (hp.tasks() != data.tasks()) {
    fail(ErrorKind::kInvalidArgument, "beta count does not match the task count");
  }
  if (data.fused() != hp.fused()) {
    fail(ErrorKind::kInvalidArgument, "fused data needs z and vice versa");
  }
}

Factorized factorize(const Hyperparams& hp, const GpData& data) {
  check_shapes(hp, data);
  Factorized f;
  f.signal = signal_matrix(data.x, data.source, hp);
  f.ct = task_matrix(hp);
  Eigen::MatrixXd cmt = kron(f.ct, f.signal);
  cmt.diagonal().array() += hp.nugget;
  f.llt.compute(cmt);
  if (f.llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "multi-task Cholesky failed at sigma2=" << hp.sigma2 << " nugget=" << hp.nugget
       << " omega=[" << hp.omega.transpose() << "] C_T=[" << f.ct.reshaped().transpose()
       << "]";
    fail(ErrorKind::kNumerical, os.str());
  }
  const Eigen::Index n = data.rows();
  f.residual = stacked(data.y);
  for (Eigen::Index g = 0; g < data.tasks(); ++g) {
    f.residual.segment(g * n, n).array() -= hp.beta(g);
  }
  f.alpha = f.llt.solve(f.residual);
  return f;
}

double value_of(const Factorized& f) {
  return f.llt.matrixLLT().diagonal().array().log().sum() + 0.5 * f.residual.dot(f.alpha);
}

}  // namespace

Eigen::MatrixXd task_matrix(const Hyperparams& hp) {
  if (hp.task_factor.size() == 0) {
    return Eigen::MatrixXd::Identity(hp.tasks(), hp.tasks());
  }
  if (hp.task_factor.rows() != hp.tasks()) {
    fail(ErrorKind::kInvalidArgument, "task factor does not match the task count");
  }
  return task_cov(hp.task_factor).matrix;
}

Eigen::MatrixXd assemble_cmt(const Eigen::MatrixXd& x, std::span<const int> source,
                             const Hyperparams& hp) {
  Eigen::MatrixXd cmt = kron(task_matrix(hp), signal_matrix(x, source, hp));
  cmt.diagonal().array() += hp.nugget;
  return cmt;
}

double nll_mt(const Hyperparams& hp, const GpData& data) {
  return value_of(factorize(hp, data));
}

double nll_mt_with_grad(const Hyperparams& hp, const GpData& data, Eigen::VectorXd& grad) {
  const Factorized f = factorize(hp, data);
  const Eigen::Index n = data.rows();
  const Eigen::Index tasks = data.tasks();
  const Eigen::Index big = n * tasks;
  const ParamLayout layout(data.dims(), tasks, data.fused());

  const Eigen::MatrixXd w =
      f.llt.solve(Eigen::MatrixXd::Identity(big, big)) - f.alpha * f.alpha.transpose();

  // d C_MT / d theta = kron(C_T, dS) for base-kernel parameters, so the
  // contraction reduces to the task-weighted sum of the W blocks.
  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd block_dot(tasks, tasks);
  for (Eigen::Index g = 0; g < tasks; ++g) {
    for (Eigen::Index h = 0; h < tasks; ++h) {
      const auto block = w.block(g * n, h * n, n, n);
      reduced += f.ct(g, h) * block;
      block_dot(g, h) = (block.array() * f.signal.array()).sum();
    }
  }
  const Eigen::VectorXd sig =
      signal_gradient_contractions(data.x, data.source, hp, reduced);

  grad.setZero(layout.size());
  grad.head(data.dims()) = 0.5 * sig.head(data.dims());
  grad(layout.log_sigma2()) = 0.5 * sig(data.dims());
  for (Eigen::Index g = 0; g < tasks; ++g) {
    grad(layout.beta(g)) = -f.alpha.segment(g * n, n).sum();
  }
  grad(layout.log_nugget()) = 0.5 * kLn10 * hp.nugget * w.trace();
  if (data.fused()) grad(layout.z()) = 0.5 * sig(data.dims() + 1);

  if (tasks == 2) {
    // C_T = L L^T, dC_T/dL(p,q) = E_pq L^T + L E_qp.
    const Eigen::MatrixXd l = hp.task_factor.triangularView<Eigen::Lower>();
    auto d_ct = [&](Eigen::Index p, Eigen::Index q) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
      e(p, q) = 1.0;
      return Eigen::MatrixXd(e * l.transpose() + l * e.transpose());
    };
    grad(layout.task_offset()) = 0.5 * (d_ct(1, 0).array() * block_dot.array()).sum();
    grad(layout.task_offset() + 1) =
        0.5 * kLn10 * l(1, 1) * (d_ct(1, 1).array() * block_dot.array()).sum();
  }
  return value_of(f);
}

MultiTaskModel MultiTaskModel::from_hyperparams(GpData data, Hyperparams hp) {
  data.validate();
  hp.validate();
  std::optional<Factorized> f;
  try {
    f = factorize(hp, data);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumerical) throw;
    hp.nugget = std::max(hp.nugget * 10.0, 1e-12);
    f = factorize(hp, data);
  }
  MultiTaskModel m;
  m.chol_ = f->llt.matrixL();
  m.alpha_ = f->alpha;
  m.data_ = std::move(data);
  m.hp_ = std::move(hp);
  return m;
}

double MultiTaskModel::task_correlation() const {
  return task_covariance().correlation(0, 1);
}

int MultiTaskModel::source_index(std::string_view label) const {
  const auto& labels = data_.source_labels;
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    fail(ErrorKind::kInvalidArgument, "unknown source '" + std::string(label) + "'");
  }
  return static_cast<int>(it - labels.begin());
}

MultiTaskPrediction MultiTaskModel::predict_standardized(const Eigen::VectorXd& xstar,
                                                         int source) const {
  if (xstar.size() != data_.dims()) {
    fail(ErrorKind::kInvalidArgument, "query dimension does not match the model");
  }
  if (data_.fused() && (source < 0 || source > 1)) {
    fail(ErrorKind::kInvalidArgument, "source index out of range");
  }
  const Eigen::Index tasks = data_.tasks();
  const Eigen::MatrixXd ct = task_matrix(hp_);
  const Eigen::VectorXd k = cross_cov(data_.x, data_.source, xstar, source, hp_);
  // Cross covariance between the query tasks and the stacked training data.
  const Eigen::MatrixXd kstar = kron(ct, k.transpose());
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(kstar.transpose());

  MultiTaskPrediction out;
  out.mean = hp_.beta + kstar * alpha_;
  out.covariance = hp_.sigma2 * ct - v.transpose() * v;
  out.covariance.diagonal().array() += hp_.nugget;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  for (Eigen::Index g = 0; g < tasks; ++g) {
    out.covariance(g, g) = clamp_variance(out.covariance(g, g));
  }
  return out;
}

MultiTaskPrediction MultiTaskModel::predict(const Eigen::VectorXd& xstar, int source) const {
  MultiTaskPrediction p = predict_standardized(xstar, source);
  const auto tasks = data_.tasks();
  Eigen::VectorXd scale(tasks);
  for (Eigen::Index g = 0; g < tasks; ++g) {
    const auto& stats = data_.spec.responses[static_cast<std::size_t>(g)];
    scale(g) = stats.std;
    p.mean(g) = stats.mean + p.mean(g) * stats.std;
  }
  p.covariance = scale.asDiagonal() * p.covariance * scale.asDiagonal();
  return p;
}

MultiTaskModel fit_mt(const GpData& data, const FitOptions& options) {
  data.validate();
  if (data.rows() < 2) fail(ErrorKind::kInvalidArgument, "fit needs at least 2 rows");
  if (data.tasks() != 2) fail(ErrorKind::kInvalidArgument, "multi-task fit needs G = 2");
  const ParamLayout layout(data.dims(), 2, data.fused());
  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
    try {
      const Hyperparams hp = layout.unpack(theta);
      if (grad) return nll_mt_with_grad(hp, data, *grad);
      return nll_mt(hp, data);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumerical) throw;
      if (grad) grad->setZero(layout.size());
      return std::numeric_limits<double>::infinity();
    }
  };
  OptResult opt = minimize(objective, layout.canonical_start(),
                           layout.bounds(options.optimizer.bounds), options.optimizer);
  MultiTaskModel model =
      MultiTaskModel::from_hyperparams(data, layout.unpack(opt.best_params));
  model.opt_ = std::move(opt);
  return model;
}

}  // namespace fusegp
