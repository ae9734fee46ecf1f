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

#include "fusegp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

constexpr double kLn10 = std::numbers::ln10;

std::string describe(const Hyperparams& hp) {
  std::ostringstream os;
  os.precision(6);
  os << "omega=[" << hp.omega.transpose() << "] sigma2=" << hp.sigma2
     << " beta=[" << hp.beta.transpose() << "] nugget=" << hp.nugget;
  if (hp.z) os << " z=" << *hp.z;
  return os.str();
}

struct Factorized {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd residual;
  Eigen::VectorXd alpha;
};

Factorized factorize(const Hyperparams& hp, const GpData& data) {
  if (data.tasks() != 1) {
    fail(ErrorKind::kInvalidArgument, "single-output GP needs exactly one response column");
  }
  if (hp.omega.size() != data.dims()) {
    fail(ErrorKind::kInvalidArgument, "omega size does not match input dimension");
  }
  if (data.fused() != hp.fused()) {
    fail(ErrorKind::kInvalidArgument, "fused data needs z and vice versa");
  }
  Factorized f;
  f.llt.compute(cov_matrix(data.x, data.source, hp));
  if (f.llt.info() != Eigen::Success) {
    fail(ErrorKind::kNumerical, "Cholesky factorization failed at " + describe(hp));
  }
  f.residual = data.y.col(0).array() - hp.beta(0);
  f.alpha = f.llt.solve(f.residual);
  return f;
}

double value_of(const Factorized& f) {
  const auto& l = f.llt.matrixLLT();
  return l.diagonal().array().log().sum() + 0.5 * f.residual.dot(f.alpha);
}

}  // namespace

GpData GpData::make(Eigen::MatrixXd x, Eigen::MatrixXd y, std::vector<int> source,
                    std::vector<std::string> source_labels) {
  GpData d;
  d.x = std::move(x);
  d.y = std::move(y);
  d.source = std::move(source);
  d.source_labels = std::move(source_labels);
  for (Eigen::Index j = 0; j < d.x.cols(); ++j) {
    d.spec.features.push_back({"x" + std::to_string(j), 0.0, 1.0, false});
  }
  for (Eigen::Index k = 0; k < d.y.cols(); ++k) {
    d.spec.responses.push_back({"y" + std::to_string(k), 0.0, 1.0});
  }
  if (d.source_labels.empty() && !d.source.empty()) d.source_labels = {"A", "B"};
  d.validate();
  return d;
}

GpData GpData::from(const NormalizedData& data, const std::vector<std::string>& properties,
                    bool fused) {
  GpData d;
  d.x = data.x;
  d.y.resize(data.y.rows(), static_cast<Eigen::Index>(properties.size()));
  d.spec.features = data.spec.features;
  for (std::size_t k = 0; k < properties.size(); ++k) {
    std::size_t col = data.spec.responses.size();
    for (std::size_t c = 0; c < data.spec.responses.size(); ++c) {
      if (data.spec.responses[c].name == properties[k]) col = c;
    }
    if (col == data.spec.responses.size()) {
      fail(ErrorKind::kInvalidArgument, "unknown property '" + properties[k] + "'");
    }
    d.y.col(static_cast<Eigen::Index>(k)) = data.y.col(static_cast<Eigen::Index>(col));
    d.spec.responses.push_back(data.spec.responses[col]);
  }
  d.source_labels = data.source_labels;
  if (fused) {
    if (data.source_labels.size() != 2) {
      fail(ErrorKind::kData, "fusion needs exactly 2 materials, found " +
                                 std::to_string(data.source_labels.size()));
    }
    d.source = data.source;
  } else if (data.source_labels.size() > 1) {
    fail(ErrorKind::kData, "non-fused model given more than one material");
  }
  d.validate();
  return d;
}

void GpData::validate() const {
  if (x.rows() != y.rows()) fail(ErrorKind::kInvalidArgument, "x and y row counts differ");
  if (!x.allFinite() || !y.allFinite()) fail(ErrorKind::kData, "non-finite training data");
  if (y.cols() < 1) fail(ErrorKind::kInvalidArgument, "no response columns");
  if (static_cast<Eigen::Index>(spec.features.size()) != x.cols() ||
      static_cast<Eigen::Index>(spec.responses.size()) != y.cols()) {
    fail(ErrorKind::kInvalidArgument, "normalization spec does not match data shape");
  }
  if (!source.empty()) {
    if (static_cast<Eigen::Index>(source.size()) != x.rows()) {
      fail(ErrorKind::kInvalidArgument, "source labels do not match rows");
    }
    if (source_labels.size() != 2) {
      fail(ErrorKind::kInvalidArgument, "fused data needs exactly 2 source labels");
    }
    for (const int s : source) {
      if (s < 0 || s > 1) fail(ErrorKind::kInvalidArgument, "source index out of range");
    }
  }
}

ParamLayout::ParamLayout(Eigen::Index dims, Eigen::Index tasks, bool fused)
    : dims_(dims), tasks_(tasks), fused_(fused) {
  if (tasks < 1 || tasks > 2) {
    fail(ErrorKind::kInvalidArgument, "only 1 or 2 tasks are supported");
  }
}

Eigen::Index ParamLayout::size() const {
  return task_offset() + (tasks_ == 2 ? 2 : 0);
}

Eigen::VectorXd ParamLayout::pack(const Hyperparams& hp) const {
  Eigen::VectorXd t(size());
  t.head(dims_) = hp.omega;
  t(log_sigma2()) = std::log10(hp.sigma2);
  for (Eigen::Index g = 0; g < tasks_; ++g) t(beta(g)) = hp.beta(g);
  t(log_nugget()) = std::log10(hp.nugget);
  if (fused_) t(z()) = hp.z.value_or(1.0);
  if (tasks_ == 2) {
    t(task_offset()) = hp.task_factor(1, 0);
    t(task_offset() + 1) = std::log10(hp.task_factor(1, 1));
  }
  return t;
}

Hyperparams ParamLayout::unpack(const Eigen::VectorXd& theta) const {
  Hyperparams hp;
  hp.omega = theta.head(dims_);
  hp.sigma2 = std::pow(10.0, theta(log_sigma2()));
  hp.beta = theta.segment(beta(0), tasks_);
  hp.nugget = std::pow(10.0, theta(log_nugget()));
  if (fused_) hp.z = theta(z());
  if (tasks_ == 2) {
    hp.task_factor = Eigen::MatrixXd::Identity(2, 2);
    hp.task_factor(1, 0) = theta(task_offset());
    hp.task_factor(1, 1) = std::pow(10.0, theta(task_offset() + 1));
  }
  return hp;
}

Bounds ParamLayout::bounds(const ParameterBounds& b) const {
  Bounds out{Eigen::VectorXd(size()), Eigen::VectorXd(size())};
  out.lower.head(dims_).setConstant(b.omega_lo);
  out.upper.head(dims_).setConstant(b.omega_hi);
  out.lower(log_sigma2()) = b.log_sigma2_lo;
  out.upper(log_sigma2()) = b.log_sigma2_hi;
  out.lower.segment(beta(0), tasks_).setConstant(b.beta_lo);
  out.upper.segment(beta(0), tasks_).setConstant(b.beta_hi);
  out.lower(log_nugget()) = b.log_nugget_lo;
  out.upper(log_nugget()) = b.log_nugget_hi;
  if (fused_) {
    out.lower(z()) = b.z_lo;
    out.upper(z()) = b.z_hi;
  }
  if (tasks_ == 2) {
    out.lower(task_offset()) = b.task_offdiag_lo;
    out.upper(task_offset()) = b.task_offdiag_hi;
    out.lower(task_offset() + 1) = b.log_task_diag_lo;
    out.upper(task_offset() + 1) = b.log_task_diag_hi;
  }
  return out;
}

Eigen::VectorXd ParamLayout::canonical_start() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(size());
  t(log_nugget()) = -4.0;
  if (fused_) t(z()) = 1.0;
  // L_T = I: off-diagonal 0, log10 of the diagonal 0.
  return t;
}

std::vector<std::string> ParamLayout::names(const std::vector<std::string>& features) const {
  std::vector<std::string> out;
  for (Eigen::Index k = 0; k < dims_; ++k) {
    out.push_back("omega_" + (static_cast<std::size_t>(k) < features.size()
                                  ? features[static_cast<std::size_t>(k)]
                                  : std::to_string(k)));
  }
  out.emplace_back("log10_sigma2");
  for (Eigen::Index g = 0; g < tasks_; ++g) out.push_back("beta_" + std::to_string(g));
  out.emplace_back("log10_nugget");
  if (fused_) out.emplace_back("z");
  if (tasks_ == 2) {
    out.emplace_back("task_L10");
    out.emplace_back("log10_task_L11");
  }
  return out;
}

double clamp_variance(double variance) {
  if (variance >= 0.0) return variance;
  if (variance >= -1e-8) return 0.0;
  std::ostringstream os;
  os << "negative predictive variance " << variance;
  fail(ErrorKind::kNumerical, os.str());
}

double nll(const Hyperparams& hp, const GpData& data) {
  return value_of(factorize(hp, data));
}

double nll_with_grad(const Hyperparams& hp, const GpData& data, Eigen::VectorXd& grad) {
  const Factorized f = factorize(hp, data);
  const ParamLayout layout(data.dims(), 1, data.fused());
  const Eigen::Index n = data.rows();
  const Eigen::MatrixXd cinv = f.llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd w = cinv - f.alpha * f.alpha.transpose();
  const Eigen::VectorXd sig = signal_gradient_contractions(data.x, data.source, hp, w);

  grad.setZero(layout.size());
  grad.head(data.dims()) = 0.5 * sig.head(data.dims());
  grad(layout.log_sigma2()) = 0.5 * sig(data.dims());
  grad(layout.beta(0)) = -f.alpha.sum();
  grad(layout.log_nugget()) = 0.5 * kLn10 * hp.nugget * w.trace();
  if (data.fused()) grad(layout.z()) = 0.5 * sig(data.dims() + 1);
  return value_of(f);
}

Eigen::VectorXd nll_grad(const Hyperparams& hp, const GpData& data) {
  Eigen::VectorXd g;
  nll_with_grad(hp, data, g);
  return g;
}

TrainedModel TrainedModel::from_hyperparams(GpData data, Hyperparams hp) {
  data.validate();
  hp.validate();
  if (data.tasks() != 1) {
    fail(ErrorKind::kInvalidArgument, "single-output GP needs exactly one response column");
  }
  TrainedModel m;
  std::optional<Factorized> f;
  try {
    f = factorize(hp, data);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumerical) throw;
    hp.nugget = std::max(hp.nugget * 10.0, 1e-12);
    f = factorize(hp, data);
  }
  m.chol_ = f->llt.matrixL();
  m.alpha_ = f->alpha;
  m.data_ = std::move(data);
  m.hp_ = std::move(hp);
  return m;
}

int TrainedModel::source_index(std::string_view label) const {
  const auto& labels = data_.source_labels;
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    fail(ErrorKind::kInvalidArgument, "unknown source '" + std::string(label) + "'");
  }
  return static_cast<int>(it - labels.begin());
}

PredictiveDistribution TrainedModel::predict_standardized(const Eigen::VectorXd& xstar,
                                                          int source) const {
  if (xstar.size() != data_.dims()) {
    fail(ErrorKind::kInvalidArgument, "query dimension does not match the model");
  }
  if (data_.fused() && (source < 0 || source > 1)) {
    fail(ErrorKind::kInvalidArgument, "source index out of range");
  }
  const Eigen::VectorXd k = cross_cov(data_.x, data_.source, xstar, source, hp_);
  const Eigen::VectorXd v =
      chol_.triangularView<Eigen::Lower>().solve(k);
  PredictiveDistribution out;
  out.mean = hp_.beta(0) + k.dot(alpha_);
  out.variance = clamp_variance(hp_.sigma2 + hp_.nugget - v.squaredNorm());
  return out;
}

PredictiveDistribution TrainedModel::predict(const Eigen::VectorXd& xstar, int source) const {
  PredictiveDistribution p = predict_standardized(xstar, source);
  const auto& stats = data_.spec.responses.front();
  p.mean = stats.mean + p.mean * stats.std;
  p.variance *= stats.std * stats.std;
  return p;
}

PredictiveDistribution TrainedModel::predict(const Eigen::VectorXd& xstar,
                                             std::string_view source) const {
  return predict(xstar, source_index(source));
}

TrainedModel fit(const GpData& data, const FitOptions& options) {
  data.validate();
  if (data.rows() < 2) fail(ErrorKind::kInvalidArgument, "fit needs at least 2 rows");
  if (data.tasks() != 1) {
    fail(ErrorKind::kInvalidArgument, "single-output GP needs exactly one response column");
  }
  const ParamLayout layout(data.dims(), 1, data.fused());
  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
    try {
      const Hyperparams hp = layout.unpack(theta);
      if (grad) return nll_with_grad(hp, data, *grad);
      return nll(hp, data);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumerical) throw;
      if (grad) grad->setZero(layout.size());
      return std::numeric_limits<double>::infinity();
    }
  };
  OptResult opt = minimize(objective, layout.canonical_start(),
                           layout.bounds(options.optimizer.bounds), options.optimizer);
  TrainedModel model = TrainedModel::from_hyperparams(data, layout.unpack(opt.best_params));
  model.opt_ = std::move(opt);
  return model;
}

}  // namespace fusegp
