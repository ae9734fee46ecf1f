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

#ifndef FUSEGP_EVAL_HPP_
#define FUSEGP_EVAL_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fusegp/dataset.hpp"
#include "fusegp/gp.hpp"
#include "fusegp/model_io.hpp"

namespace fusegp {

double rmse(std::span<const double> y, std::span<const double> yhat);
double pearson(std::span<const double> a, std::span<const double> b);
/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> a);
double spearman(std::span<const double> a, std::span<const double> b);

/// Number formatting used by every CSV writer: 6 significant digits.
std::string format_number(double value);

enum class ModelKind { kSogp, kMtgp };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct CvConfig {
  ModelKind kind = ModelKind::kSogp;
  bool fused = false;
  std::vector<std::string> properties = {"phi", "hv"};
  int k = 5;
  std::uint64_t seed = 0;
  FitOptions fit;
  /// Cross-validate folds on OpenMP threads.
  bool parallel_folds = true;
};

struct PropertyScore {
  std::string property;
  std::vector<double> fold_rmse;  // one per fold, response units
  double mean_rmse = 0.0;         // arithmetic mean of fold_rmse
  double pooled_rmse = 0.0;       // one RMSE over all held-out residuals
};

/// One line of the RMSE table: a model trained on `train` and scored on the
/// held-out rows of material `test`.
struct CvRow {
  std::string model;
  std::string train;
  std::string test;
  std::vector<PropertyScore> scores;
};

struct CvReport {
  ModelKind kind = ModelKind::kSogp;
  bool fused = false;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> properties;
  std::vector<CvRow> rows;

  nlohmann::json to_json() const;
};

inline constexpr std::string_view kFusedLabel = "Fused Data";

/// k-fold cross-validation. Without fusion every material is cross-validated
/// on its own rows; with fusion one model per fold is trained on both
/// materials and scored per material. Folds are drawn per material (seed +
/// material index) and merged, so single and fused runs hold out the same
/// rows.
CvReport run_cv(const Dataset& data, const CvConfig& config);

/// Table layout: model,train,test,<property>_rmse... (fold means).
void write_cv_table(std::ostream& out, std::span<const CvReport> reports);
/// Long format: one row per (report row, property, fold).
void write_cv_folds(std::ostream& out, std::span<const CvReport> reports);

struct CorrelationTable {
  std::vector<std::string> labels;  // "<material>:<property>"
  Eigen::MatrixXd pearson;
  Eigen::MatrixXd spearman;

  nlohmann::json to_json() const;
  void write_csv(std::ostream& out, bool use_spearman) const;
};

/// Pearson and Spearman matrices over {material} x {phi, hv}, joining the
/// two datasets on sample_id. Throws listing ids present in only one file.
CorrelationTable correlation_table(const Dataset& a, const Dataset& b);

/// Long-format VED scatter: material,sample_id,ved,log10_ved,property,value.
void write_ved_scatter(std::ostream& out, std::span<const Dataset* const> datasets);

struct LengthscaleRow {
  std::string feature;
  double omega = 0.0;
  int rank = 0;  // 1 = largest omega
  bool influential = false;
};

struct LengthscaleReport {
  std::string method;
  std::string material;
  std::vector<LengthscaleRow> rows;  // model features, then "s" when fused
  std::optional<double> z;
  std::optional<double> task_correlation;
  double sigma2 = 0.0;
  double nugget = 0.0;
  /// Process variance is large enough for lengthscales to carry meaning.
  bool has_signal = false;
  std::string most_influential;
  std::string least_influential;

  const LengthscaleRow& row(std::string_view feature) const;
  nlohmann::json to_json() const;
};

/// Lengthscale table of a fitted model. The source column "s" reports the
/// equivalent exponent log10(z^2), since the cross-source correlation is
/// exp(-z^2) = exp(-10^omega_s).
LengthscaleReport lengthscale_report(const AnyModel& model, std::string method,
                                     std::string material);

/// Header plus one row per report: Method,Material,<features...>,s.
void write_lengthscale_table(std::ostream& out, std::span<const LengthscaleReport> reports,
                             std::span<const std::string> columns);

struct SweepPoint {
  double value = 0.0;
  std::string material;
  std::string property;
  double mean = 0.0;
  double lower = 0.0;  // mean - 2 sd
  double upper = 0.0;  // mean + 2 sd
};

struct MarginalSweep {
  std::string feature;
  std::vector<double> grid;  // raw units, strictly increasing
  std::vector<SweepPoint> points;

  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

/// Posterior along one continuous feature with the other continuous
/// features at their training medians and categorical ones at their mode,
/// per material when fused.
MarginalSweep marginal_sweep(const AnyModel& model, std::string_view feature, int grid_size);

}  // namespace fusegp

#endif  // FUSEGP_EVAL_HPP_
