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

#ifndef FUSEGP_DATASET_HPP_
#define FUSEGP_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace fusegp {

/// One LPBF parameter combination. Hatch spacing and layer thickness are
/// kept in micrometres; scan rotation is one of two categorical angles.
struct ProcessPoint {
  double p = 0.0;   // laser power, W
  double v = 0.0;   // scan speed, mm/s
  double l = 0.0;   // layer thickness, um
  double h = 0.0;   // hatch spacing, um
  double sr = 0.0;  // scan rotation, degrees (67 or 90)
  std::string material;
};

inline constexpr std::string_view kPhi = "phi";
inline constexpr std::string_view kHv = "hv";

/// Names of the five process features in model-input order.
const std::vector<std::string>& process_feature_names();

/// Range checks applied by load_csv. Defaults are the LPBF design bounds.
struct ValidationBounds {
  bool enabled = true;
  double p_min = 80.0, p_max = 400.0;
  double v_min = 150.0, v_max = 1500.0;
  double l_min = 20.0, l_max = 75.0;
  double h_min = 70.0, h_max = 120.0;
};

class Dataset {
 public:
  Dataset() = default;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<std::string>& sample_ids() const { return ids_; }
  const std::vector<ProcessPoint>& points() const { return points_; }
  /// Source (material) labels in first-appearance order.
  const std::vector<std::string>& sources() const { return sources_; }
  /// Property names, always {"phi", "hv"} for CSV-loaded data.
  const std::vector<std::string>& property_names() const { return properties_; }

  /// n x P response matrix, columns ordered as property_names().
  const Eigen::MatrixXd& responses() const { return responses_; }
  Eigen::VectorXd response(std::string_view property) const;
  std::size_t property_index(std::string_view property) const;

  /// Index of `material` in sources(); throws on unknown label.
  std::size_t source_index(std::string_view material) const;

  void add_row(std::string sample_id, ProcessPoint point,
               std::span<const double> response_values);

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset filter_source(std::string_view material) const;
  /// Row indices belonging to `material`, in file order.
  std::vector<std::size_t> rows_of(std::string_view material) const;

  static Dataset with_properties(std::vector<std::string> properties);

 private:
  std::vector<std::string> ids_;
  std::vector<ProcessPoint> points_;
  std::vector<std::string> sources_;
  std::vector<std::string> properties_{"phi", "hv"};
  Eigen::MatrixXd responses_;
};

/// Reads the canonical CSV
/// `sample_id,p_w,v_mm_s,l_um,h_um,sr_deg,material,phi_pct,hv`.
/// Columns may appear in any order; extra columns are ignored.
Dataset load_csv(const std::filesystem::path& path,
                 const ValidationBounds& bounds = {});
Dataset parse_csv(std::string_view text, const ValidationBounds& bounds = {},
                  std::string_view origin = "<memory>");
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Rows of `b` appended to `a`; sample ids must stay unique.
Dataset concat(const Dataset& a, const Dataset& b);

struct FeatureRange {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  /// Categorical features keep a fixed range instead of the data range.
  bool categorical = false;
};

struct ResponseStats {
  std::string name;
  double mean = 0.0;
  double std = 1.0;
};

struct NormalizationSpec {
  std::vector<FeatureRange> features;
  std::vector<ResponseStats> responses;

  double scale_feature(std::size_t j, double raw) const {
    const auto& f = features[j];
    return (raw - f.min) / (f.max - f.min);
  }
  double unscale_feature(std::size_t j, double scaled) const {
    const auto& f = features[j];
    return f.min + scaled * (f.max - f.min);
  }
  double standardize(std::size_t k, double raw) const {
    return (raw - responses[k].mean) / responses[k].std;
  }
  double destandardize(std::size_t k, double value) const {
    return responses[k].mean + value * responses[k].std;
  }
  std::size_t feature_index(std::string_view name) const;
};

/// Model-ready matrices: inputs in [0,1] (sr in {0,1}), responses standardized,
/// source indices into `source_labels`.
struct NormalizedData {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  std::vector<int> source;
  std::vector<std::string> source_labels;
  NormalizationSpec spec;
};

/// Input row of a process point in raw units, model feature order.
Eigen::VectorXd raw_features(const ProcessPoint& point);

/// Min-max ranges and response moments from `data`. Throws naming the
/// column when a continuous feature or a response is constant.
NormalizationSpec fit_normalization(const Dataset& data);
/// Applies an existing spec (e.g. one fitted on a training split).
NormalizedData apply_normalization(const Dataset& data,
                                   const NormalizationSpec& spec);
NormalizedData normalize(const Dataset& data);

/// p / (v * h_mm * l_mm) in J/mm^3, with h and l given in micrometres.
double compute_ved(double p, double v, double h_um, double l_um);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignment;

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;
  nlohmann::json to_json() const;
};

/// Balanced, seeded partition of 0..n-1 into k folds.
FoldAssignment kfold(std::size_t n, int k, std::uint64_t seed);

/// Median of a 6x6 Vickers grid; the even count averages the central pair.
double median_hardness(std::span<const double> grid);
/// Reads 6 lines of 6 comma-separated hardness values.
std::vector<double> read_hardness_grid(const std::filesystem::path& path);

}  // namespace fusegp

#endif  // FUSEGP_DATASET_HPP_
