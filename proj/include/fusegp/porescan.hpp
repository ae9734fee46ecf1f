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

#ifndef FUSEGP_PORESCAN_HPP_
#define FUSEGP_PORESCAN_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace fusegp {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);
  std::uint8_t at(int x, int y) const { return data[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  std::size_t pixels() const { return data.size(); }
};

/// Foreground mask with values 0 / 1. Foreground = pore.
using BinaryImage = GrayImage;

/// Pore labels, 0 = background, pores numbered 1..count.
struct LabelImage {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<std::int32_t> labels;

  std::int32_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

using Histogram = std::array<std::uint64_t, 256>;

struct OtsuResult {
  int threshold = 0;
  /// Single-intensity histogram: no split exists, the mask is left empty.
  bool degenerate = false;
};

GrayImage crop_borders(const GrayImage& img, int margin);

Histogram histogram(const GrayImage& img);

/// Maximizes the between-class variance over thresholds t (class 0 = values
/// <= t); ties go to the lowest t.
OtsuResult otsu_from_histogram(const Histogram& hist);
OtsuResult otsu_threshold(const GrayImage& img);

/// Pore mask: pixels <= t (dark pores), or > t with `invert`. Degenerate
/// thresholds give an empty mask.
BinaryImage binarize(const GrayImage& img, const OtsuResult& otsu, bool invert = false);

/// Union of Euclidean disks of `radius` around every foreground pixel.
BinaryImage dilate(const BinaryImage& bin, int radius);

/// Squared Euclidean distance from every foreground pixel to the nearest
/// background pixel (0 on background). Without any background pixel every
/// foreground value is width^2 + height^2.
std::vector<std::int64_t> squared_distance_transform(const BinaryImage& bin);

/// 8-connected labeling in raster-scan first-touch order.
LabelImage label_components(const BinaryImage& bin);

/// Marker-based watershed on the negated distance transform. Markers are
/// plateau-merged 8-neighbourhood maxima; pixels reached by several basins go
/// to the basin whose marker centroid is nearest (ties -> lower label).
LabelImage watershed_split(const BinaryImage& bin);

struct PoreGeometry {
  int label = 0;
  std::int64_t area = 0;       // px^2
  std::int64_t perimeter = 0;  // boundary pixel edges
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double radius = 0.0;         // sqrt(area / pi)
};

struct PoreStats {
  int width = 0;
  int height = 0;
  std::vector<PoreGeometry> pores;
  double porosity_pct = 0.0;
  double mean_radius = 0.0;
  double std_radius = 0.0;
  double mean_perimeter = 0.0;
  double std_perimeter = 0.0;

  std::size_t count() const { return pores.size(); }
  nlohmann::json summary_json() const;
};

PoreStats pore_stats(const LabelImage& labels);

struct PorescanOptions {
  int margin = 0;
  int dilate_radius = 1;
  bool invert = false;
};

struct PorescanResult {
  OtsuResult otsu;
  LabelImage labels;
  PoreStats stats;
};

/// crop -> Otsu -> dilate -> watershed -> stats.
PorescanResult porescan(const GrayImage& img, const PorescanOptions& options = {});

}  // namespace fusegp

#endif  // FUSEGP_PORESCAN_HPP_
