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

#include "fusegp/porescan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

bool inside(int x, int y, int w, int h) { return x >= 0 && y >= 0 && x < w && y < h; }

// 1-D squared distance transform of sampled function f (Felzenszwalb and
// Huttenlocher lower envelope of parabolas). Writes into out.
void edt_1d(std::span<const double> f, std::span<double> out, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  // Skip leading samples at infinity: they never form the envelope.
  int first = 0;
  while (first < n && !std::isfinite(f[static_cast<std::size_t>(first)])) ++first;
  if (first == n) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = first + 1; q < n; ++q) {
    const double fq = f[static_cast<std::size_t>(q)];
    if (!std::isfinite(fq)) continue;
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      const double fp = f[static_cast<std::size_t>(p)];
      s = ((fq + static_cast<double>(q) * q) - (fp + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int p = v[static_cast<std::size_t>(k)];
    const double d = q - p;
    out[static_cast<std::size_t>(q)] = d * d + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h),
      data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
  if (w < 0 || h < 0) fail(ErrorKind::kInvalidArgument, "negative image size");
}

GrayImage crop_borders(const GrayImage& img, int margin) {
  if (margin < 0 || 2 * margin >= std::min(img.width, img.height)) {
    fail(ErrorKind::kInvalidArgument, "crop margin " + std::to_string(margin) +
                                          " leaves an empty image");
  }
  GrayImage out(img.width - 2 * margin, img.height - 2 * margin);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(x + margin, y + margin);
  }
  return out;
}

Histogram histogram(const GrayImage& img) {
  Histogram hist{};
  const auto n = static_cast<std::int64_t>(img.pixels());
  // Integer counts: the merge order does not affect the result.
#pragma omp parallel
  {
    Histogram local{};
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) ++local[img.data[static_cast<std::size_t>(i)]];
#pragma omp critical
    for (std::size_t b = 0; b < hist.size(); ++b) hist[b] += local[b];
  }
  return hist;
}

OtsuResult otsu_from_histogram(const Histogram& hist) {
  std::uint64_t total = 0;
  unsigned __int128 sum = 0;
  int lowest = -1;
  int highest = -1;
  for (int i = 0; i < 256; ++i) {
    total += hist[static_cast<std::size_t>(i)];
    sum += static_cast<unsigned __int128>(i) * hist[static_cast<std::size_t>(i)];
    if (hist[static_cast<std::size_t>(i)] > 0) {
      if (lowest < 0) lowest = i;
      highest = i;
    }
  }
  if (total == 0) fail(ErrorKind::kInvalidArgument, "Otsu threshold of an empty image");
  if (lowest == highest) return {lowest, true};

  // Between-class variance is proportional to (N S0 - n0 S)^2 / (n0 n1).
  long double best = -1.0L;
  int best_t = lowest;
  std::uint64_t n0 = 0;
  unsigned __int128 s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[static_cast<std::size_t>(t)];
    s0 += static_cast<unsigned __int128>(t) * hist[static_cast<std::size_t>(t)];
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 diff = static_cast<__int128>(s0 * total) - static_cast<__int128>(sum * n0);
    const long double d = static_cast<long double>(diff);
    const long double value = d * d / (static_cast<long double>(n0) * static_cast<long double>(n1));
    if (value > best) {
      best = value;
      best_t = t;
    }
  }
  return {best_t, false};
}

OtsuResult otsu_threshold(const GrayImage& img) { return otsu_from_histogram(histogram(img)); }

BinaryImage binarize(const GrayImage& img, const OtsuResult& otsu, bool invert) {
  BinaryImage out(img.width, img.height, 0);
  if (otsu.degenerate) return out;
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    const bool dark = img.data[i] <= otsu.threshold;
    out.data[i] = (dark != invert) ? 1 : 0;
  }
  return out;
}

BinaryImage dilate(const BinaryImage& bin, int radius) {
  if (radius < 0) fail(ErrorKind::kInvalidArgument, "negative dilation radius");
  if (radius == 0) return bin;
  const int w = bin.width;
  const int h = bin.height;
  // Half-width of the disk on each row offset.
  std::vector<int> half(static_cast<std::size_t>(2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    int dx = 0;
    while ((dx + 1) * (dx + 1) + dy * dy <= radius * radius) ++dx;
    half[static_cast<std::size_t>(dy + radius)] = dx;
  }
  // Per-row prefix counts turn each disk row into one span query.
  const auto stride = static_cast<std::size_t>(w) + 1;
  std::vector<std::int32_t> prefix(stride * static_cast<std::size_t>(h), 0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::int32_t* row = prefix.data() + stride * static_cast<std::size_t>(y);
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + (bin.at(x, y) ? 1 : 0);
  }
  BinaryImage out(w, h, 0);
  // Gather form: each output pixel is owned by one thread.
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int dy = std::max(-radius, -y); dy <= std::min(radius, h - 1 - y); ++dy) {
        const int hw = half[static_cast<std::size_t>(dy + radius)];
        const std::int32_t* row = prefix.data() + stride * static_cast<std::size_t>(y + dy);
        if (row[std::min(w, x + hw + 1)] - row[std::max(0, x - hw)] > 0) {
          out.at(x, y) = 1;
          break;
        }
      }
    }
  }
  return out;
}

std::vector<std::int64_t> squared_distance_transform(const BinaryImage& bin) {
  const int w = bin.width;
  const int h = bin.height;
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = bin.data[i] ? kInf : 0.0;

  // Columns, then rows; each line is independent.
#pragma omp parallel
  {
    const int longest = std::max(w, h);
    std::vector<double> f(static_cast<std::size_t>(longest));
    std::vector<double> out(static_cast<std::size_t>(longest));
    std::vector<int> v(static_cast<std::size_t>(longest));
    std::vector<double> z(static_cast<std::size_t>(longest) + 1);
#pragma omp for schedule(static)
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = grid[bin.index(x, y)];
      edt_1d({f.data(), static_cast<std::size_t>(h)}, {out.data(), static_cast<std::size_t>(h)}, v, z);
      for (int y = 0; y < h; ++y) grid[bin.index(x, y)] = out[static_cast<std::size_t>(y)];
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = grid[bin.index(x, y)];
      edt_1d({f.data(), static_cast<std::size_t>(w)}, {out.data(), static_cast<std::size_t>(w)}, v, z);
      for (int x = 0; x < w; ++x) grid[bin.index(x, y)] = out[static_cast<std::size_t>(x)];
    }
  }

  const std::int64_t cap = static_cast<std::int64_t>(w) * w + static_cast<std::int64_t>(h) * h;
  std::vector<std::int64_t> result(n);
  for (std::size_t i = 0; i < n; ++i) {
    result[i] = std::isfinite(grid[i]) ? static_cast<std::int64_t>(std::llround(grid[i])) : cap;
  }
  return result;
}

LabelImage label_components(const BinaryImage& bin) {
  LabelImage out{bin.width, bin.height, 0, std::vector<std::int32_t>(bin.pixels(), 0)};
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      const auto i = bin.index(x, y);
      if (!bin.data[i] || out.labels[i]) continue;
      const int label = ++out.count;
      out.labels[i] = label;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = cx + kDx[k];
          const int ny = cy + kDy[k];
          if (!inside(nx, ny, bin.width, bin.height)) continue;
          const auto j = bin.index(nx, ny);
          if (bin.data[j] && !out.labels[j]) {
            out.labels[j] = label;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

LabelImage watershed_split(const BinaryImage& bin) {
  const int w = bin.width;
  const int h = bin.height;
  const auto dist = squared_distance_transform(bin);
  LabelImage out{w, h, 0, std::vector<std::int32_t>(bin.pixels(), 0)};

  // Markers: 8-connected plateaus of equal distance with no higher neighbour.
  std::vector<char> visited(bin.pixels(), 0);
  std::vector<std::pair<int, int>> plateau;
  std::vector<std::pair<double, double>> centroid;  // indexed by label - 1
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = bin.index(x, y);
      if (!bin.data[i] || visited[i]) continue;
      const auto level = dist[i];
      bool is_max = true;
      plateau.clear();
      plateau.emplace_back(x, y);
      visited[i] = 1;
      for (std::size_t head = 0; head < plateau.size(); ++head) {
        const auto [cx, cy] = plateau[head];
        for (int k = 0; k < 8; ++k) {
          const int nx = cx + kDx[k];
          const int ny = cy + kDy[k];
          if (!inside(nx, ny, w, h)) continue;
          const auto j = bin.index(nx, ny);
          if (!bin.data[j]) continue;
          if (dist[j] > level) is_max = false;
          if (dist[j] == level && !visited[j]) {
            visited[j] = 1;
            plateau.emplace_back(nx, ny);
          }
        }
      }
      if (!is_max) continue;
      const int label = ++out.count;
      double sx = 0.0;
      double sy = 0.0;
      for (const auto& [px, py] : plateau) {
        out.labels[bin.index(px, py)] = label;
        sx += px;
        sy += py;
      }
      centroid.emplace_back(sx / static_cast<double>(plateau.size()),
                            sy / static_cast<double>(plateau.size()));
    }
  }

  // Flood in descending distance order; FIFO among equal distances.
  using Entry = std::tuple<std::int64_t, std::uint64_t, std::size_t>;
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) > std::get<1>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> queue(lower_priority);
  std::vector<char> queued(bin.pixels(), 0);
  std::uint64_t seq = 0;
  auto push_neighbours = [&](int x, int y) {
    for (int k = 0; k < 8; ++k) {
      const int nx = x + kDx[k];
      const int ny = y + kDy[k];
      if (!inside(nx, ny, w, h)) continue;
      const auto j = bin.index(nx, ny);
      if (bin.data[j] && !out.labels[j] && !queued[j]) {
        queued[j] = 1;
        queue.emplace(dist[j], seq++, j);
      }
    }
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (out.labels[bin.index(x, y)]) push_neighbours(x, y);
    }
  }
  while (!queue.empty()) {
    const auto [level, order, i] = queue.top();
    queue.pop();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    std::int32_t chosen = 0;
    double chosen_d2 = 0.0;
    for (int k = 0; k < 8; ++k) {
      const int nx = x + kDx[k];
      const int ny = y + kDy[k];
      if (!inside(nx, ny, w, h)) continue;
      const std::int32_t cand = out.labels[bin.index(nx, ny)];
      if (!cand || cand == chosen) continue;
      const auto& c = centroid[static_cast<std::size_t>(cand - 1)];
      const double d2 = (c.first - x) * (c.first - x) + (c.second - y) * (c.second - y);
      if (!chosen || d2 < chosen_d2 || (d2 == chosen_d2 && cand < chosen)) {
        chosen = cand;
        chosen_d2 = d2;
      }
    }
    out.labels[i] = chosen;
    push_neighbours(x, y);
  }
  return out;
}

PoreStats pore_stats(const LabelImage& labels) {
  PoreStats stats;
  stats.width = labels.width;
  stats.height = labels.height;
  stats.pores.resize(static_cast<std::size_t>(labels.count));
  std::vector<double> sx(stats.pores.size(), 0.0);
  std::vector<double> sy(stats.pores.size(), 0.0);
  const int w = labels.width;
  const int h = labels.height;
  constexpr int kEdgeX[4] = {-1, 1, 0, 0};
  constexpr int kEdgeY[4] = {0, 0, -1, 1};
  std::int64_t total = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto label = labels.at(x, y);
      if (label <= 0) continue;
      if (label > labels.count) fail(ErrorKind::kInvalidArgument, "label exceeds count");
      auto& pore = stats.pores[static_cast<std::size_t>(label - 1)];
      ++pore.area;
      ++total;
      sx[static_cast<std::size_t>(label - 1)] += x;
      sy[static_cast<std::size_t>(label - 1)] += y;
      for (int e = 0; e < 4; ++e) {
        const int nx = x + kEdgeX[e];
        const int ny = y + kEdgeY[e];
        if (!inside(nx, ny, w, h) || labels.at(nx, ny) != label) ++pore.perimeter;
      }
    }
  }
  const auto n = stats.pores.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto& pore = stats.pores[k];
    pore.label = static_cast<int>(k) + 1;
    const double area = static_cast<double>(pore.area);
    pore.centroid_x = sx[k] / area;
    pore.centroid_y = sy[k] / area;
    pore.radius = std::sqrt(area / std::numbers::pi);
  }
  const double image_area = static_cast<double>(w) * static_cast<double>(h);
  stats.porosity_pct = image_area > 0.0 ? 100.0 * static_cast<double>(total) / image_area : 0.0;
  if (n > 0) {
    double mr = 0.0;
    double mp = 0.0;
    for (const auto& p : stats.pores) {
      mr += p.radius;
      mp += static_cast<double>(p.perimeter);
    }
    mr /= static_cast<double>(n);
    mp /= static_cast<double>(n);
    double vr = 0.0;
    double vp = 0.0;
    for (const auto& p : stats.pores) {
      vr += (p.radius - mr) * (p.radius - mr);
      vp += (static_cast<double>(p.perimeter) - mp) * (static_cast<double>(p.perimeter) - mp);
    }
    stats.mean_radius = mr;
    stats.mean_perimeter = mp;
    stats.std_radius = std::sqrt(vr / static_cast<double>(n));
    stats.std_perimeter = std::sqrt(vp / static_cast<double>(n));
  }
  return stats;
}

nlohmann::json PoreStats::summary_json() const {
  return {{"width", width},
          {"height", height},
          {"count", count()},
          {"porosity_pct", porosity_pct},
          {"mean_radius", mean_radius},
          {"std_radius", std_radius},
          {"mean_perimeter", mean_perimeter},
          {"std_perimeter", std_perimeter}};
}

PorescanResult porescan(const GrayImage& img, const PorescanOptions& options) {
  const GrayImage cropped = options.margin > 0 ? crop_borders(img, options.margin) : img;
  PorescanResult result;
  result.otsu = otsu_threshold(cropped);
  const BinaryImage mask =
      dilate(binarize(cropped, result.otsu, options.invert), options.dilate_radius);
  result.labels = watershed_split(mask);
  result.stats = pore_stats(result.labels);
  return result;
}

}  // namespace fusegp
