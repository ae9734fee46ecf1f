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

#include "fusegp/serial/reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fusegp::serial {

Eigen::MatrixXd signal_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                              const Hyperparams& hp) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        acc += std::pow(10.0, hp.omega(k)) * (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
      }
      double v = hp.sigma2 * std::exp(-acc);
      if (!source.empty() && hp.z) {
        const double li = source[static_cast<std::size_t>(i)] == 0 ? 0.0 : *hp.z;
        const double lj = source[static_cast<std::size_t>(j)] == 0 ? 0.0 : *hp.z;
        v *= std::exp(-(li - lj) * (li - lj));
      }
      s(i, j) = v;
    }
  }
  return s;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

Eigen::MatrixXd assemble_cmt(const Eigen::MatrixXd& x, std::span<const int> source,
                             const Hyperparams& hp, const Eigen::MatrixXd& task) {
  const Eigen::MatrixXd s = serial::signal_matrix(x, source, hp);
  const Eigen::Index n = x.rows();
  const Eigen::Index tasks = task.rows();
  Eigen::MatrixXd c(n * tasks, n * tasks);
  for (Eigen::Index g = 0; g < tasks; ++g)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index h = 0; h < tasks; ++h)
        for (Eigen::Index j = 0; j < n; ++j)
          c(g * n + i, h * n + j) =
              task(g, h) * s(i, j) + ((g == h && i == j) ? hp.nugget : 0.0);
  return c;
}

Eigen::VectorXd signal_gradient_contractions(const Eigen::MatrixXd& x,
                                             std::span<const int> source,
                                             const Hyperparams& hp,
                                             const Eigen::MatrixXd& w) {
  const Eigen::Index d = x.cols();
  const bool fused = !source.empty() && hp.z.has_value();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1 + (hp.z ? 1 : 0));
  const Eigen::MatrixXd s = serial::signal_matrix(x, source, hp);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        g(k) += w(i, j) * s(i, j) * -std::numbers::ln10 * std::pow(10.0, hp.omega(k)) * diff * diff;
      }
      g(d) += w(i, j) * s(i, j) * std::numbers::ln10;
      if (fused && source[static_cast<std::size_t>(i)] != source[static_cast<std::size_t>(j)]) {
        g(d + 1) += w(i, j) * s(i, j) * -2.0 * *hp.z;
      }
    }
  }
  return g;
}

Histogram histogram(const GrayImage& img) {
  Histogram hist{};
  for (const auto v : img.data) ++hist[v];
  return hist;
}

BinaryImage dilate(const BinaryImage& bin, int radius) {
  BinaryImage out(bin.width, bin.height, 0);
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      if (!bin.at(x, y)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int tx = x + dx;
          const int ty = y + dy;
          if (dx * dx + dy * dy <= radius * radius && tx >= 0 && ty >= 0 &&
              tx < bin.width && ty < bin.height) {
            out.at(tx, ty) = 1;
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::int64_t> squared_distance_transform(const BinaryImage& bin) {
  std::vector<std::pair<int, int>> background;
  for (int y = 0; y < bin.height; ++y)
    for (int x = 0; x < bin.width; ++x)
      if (!bin.at(x, y)) background.emplace_back(x, y);
  const std::int64_t cap = static_cast<std::int64_t>(bin.width) * bin.width +
                           static_cast<std::int64_t>(bin.height) * bin.height;
  std::vector<std::int64_t> out(bin.pixels(), 0);
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      if (!bin.at(x, y)) continue;
      std::int64_t best = background.empty() ? cap : std::numeric_limits<std::int64_t>::max();
      for (const auto& [bx, by] : background) {
        const std::int64_t dx = x - bx;
        const std::int64_t dy = y - by;
        best = std::min(best, dx * dx + dy * dy);
      }
      out[bin.index(x, y)] = best;
    }
  }
  return out;
}

}  // namespace fusegp::serial
