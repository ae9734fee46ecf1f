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

#ifndef FUSEGP_SERIAL_REFERENCE_HPP_
#define FUSEGP_SERIAL_REFERENCE_HPP_

// Straight-loop reference versions of the OpenMP kernels. They follow the
// textbook definitions, are kept for testing and benchmarking, and are not
// used on any production path.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fusegp/kernels.hpp"
#include "fusegp/porescan.hpp"

namespace fusegp::serial {

Eigen::MatrixXd signal_matrix(const Eigen::MatrixXd& x, std::span<const int> source,
                              const Hyperparams& hp);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Task-major C_MT by the per-pair definition
/// C[(g,i),(h,j)] = C_T(g,h) S(i,j) + nugget [g == h and i == j].
Eigen::MatrixXd assemble_cmt(const Eigen::MatrixXd& x, std::span<const int> source,
                             const Hyperparams& hp, const Eigen::MatrixXd& task);

Eigen::VectorXd signal_gradient_contractions(const Eigen::MatrixXd& x,
                                             std::span<const int> source,
                                             const Hyperparams& hp,
                                             const Eigen::MatrixXd& w);

Histogram histogram(const GrayImage& img);

/// Scatter form: stamp the disk at every foreground pixel.
BinaryImage dilate(const BinaryImage& bin, int radius);

/// Brute force over all background pixels.
std::vector<std::int64_t> squared_distance_transform(const BinaryImage& bin);

}  // namespace fusegp::serial

#endif  // FUSEGP_SERIAL_REFERENCE_HPP_
