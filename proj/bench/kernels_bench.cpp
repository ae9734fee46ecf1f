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

#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Dense>

#include "fusegp/kernels.hpp"
#include "fusegp/mtgp.hpp"
#include "fusegp/porescan.hpp"
#include "fusegp/rng.hpp"
#include "fusegp/serial/reference.hpp"

namespace {

using namespace fusegp;

struct GpInputs {
  Eigen::MatrixXd x;
  std::vector<int> source;
  Hyperparams hp;
  Eigen::MatrixXd w;
};

GpInputs make_inputs(Eigen::Index n, bool tasks) {
  Engine eng(7);
  GpInputs in;
  in.x.resize(n, 5);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) in.x(i, j) = uniform01(eng);
  in.source.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < in.source.size(); ++i) in.source[i] = static_cast<int>(i % 2);
  in.hp.omega = Eigen::VectorXd::Constant(5, 0.3);
  in.hp.z = 0.8;
  if (tasks) {
    in.hp.beta = Eigen::VectorXd::Zero(2);
    in.hp.task_factor = Eigen::MatrixXd::Identity(2, 2);
    in.hp.task_factor(1, 0) = -0.6;
  }
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  in.w = a + a.transpose();
  return in;
}

BinaryImage make_mask(int side) {
  Engine eng(11);
  BinaryImage img(side, side, 0);
  for (int k = 0; k < side / 4; ++k) {
    const int cx = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(side)));
    const int cy = static_cast<int>(uniform_index(eng, static_cast<std::uint64_t>(side)));
    const int r = 2 + static_cast<int>(uniform_index(eng, 8));
    for (int y = std::max(0, cy - r); y < std::min(side, cy + r + 1); ++y)
      for (int x = std::max(0, cx - r); x < std::min(side, cx + r + 1); ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = 1;
  }
  return img;
}

GrayImage make_gray(int side) {
  Engine eng(13);
  GrayImage img(side, side, 0);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(uniform_index(eng, 256));
  return img;
}

void BM_SignalMatrix_Serial(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), false);
  for (auto _ : state) benchmark::DoNotOptimize(serial::signal_matrix(in.x, in.source, in.hp));
}
void BM_SignalMatrix_OpenMP(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), false);
  for (auto _ : state) benchmark::DoNotOptimize(signal_matrix(in.x, in.source, in.hp));
}

void BM_AssembleCmt_Serial(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), true);
  const Eigen::MatrixXd task = task_matrix(in.hp);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::assemble_cmt(in.x, in.source, in.hp, task));
}
void BM_AssembleCmt_OpenMP(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), true);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_cmt(in.x, in.source, in.hp));
}

void BM_GradContractions_Serial(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), false);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::signal_gradient_contractions(in.x, in.source, in.hp, in.w));
}
void BM_GradContractions_OpenMP(benchmark::State& state) {
  const auto in = make_inputs(state.range(0), false);
  for (auto _ : state)
    benchmark::DoNotOptimize(signal_gradient_contractions(in.x, in.source, in.hp, in.w));
}

void BM_Histogram_Serial(benchmark::State& state) {
  const auto img = make_gray(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::histogram(img));
}
void BM_Histogram_OpenMP(benchmark::State& state) {
  const auto img = make_gray(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(histogram(img));
}

void BM_Dilate_Serial(benchmark::State& state) {
  const auto img = make_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::dilate(img, 2));
}
void BM_Dilate_OpenMP(benchmark::State& state) {
  const auto img = make_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dilate(img, 2));
}

void BM_DistanceTransform_Serial(benchmark::State& state) {
  const auto img = make_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::squared_distance_transform(img));
}
void BM_DistanceTransform_OpenMP(benchmark::State& state) {
  const auto img = make_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(squared_distance_transform(img));
}

}  // namespace

BENCHMARK(BM_SignalMatrix_Serial)->Arg(100)->Arg(400);
BENCHMARK(BM_SignalMatrix_OpenMP)->Arg(100)->Arg(400);
BENCHMARK(BM_AssembleCmt_Serial)->Arg(100)->Arg(300);
BENCHMARK(BM_AssembleCmt_OpenMP)->Arg(100)->Arg(300);
BENCHMARK(BM_GradContractions_Serial)->Arg(100)->Arg(400);
BENCHMARK(BM_GradContractions_OpenMP)->Arg(100)->Arg(400);
BENCHMARK(BM_Histogram_Serial)->Arg(512)->Arg(2048);
BENCHMARK(BM_Histogram_OpenMP)->Arg(512)->Arg(2048);
BENCHMARK(BM_Dilate_Serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_Dilate_OpenMP)->Arg(256)->Arg(1024);
// The brute-force reference is quadratic in the pixel count.
BENCHMARK(BM_DistanceTransform_Serial)->Arg(64)->Arg(128);
BENCHMARK(BM_DistanceTransform_OpenMP)->Arg(64)->Arg(128)->Arg(1024);

BENCHMARK_MAIN();
