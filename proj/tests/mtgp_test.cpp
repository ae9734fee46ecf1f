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

#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fusegp/error.hpp"
#include "fusegp/gp.hpp"
#include "fusegp/mtgp.hpp"
#include "fusegp/rng.hpp"
#include "fusegp/serial/reference.hpp"
#include "support/synthetic.hpp"

using namespace fusegp;
using fusegp::testing::gp_draw;
using fusegp::testing::normal_vector;
using fusegp::testing::random_hyperparams;
using fusegp::testing::uniform_matrix;

namespace {

FitOptions quick(int restarts = 4, std::uint64_t seed = 1) {
  FitOptions o;
  o.optimizer.n_restarts = restarts;
  o.optimizer.seed = seed;
  return o;
}

Hyperparams single_task(const Hyperparams& hp, int g) {
  Hyperparams s = hp;
  s.beta = Eigen::VectorXd::Constant(1, hp.beta(g));
  s.task_factor.resize(0, 0);
  return s;
}

}  // namespace

TEST_CASE("single task covariance equals the single-output one") {
  Engine eng(1);
  const Hyperparams hp = random_hyperparams(3, eng, false);
  const Eigen::MatrixXd x = uniform_matrix(5, 3, eng);
  CHECK((assemble_cmt(x, {}, hp) - cov_matrix(x, {}, hp)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kronecker assembly equals the per-pair loop") {
  Engine eng(2);
  for (Eigen::Index n = 1; n <= 6; ++n) {
    for (int t = 0; t < 4; ++t) {
      const bool fused = t % 2 == 1;
      const Hyperparams hp = random_hyperparams(2, eng, fused, 2);
      const Eigen::MatrixXd x = uniform_matrix(n, 2, eng);
      std::vector<int> src;
      if (fused)
        for (Eigen::Index i = 0; i < n; ++i) src.push_back(static_cast<int>(uniform_index(eng, 2)));
      const Eigen::MatrixXd fast = assemble_cmt(x, src, hp);
      const Eigen::MatrixXd slow = serial::assemble_cmt(x, src, hp, task_cov(hp.task_factor).matrix);
      CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("identity task covariance gives two equal blocks") {
  Engine eng(3);
  Hyperparams hp = random_hyperparams(2, eng, false, 2);
  hp.task_factor = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd x = uniform_matrix(4, 2, eng);
  const Eigen::MatrixXd c = assemble_cmt(x, {}, hp);
  CHECK(c.block(0, 0, 4, 4) == c.block(4, 4, 4, 4));
  CHECK(c.block(0, 4, 4, 4).isZero(0.0));
  CHECK(c.block(0, 0, 4, 4) == cov_matrix(x, {}, hp));
}

TEST_CASE("multi-task gradient matches central differences") {
  Engine eng(31);
  for (int t = 0; t < 8; ++t) {
    const Eigen::Index d = 1 + t % 3;
    const bool fused = t % 2 == 0;
    const Hyperparams hp = random_hyperparams(d, eng, fused, 2);
    const Eigen::MatrixXd x = uniform_matrix(5, d, eng);
    Eigen::MatrixXd y(5, 2);
    y.col(0) = normal_vector(5, eng);
    y.col(1) = normal_vector(5, eng);
    std::vector<int> src;
    if (fused) src = {0, 1, 1, 0, 1};
    const GpData data = GpData::make(x, y, src);
    const ParamLayout layout(d, 2, fused);
    // the layout pins L(0,0) = 1
    Hyperparams pinned = hp;
    pinned.task_factor(0, 0) = 1.0;
    const Eigen::VectorXd theta = layout.pack(pinned);
    Eigen::VectorXd g;
    nll_mt_with_grad(pinned, data, g);
    REQUIRE(g.size() == theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up(j) += 1e-5;
      dn(j) -= 1e-5;
      const double fd =
          (nll_mt(layout.unpack(up), data) - nll_mt(layout.unpack(dn), data)) / 2e-5;
      CHECK(std::abs(g(j) - fd) / std::max(std::abs(fd), 1e-3) < 1e-4);
    }
  }
}

TEST_CASE("one task reduces to the single-output model") {
  Engine eng(4);
  for (int t = 0; t < 5; ++t) {
    const bool fused = t % 2 == 1;
    const Hyperparams hp = random_hyperparams(3, eng, fused);
    const Eigen::MatrixXd x = uniform_matrix(7, 3, eng);
    const Eigen::MatrixXd y = normal_vector(7, eng);
    std::vector<int> src;
    if (fused) src = {0, 0, 1, 1, 0, 1, 0};
    const GpData data = GpData::make(x, y, src);
    CHECK(std::abs(nll_mt(hp, data) - nll(hp, data)) <= 1e-12);
    const TrainedModel so = TrainedModel::from_hyperparams(data, hp);
    const MultiTaskModel mt = MultiTaskModel::from_hyperparams(data, hp);
    for (int q = 0; q < 5; ++q) {
      const Eigen::VectorXd xs = uniform_matrix(1, 3, eng).transpose();
      const int s = fused ? q % 2 : 0;
      const auto a = so.predict(xs, s);
      const auto b = mt.predict(xs, s);
      CHECK(std::abs(a.mean - b.mean(0)) <= 1e-12);
      CHECK(std::abs(a.variance - b.covariance(0, 0)) <= 1e-12);
    }
  }
}

TEST_CASE("independent tasks match separate single-output models") {
  Engine eng(5);
  Hyperparams hp = random_hyperparams(2, eng, false, 2);
  hp.task_factor = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd x = uniform_matrix(9, 2, eng);
  Eigen::MatrixXd y(9, 2);
  y.col(0) = normal_vector(9, eng);
  y.col(1) = normal_vector(9, eng);
  const MultiTaskModel mt = MultiTaskModel::from_hyperparams(GpData::make(x, y), hp);
  for (int g = 0; g < 2; ++g) {
    const TrainedModel so =
        TrainedModel::from_hyperparams(GpData::make(x, y.col(g)), single_task(hp, g));
    for (int q = 0; q < 10; ++q) {
      const Eigen::VectorXd xs = uniform_matrix(1, 2, eng).transpose();
      const auto a = so.predict(xs);
      const auto b = mt.predict(xs).task(g);
      CHECK(std::abs(a.mean - b.mean) <= 1e-8);
      CHECK(std::abs(a.variance - b.variance) <= 1e-8);
    }
  }
}

TEST_CASE("multi-task interpolation, reversion and psd covariance") {
  Engine eng(6);
  Hyperparams hp = random_hyperparams(2, eng, false, 2);
  hp.nugget = 1e-11;
  const Eigen::MatrixXd x = uniform_matrix(8, 2, eng);
  Eigen::MatrixXd y(8, 2);
  y.col(0) = normal_vector(8, eng);
  y.col(1) = normal_vector(8, eng);
  const MultiTaskModel m = MultiTaskModel::from_hyperparams(GpData::make(x, y), hp);
  for (Eigen::Index i = 0; i < 8; ++i) {
    const auto p = m.predict(x.row(i).transpose());
    CHECK(std::abs(p.mean(0) - y(i, 0)) < 1e-6);
    CHECK(std::abs(p.mean(1) - y(i, 1)) < 1e-6);
  }
  const auto far = m.predict(Eigen::VectorXd::Constant(2, 40.0));
  const Eigen::MatrixXd ct = task_cov(hp.task_factor).matrix;
  for (int g = 0; g < 2; ++g) {
    CHECK(far.mean(g) == doctest::Approx(hp.beta(g)).epsilon(1e-12));
    CHECK(far.covariance(g, g) ==
          doctest::Approx(hp.sigma2 * ct(g, g) + hp.nugget).epsilon(1e-12));
  }
  for (int q = 0; q < 50; ++q) {
    const auto p = m.predict(uniform_matrix(1, 2, eng).transpose());
    CHECK(p.covariance == p.covariance.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.covariance);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("swapping tasks swaps predictions") {
  Engine eng(7);
  const Hyperparams hp = random_hyperparams(2, eng, false, 2);
  const Eigen::MatrixXd x = uniform_matrix(7, 2, eng);
  Eigen::MatrixXd y(7, 2);
  y.col(0) = normal_vector(7, eng);
  y.col(1) = normal_vector(7, eng);
  Eigen::MatrixXd perm(2, 2);
  perm << 0, 1, 1, 0;
  Hyperparams sw = hp;
  sw.beta = perm * hp.beta;
  sw.task_factor = Eigen::MatrixXd(
      (perm * task_cov(hp.task_factor).matrix * perm).llt().matrixL());
  Eigen::MatrixXd ys(7, 2);
  ys.col(0) = y.col(1);
  ys.col(1) = y.col(0);
  const MultiTaskModel a = MultiTaskModel::from_hyperparams(GpData::make(x, y), hp);
  const MultiTaskModel b = MultiTaskModel::from_hyperparams(GpData::make(x, ys), sw);
  for (int q = 0; q < 10; ++q) {
    const Eigen::VectorXd xs = uniform_matrix(1, 2, eng).transpose();
    const auto pa = a.predict(xs);
    const auto pb = b.predict(xs);
    CHECK(std::abs(pa.mean(0) - pb.mean(1)) <= 1e-10);
    CHECK(std::abs(pa.mean(1) - pb.mean(0)) <= 1e-10);
    CHECK(std::abs(pa.covariance(0, 0) - pb.covariance(1, 1)) <= 1e-10);
    CHECK(std::abs(pa.covariance(0, 1) - pb.covariance(1, 0)) <= 1e-10);
  }
}

TEST_CASE("fit recovers the task correlation sign") {
  Engine eng(8);
  const Eigen::MatrixXd x = uniform_matrix(30, 2, eng);
  const Eigen::VectorXd f = gp_draw(x, Eigen::VectorXd::Constant(2, 0.5), 1.0, eng);
  Eigen::MatrixXd same(30, 2), neg(30, 2);
  same << f, f;
  neg << f, -f;
  CHECK(fit_mt(GpData::make(x, same), quick()).task_correlation() > 0.99);
  CHECK(fit_mt(GpData::make(x, neg), quick()).task_correlation() < -0.99);
}

TEST_CASE("independent noise tasks are uncorrelated") {
  Engine eng(60);
  const Eigen::MatrixXd x = uniform_matrix(60, 2, eng);
  Eigen::MatrixXd y(60, 2);
  y.col(0) = normal_vector(60, eng);
  y.col(1) = normal_vector(60, eng);
  const MultiTaskModel m = fit_mt(GpData::make(x, y), quick(8, 2));
  CHECK(std::abs(m.task_correlation()) < 0.3);
}

TEST_CASE("multi-task fit needs two tasks") {
  Engine eng(9);
  const Eigen::MatrixXd x = uniform_matrix(5, 1, eng);
  CHECK_THROWS_AS(fit_mt(GpData::make(x, normal_vector(5, eng))), Error);
}
