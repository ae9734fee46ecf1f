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

// Acceptance harness: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "commands.hpp"
#include "fusegp/dataset.hpp"
#include "fusegp/eval.hpp"
#include "fusegp/gp.hpp"
#include "fusegp/model_io.hpp"
#include "fusegp/mtgp.hpp"
#include "fusegp/porescan.hpp"
#include "fusegp/rng.hpp"
#include "support/images.hpp"
#include "support/synthetic.hpp"

using namespace fusegp;
using fusegp::testing::gp_draw;
using fusegp::testing::normal_vector;
using fusegp::testing::random_hyperparams;
using fusegp::testing::uniform_matrix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

FitOptions quick(int restarts, std::uint64_t seed) {
  FitOptions o;
  o.optimizer.n_restarts = restarts;
  o.optimizer.seed = seed;
  return o;
}

std::vector<int> alternating_sources(Eigen::Index n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int>(i % 2);
  return s;
}

Outcome exact_gp_oracle() {
  const auto start = Clock::now();
  Engine eng(101);
  double worst = 0.0;
  for (int t = 0; t < 60; ++t) {
    const Eigen::Index n = 1 + t % 6;
    const Eigen::Index d = 1 + t % 4;
    const bool fused = t % 3 == 2;
    const Hyperparams hp = random_hyperparams(d, eng, fused);
    const Eigen::MatrixXd x = uniform_matrix(n, d, eng);
    const Eigen::MatrixXd y = normal_vector(n, eng);
    const std::vector<int> src = fused ? alternating_sources(n) : std::vector<int>{};
    const TrainedModel m = TrainedModel::from_hyperparams(GpData::make(x, y, src), hp);
    const Eigen::MatrixXd cinv = cov_matrix(x, src, hp).inverse();
    const Eigen::VectorXd r = y.col(0).array() - hp.beta(0);
    for (int q = 0; q < 5; ++q) {
      const Eigen::VectorXd xs = uniform_matrix(1, d, eng).transpose();
      const int s = fused ? q % 2 : 0;
      Eigen::VectorXd k(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          acc += std::pow(10.0, hp.omega(j)) * std::pow(x(i, j) - xs(j), 2);
        }
        const int si = fused ? src[static_cast<std::size_t>(i)] : 0;
        k(i) = hp.sigma2 * std::exp(-acc) * (si == s ? 1.0 : std::exp(-*hp.z * *hp.z));
      }
      const double mean = hp.beta(0) + k.dot(cinv * r);
      const double var = hp.sigma2 + hp.nugget - k.dot(cinv * k);
      const auto p = m.predict(xs, s);
      worst = std::max({worst, std::abs(p.mean - mean), std::abs(p.variance - var)});
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-10 && secs < 1.0, fmt("max |diff| %.2e, %.3f s", worst, secs)};
}

Outcome gradient_check() {
  const auto start = Clock::now();
  Engine eng(202);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform_index(eng, 9));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(uniform_index(eng, 6));
    const bool fused = t % 2 == 1;
    const Hyperparams hp = random_hyperparams(d, eng, fused);
    const GpData data = GpData::make(uniform_matrix(n, d, eng), normal_vector(n, eng),
                                     fused ? alternating_sources(n) : std::vector<int>{});
    const ParamLayout layout(d, 1, fused);
    const Eigen::VectorXd theta = layout.pack(hp);
    const Eigen::VectorXd g = nll_grad(hp, data);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up(j) += 1e-5;
      dn(j) -= 1e-5;
      const double fd = (nll(layout.unpack(up), data) - nll(layout.unpack(dn), data)) / 2e-5;
      worst = std::max(worst, std::abs(g(j) - fd) / std::max(std::abs(fd), 1e-3));
    }
  }
  const double secs = seconds_since(start);
  return {worst < 1e-4 && secs < 10.0, fmt("max rel err %.2e, %.3f s", worst, secs)};
}

Outcome kronecker_oracle() {
  Engine eng(303);
  double worst = 0.0;
  for (Eigen::Index n = 1; n <= 6; ++n) {
    for (int fused = 0; fused < 2; ++fused) {
      const Eigen::Index d = 3;
      const Hyperparams hp = random_hyperparams(d, eng, fused == 1, 2);
      const Eigen::MatrixXd x = uniform_matrix(n, d, eng);
      const std::vector<int> src = fused ? alternating_sources(n) : std::vector<int>{};
      const Eigen::MatrixXd got = assemble_cmt(x, src, hp);
      const Eigen::MatrixXd ct = hp.task_factor * hp.task_factor.transpose();
      for (int g = 0; g < 2; ++g)
        for (int h = 0; h < 2; ++h)
          for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
              double acc = 0.0;
              for (Eigen::Index k = 0; k < d; ++k) {
                acc += std::pow(10.0, hp.omega(k)) * std::pow(x(i, k) - x(j, k), 2);
              }
              const double sc = fused && src[static_cast<std::size_t>(i)] !=
                                             src[static_cast<std::size_t>(j)]
                                    ? std::exp(-*hp.z * *hp.z)
                                    : 1.0;
              const double want = ct(g, h) * hp.sigma2 * std::exp(-acc) * sc +
                                  (g == h && i == j ? hp.nugget : 0.0);
              worst = std::max(worst, std::abs(got(g * n + i, h * n + j) - want));
            }
    }
  }
  return {worst <= 1e-12, fmt("max |diff| %.2e", worst)};
}

Outcome mtgp_reduction() {
  Engine eng(404);
  double worst_pred = 0.0;
  double worst_nll = 0.0;
  for (int t = 0; t < 6; ++t) {
    const bool fused = t % 2 == 1;
    const Eigen::Index n = 8;
    Hyperparams hp = random_hyperparams(2, eng, fused, 2);
    hp.task_factor = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd x = uniform_matrix(n, 2, eng);
    Eigen::MatrixXd y(n, 2);
    y.col(0) = normal_vector(n, eng);
    y.col(1) = normal_vector(n, eng);
    const std::vector<int> src = fused ? alternating_sources(n) : std::vector<int>{};
    const MultiTaskModel mt = MultiTaskModel::from_hyperparams(GpData::make(x, y, src), hp);
    for (int g = 0; g < 2; ++g) {
      Hyperparams single = hp;
      single.beta = Eigen::VectorXd::Constant(1, hp.beta(g));
      single.task_factor.resize(0, 0);
      const TrainedModel so =
          TrainedModel::from_hyperparams(GpData::make(x, y.col(g), src), single);
      for (int q = 0; q < 10; ++q) {
        const Eigen::VectorXd xs = uniform_matrix(1, 2, eng).transpose();
        const int s = fused ? q % 2 : 0;
        const auto a = so.predict(xs, s);
        const auto b = mt.predict(xs, s).task(g);
        worst_pred = std::max({worst_pred, std::abs(a.mean - b.mean),
                               std::abs(a.variance - b.variance)});
      }
    }
    const Hyperparams one = random_hyperparams(3, eng, fused);
    const GpData d1 = GpData::make(uniform_matrix(7, 3, eng), normal_vector(7, eng),
                                   fused ? alternating_sources(7) : std::vector<int>{});
    worst_nll = std::max(worst_nll, std::abs(nll_mt(one, d1) - nll(one, d1)));
  }
  return {worst_pred <= 1e-8 && worst_nll <= 1e-12,
          fmt("prediction |diff| %.2e, G=1 NLL |diff| %.2e", worst_pred, worst_nll)};
}

Outcome fusion_independence() {
  Engine eng(505);
  double worst = 0.0;
  const double z = 6.0;  // exp(-36) < 1e-12
  for (int t = 0; t < 5; ++t) {
    const Eigen::Index na = 9, nb = 7, d = 3;
    Hyperparams hp = random_hyperparams(d, eng, true);
    hp.z = z;
    const Eigen::MatrixXd xa = uniform_matrix(na, d, eng);
    const Eigen::MatrixXd xb = uniform_matrix(nb, d, eng);
    const Eigen::VectorXd ya = normal_vector(na, eng);
    const Eigen::VectorXd yb = normal_vector(nb, eng);
    Eigen::MatrixXd x(na + nb, d);
    x << xa, xb;
    Eigen::MatrixXd y(na + nb, 1);
    y << ya, yb;
    std::vector<int> src(static_cast<std::size_t>(na), 0);
    src.resize(static_cast<std::size_t>(na + nb), 1);
    const TrainedModel fusedm = TrainedModel::from_hyperparams(
        GpData::make(x, y, src, {"A", "B"}), hp);
    Hyperparams single = hp;
    single.z.reset();
    const TrainedModel ma = TrainedModel::from_hyperparams(GpData::make(xa, ya), single);
    const TrainedModel mb = TrainedModel::from_hyperparams(GpData::make(xb, yb), single);
    for (int q = 0; q < 20; ++q) {
      const Eigen::VectorXd xs = uniform_matrix(1, d, eng).transpose();
      const auto fa = fusedm.predict(xs, "A");
      const auto fb = fusedm.predict(xs, "B");
      const auto pa = ma.predict(xs);
      const auto pb = mb.predict(xs);
      worst = std::max({worst, std::abs(fa.mean - pa.mean), std::abs(fa.variance - pa.variance),
                        std::abs(fb.mean - pb.mean), std::abs(fb.variance - pb.variance)});
    }
  }
  return {worst <= 1e-8, fmt("source corr %.1e, max |diff| %.2e", std::exp(-z * z), worst)};
}

double mean_phi_rmse(const CvReport& report) {
  double sum = 0.0;
  for (const auto& row : report.rows) sum += row.scores.front().mean_rmse;
  return sum / static_cast<double>(report.rows.size());
}

Outcome transferability() {
  const auto start = Clock::now();
  const std::uint64_t seeds[] = {11, 12, 13};
  double fused_hi = 0.0, fused_lo = 0.0, single_lo = 0.0;
  for (const auto seed : seeds) {
    for (const double rho : {0.95, 0.0}) {
      const Dataset data = fusegp::testing::synthetic_process_data(40, rho, seed, 0.5);
      CvConfig cfg;
      cfg.properties = {"phi"};
      cfg.seed = seed;
      cfg.fit = quick(4, seed);
      cfg.fused = true;
      const double fused = mean_phi_rmse(run_cv(data, cfg));
      if (rho > 0.5) {
        fused_hi += fused;
      } else {
        fused_lo += fused;
        cfg.fused = false;
        single_lo += mean_phi_rmse(run_cv(data, cfg));
      }
    }
  }
  const double m = static_cast<double>(std::size(seeds));
  fused_hi /= m;
  fused_lo /= m;
  single_lo /= m;
  const double secs = seconds_since(start);
  const bool pass = fused_hi < fused_lo && fused_lo <= 1.2 * single_lo && secs < 120.0;
  return {pass, fmt("fused rho=0.95 %.4g < rho=0 %.4g", fused_hi, fused_lo) +
                    fmt(", single rho=0 %.4g", single_lo) + fmt(", %.1f s", secs)};
}

Outcome task_sign_recovery() {
  Engine eng(8);
  const Eigen::MatrixXd x = uniform_matrix(30, 2, eng);
  const Eigen::VectorXd f = gp_draw(x, Eigen::VectorXd::Constant(2, 0.5), 1.0, eng);
  Eigen::MatrixXd neg(30, 2);
  neg << f, -f;
  const double c_neg = fit_mt(GpData::make(x, neg), quick(4, 1)).task_correlation();

  Engine eng2(700);
  const Eigen::MatrixXd x2 = uniform_matrix(60, 2, eng2);
  Eigen::MatrixXd ind(60, 2);
  ind.col(0) = gp_draw(x2, Eigen::VectorXd::Constant(2, 0.5), 1.0, eng2);
  ind.col(1) = gp_draw(x2, Eigen::VectorXd::Constant(2, 0.5), 1.0, eng2);
  const double c_ind = fit_mt(GpData::make(x2, ind), quick(4, 1)).task_correlation();
  return {c_neg < -0.99 && std::abs(c_ind) < 0.3,
          fmt("negated tasks %.4f, independent tasks %.4f", c_neg, c_ind)};
}

Outcome lengthscale_interpretability() {
  int good = 0;
  double worst_gap = 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    Engine eng(800 + static_cast<std::uint64_t>(trial));
    const Eigen::MatrixXd x = uniform_matrix(40, 5, eng);
    Eigen::MatrixXd y(40, 1);
    for (Eigen::Index i = 0; i < 40; ++i) y(i, 0) = std::sin(6.0 * x(i, 0));
    const AnyModel m = fit(GpData::make(x, y), quick(4, 1));
    const LengthscaleReport rep = lengthscale_report(m, "SOGP", "synthetic");
    double gap = 1e300;
    for (const auto& row : rep.rows) {
      if (row.feature != "x0") gap = std::min(gap, rep.row("x0").omega - row.omega);
    }
    worst_gap = std::min(worst_gap, gap);
    if (gap >= 1.0) ++good;
  }
  return {good >= 9, fmt("%.0f/10 trials, smallest gap %.3f", good, worst_gap)};
}

// Definitional statistics in long double.
long double def_mean(const std::vector<double>& a) {
  long double s = 0;
  for (const double v : a) s += v;
  return s / static_cast<long double>(a.size());
}

double def_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const long double ma = def_mean(a), mb = def_mean(b);
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

std::vector<double> def_ranks(const std::vector<double>& a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double less = 0, equal = 0;
    for (const double v : a) {
      less += v < a[i];
      equal += v == a[i];
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

Outcome statistics_oracles() {
  Engine eng(909);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + uniform_index(eng, 48);
    std::vector<double> a(n), b(n), ta(n), tb(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = standard_normal(eng);
      b[i] = 0.5 * a[i] + standard_normal(eng);
      ta[i] = static_cast<double>(uniform_index(eng, 6));
      tb[i] = static_cast<double>(uniform_index(eng, 4)) + 0.5 * ta[i];
    }
    ta[0] = 0.0;
    ta[1] = 7.0;
    tb[0] = 0.0;
    tb[1] = 9.0;
    long double sq = 0;
    for (std::size_t i = 0; i < n; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    const double want_rmse = static_cast<double>(std::sqrt(sq / static_cast<long double>(n)));
    worst = std::max(worst, std::abs(rmse(a, b) - want_rmse));
    worst = std::max(worst, std::abs(pearson(a, b) - def_pearson(a, b)));
    worst = std::max(worst, std::abs(spearman(ta, tb) - def_pearson(def_ranks(ta), def_ranks(tb))));
    worst = std::max(worst, std::abs(spearman(a, b) - def_pearson(def_ranks(a), def_ranks(b))));
  }
  return {worst <= 1e-12, fmt("100 vector pairs, max |diff| %.2e", worst)};
}

// Exhaustive Otsu with exact rational comparison of between-class variance
// (N s0 - n0 S)^2 / (n0 n1); ties keep the lowest threshold.
int exhaustive_otsu(const Histogram& h) {
  __int128 n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += h[i];
    s += static_cast<__int128>(i) * h[i];
  }
  int best_t = -1;
  __int128 best_num = 0, best_den = 1;
  __int128 n0 = 0, s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += h[t];
    s0 += static_cast<__int128>(t) * h[t];
    const __int128 n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 diff = n * s0 - n0 * s;
    const __int128 num = diff * diff;
    const __int128 den = n0 * n1;
    if (best_t < 0 || num * best_den > best_num * den) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

Outcome porescan_oracles() {
  const auto start = Clock::now();
  Engine eng(1010);
  int otsu_ok = 0;
  for (int t = 0; t < 50; ++t) {
    Histogram h{};
    for (int i = 0; i < 256; ++i) h[i] = uniform01(eng) < 0.3 ? uniform_index(eng, 60) : 0;
    h[uniform_index(eng, 128)] += 1;
    h[128 + uniform_index(eng, 128)] += 1;
    const OtsuResult got = otsu_from_histogram(h);
    otsu_ok += !got.degenerate && got.threshold == exhaustive_otsu(h);
  }

  const int split = watershed_split(fusegp::testing::two_disks(20, 30)).count;

  int phi_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const int w = 30 + 3 * t;
    const int h = 25 + 2 * t;
    BinaryImage b(w, h, 0);
    std::int64_t area = 0;
    for (int gy = 0; gy + 12 <= h; gy += 12) {
      for (int gx = 0; gx + 12 <= w; gx += 12) {
        const int kind = static_cast<int>(uniform_index(eng, 3));
        if (kind == 0) continue;
        BinaryImage cell(w, h, 0);
        if (kind == 1) {
          fusegp::testing::fill_rect(cell, gx + 1, gy + 1, 1 + static_cast<int>(uniform_index(eng, 10)),
                                     1 + static_cast<int>(uniform_index(eng, 10)));
        } else {
          fusegp::testing::fill_disk(cell, gx + 6, gy + 6, 1 + static_cast<int>(uniform_index(eng, 5)));
        }
        for (std::size_t i = 0; i < cell.pixels(); ++i) {
          area += cell.data[i];
          b.data[i] |= cell.data[i];
        }
      }
    }
    const PoreStats s = pore_stats(watershed_split(b));
    phi_ok += s.porosity_pct == 100.0 * static_cast<double>(area) / (w * h);
  }
  const double secs = seconds_since(start);
  const bool pass = otsu_ok == 50 && split == 2 && phi_ok == 20 && secs < 30.0;
  return {pass, fmt("otsu %.0f/50, two-disk labels %.0f, ", otsu_ok, split) +
                    fmt("porosity %.0f/20, %.2f s", phi_ok, secs)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cv_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "fusegp_acceptance_cv";
  fs::remove_all(root);
  fs::create_directories(root);
  write_csv(fusegp::testing::synthetic_process_data(20, 0.8, 77, 0.3), root / "data.csv");
  cli::RunConfig cfg;
  cfg.command = "cv";
  cfg.data = root / "data.csv";
  cfg.fuse = true;
  cfg.seed = 5;
  cfg.restarts = 3;
  std::string first, second;
  for (int run = 0; run < 2; ++run) {
    cfg.out = root / ("run" + std::to_string(run));
    cli::cmd_cv(cfg);
    (run == 0 ? first : second) =
        slurp(cfg.out / "cv_table.csv") + slurp(cfg.out / "cv_folds.csv");
  }
  fs::remove_all(root);
  return {!first.empty() && first == second,
          fmt("%.0f bytes compared", static_cast<double>(first.size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact GP oracle", exact_gp_oracle},
      {"gradient check", gradient_check},
      {"Kronecker oracle", kronecker_oracle},
      {"MTGP reduction", mtgp_reduction},
      {"fusion independence limit", fusion_independence},
      {"transferability direction", transferability},
      {"MTGP task-sign recovery", task_sign_recovery},
      {"lengthscale interpretability", lengthscale_interpretability},
      {"statistics oracles", statistics_oracles},
      {"porescan oracles", porescan_oracles},
      {"end-to-end determinism", cv_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
