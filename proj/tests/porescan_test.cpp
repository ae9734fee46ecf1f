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
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "fusegp/error.hpp"
#include "fusegp/image_io.hpp"
#include "fusegp/porescan.hpp"
#include "fusegp/rng.hpp"
#include "fusegp/serial/reference.hpp"
#include "support/images.hpp"

using namespace fusegp;
using fusegp::testing::fill_disk;
using fusegp::testing::fill_rect;
using fusegp::testing::two_disks;

namespace {

// Exhaustive scan over all thresholds with plain long double moments.
int otsu_oracle(const Histogram& h, bool& degenerate) {
  long double n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += h[i];
    s += static_cast<long double>(i) * h[i];
  }
  int best_t = -1;
  long double best = -1;
  for (int t = 0; t < 256; ++t) {
    long double n0 = 0, s0 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += h[i];
      s0 += static_cast<long double>(i) * h[i];
    }
    const long double n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const long double diff = n * s0 - n0 * s;
    const long double v = diff * diff / (n0 * n1);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  degenerate = best_t < 0;
  return best_t;
}

std::int64_t count_on(const BinaryImage& b) {
  std::int64_t c = 0;
  for (const auto v : b.data) c += v;
  return c;
}

BinaryImage random_binary(int w, int h, double density, Engine& eng) {
  BinaryImage b(w, h, 0);
  for (auto& v : b.data) v = uniform01(eng) < density ? 1 : 0;
  return b;
}

}  // namespace

TEST_CASE("crop") {
  GrayImage img(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) img.at(x, y) = static_cast<std::uint8_t>(10 * y + x);
  CHECK(crop_borders(img, 0).data == img.data);
  const GrayImage c = crop_borders(img, 2);
  CHECK(c.width == 6);
  CHECK(c.height == 6);
  CHECK(c.at(0, 0) == 22);
  CHECK(c.at(5, 5) == 77);
  CHECK_THROWS_AS(crop_borders(GrayImage(4, 4), 2), Error);
}

TEST_CASE("otsu examples") {
  GrayImage half(10, 10, 50);
  for (int i = 50; i < 100; ++i) half.data[static_cast<std::size_t>(i)] = 200;
  const OtsuResult r = otsu_threshold(half);
  CHECK_FALSE(r.degenerate);
  CHECK(r.threshold >= 50);
  CHECK(r.threshold < 200);
  bool deg = false;
  CHECK(r.threshold == otsu_oracle(histogram(half), deg));
  CHECK(r.threshold == 50);

  const GrayImage flat(8, 8, 77);
  const OtsuResult f = otsu_threshold(flat);
  CHECK(f.degenerate);
  CHECK(f.threshold == 77);
  CHECK(count_on(binarize(flat, f)) == 0);

  Histogram two{};
  two[0] = 30;
  two[255] = 70;
  CHECK(otsu_from_histogram(two).threshold == 0);
}

TEST_CASE("otsu equals the exhaustive scan") {
  Engine eng(50);
  for (int t = 0; t < 200; ++t) {
    Histogram h{};
    const int kind = t % 3;
    for (int i = 0; i < 256; ++i) {
      if (kind == 0) h[i] = uniform_index(eng, 1000);
      if (kind == 1) h[i] = uniform01(eng) < 0.1 ? uniform_index(eng, 50) : 0;
      if (kind == 2) h[i] = static_cast<std::uint64_t>(
          500 * std::exp(-std::pow((i - 60) / 15.0, 2)) + 300 * std::exp(-std::pow((i - 180) / 25.0, 2)));
    }
    h[uniform_index(eng, 256)] += 1;
    bool deg = false;
    const int expect = otsu_oracle(h, deg);
    const OtsuResult got = otsu_from_histogram(h);
    CHECK(got.degenerate == deg);
    if (!deg) CHECK(got.threshold == expect);
  }
}

TEST_CASE("binarize polarity") {
  GrayImage img(4, 1);
  img.data = {10, 20, 200, 220};
  const OtsuResult r = otsu_threshold(img);
  CHECK(binarize(img, r).data == std::vector<std::uint8_t>{1, 1, 0, 0});
  CHECK(binarize(img, r, true).data == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("dilate examples") {
  BinaryImage dot(5, 5, 0);
  dot.at(2, 2) = 1;
  const BinaryImage plus = dilate(dot, 1);
  CHECK(count_on(plus) == 5);
  CHECK(plus.at(1, 2) == 1);
  CHECK(plus.at(2, 3) == 1);
  CHECK(plus.at(1, 1) == 0);
  CHECK(dilate(dot, 0).data == dot.data);
  const BinaryImage full(6, 4, 1);
  CHECK(dilate(full, 3).data == full.data);
  CHECK_THROWS_AS(dilate(dot, -1), Error);
}

TEST_CASE("dilate matches the scatter reference and grows") {
  Engine eng(51);
  for (int t = 0; t < 20; ++t) {
    const BinaryImage b = random_binary(20 + t, 15 + 2 * t, 0.05, eng);
    const int r = t % 5;
    const BinaryImage d = dilate(b, r);
    CHECK(d.data == serial::dilate(b, r).data);
    CHECK(count_on(d) >= count_on(b));
    for (std::size_t i = 0; i < b.pixels(); ++i)
      if (b.data[i]) CHECK(d.data[i] == 1);
  }
}

TEST_CASE("distance transform matches brute force") {
  Engine eng(52);
  for (int t = 0; t < 20; ++t) {
    const BinaryImage b = random_binary(10 + t, 12 + t % 7, 0.2 + 0.03 * t, eng);
    CHECK(squared_distance_transform(b) == serial::squared_distance_transform(b));
  }
  const BinaryImage full(3, 4, 1);
  for (const auto d : squared_distance_transform(full)) CHECK(d == 25);
}

TEST_CASE("histogram matches the serial count") {
  Engine eng(53);
  GrayImage img(123, 77);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(uniform_index(eng, 256));
  CHECK(histogram(img) == serial::histogram(img));
}

TEST_CASE("component labeling") {
  BinaryImage checker(6, 6, 0);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) checker.at(x, y) = (x + y) % 2;
  CHECK(label_components(checker).count == 1);

  BinaryImage blocks(10, 10, 0);
  fill_rect(blocks, 6, 1, 2, 2);
  fill_rect(blocks, 1, 5, 3, 3);
  const LabelImage l = label_components(blocks);
  CHECK(l.count == 2);
  // raster first-touch order
  CHECK(l.at(6, 1) == 1);
  CHECK(l.at(1, 5) == 2);
  CHECK(label_components(BinaryImage(5, 5, 0)).count == 0);
}

TEST_CASE("watershed examples") {
  BinaryImage apart(60, 30, 0);
  fill_disk(apart, 12, 15, 8);
  fill_disk(apart, 45, 15, 8);
  const LabelImage a = watershed_split(apart);
  CHECK(a.count == 2);
  for (std::size_t i = 0; i < apart.pixels(); ++i) CHECK((a.labels[i] > 0) == (apart.data[i] == 1));
  CHECK(a.at(12, 15) != a.at(45, 15));

  const LabelImage two = watershed_split(two_disks(20, 30));
  CHECK(two.count == 2);

  BinaryImage one(50, 50, 0);
  fill_disk(one, 25, 25, 15);
  CHECK(watershed_split(one).count == 1);
  CHECK(watershed_split(BinaryImage(9, 9, 0)).count == 0);
}

TEST_CASE("watershed refines components") {
  Engine eng(54);
  for (int t = 0; t < 10; ++t) {
    BinaryImage b(80, 60, 0);
    for (int k = 0; k < 6; ++k) {
      fill_disk(b, static_cast<int>(uniform_index(eng, 80)), static_cast<int>(uniform_index(eng, 60)),
                3 + static_cast<int>(uniform_index(eng, 8)));
    }
    const LabelImage ws = watershed_split(b);
    const LabelImage cc = label_components(b);
    CHECK(ws.count >= cc.count);
    std::set<int> used;
    for (std::size_t i = 0; i < b.pixels(); ++i) {
      CHECK((ws.labels[i] > 0) == (b.data[i] == 1));
      if (ws.labels[i] > 0) used.insert(ws.labels[i]);
    }
    CHECK(static_cast<int>(used.size()) == ws.count);
    // each watershed region stays inside one component
    std::vector<int> owner(static_cast<std::size_t>(ws.count) + 1, 0);
    for (std::size_t i = 0; i < b.pixels(); ++i) {
      const int w = ws.labels[i];
      if (!w) continue;
      if (!owner[w]) owner[w] = cc.labels[i];
      CHECK(owner[w] == cc.labels[i]);
    }
  }
}

TEST_CASE("pore statistics examples") {
  LabelImage block{100, 100, 1, std::vector<std::int32_t>(10000, 0)};
  for (int y = 20; y < 30; ++y)
    for (int x = 40; x < 50; ++x) block.labels[static_cast<std::size_t>(y * 100 + x)] = 1;
  const PoreStats s = pore_stats(block);
  REQUIRE(s.count() == 1);
  CHECK(s.pores[0].area == 100);
  CHECK(s.pores[0].perimeter == 40);
  CHECK(s.porosity_pct == 1.0);
  CHECK(s.pores[0].centroid_x == 44.5);
  CHECK(s.pores[0].centroid_y == 24.5);
  CHECK(s.pores[0].radius == doctest::Approx(std::sqrt(100 / M_PI)));

  const PoreStats empty = pore_stats(LabelImage{7, 7, 0, std::vector<std::int32_t>(49, 0)});
  CHECK(empty.count() == 0);
  CHECK(empty.porosity_pct == 0.0);

  const PoreStats full = pore_stats(LabelImage{10, 10, 1, std::vector<std::int32_t>(100, 1)});
  CHECK(full.porosity_pct == 100.0);
  CHECK(full.pores[0].perimeter == 40);
}

TEST_CASE("porosity is exact on constructed fixtures") {
  Engine eng(55);
  for (int t = 0; t < 20; ++t) {
    const int w = 40 + t;
    const int h = 30 + 2 * t;
    BinaryImage b(w, h, 0);
    // non-overlapping rectangles on a coarse grid
    std::int64_t area = 0;
    for (int gy = 0; gy + 10 <= h; gy += 10) {
      for (int gx = 0; gx + 10 <= w; gx += 10) {
        if (uniform01(eng) < 0.4) continue;
        const int rw = 1 + static_cast<int>(uniform_index(eng, 8));
        const int rh = 1 + static_cast<int>(uniform_index(eng, 8));
        fill_rect(b, gx + 1, gy + 1, rw, rh);
        area += rw * rh;
      }
    }
    const PoreStats s = pore_stats(watershed_split(b));
    CHECK(s.porosity_pct == 100.0 * static_cast<double>(area) / (w * h));
    std::int64_t sum = 0;
    for (const auto& p : s.pores) {
      sum += p.area;
      CHECK(p.area >= 1);
    }
    CHECK(sum == area);
  }
}

TEST_CASE("translation moves centroids only") {
  BinaryImage a(60, 60, 0);
  fill_disk(a, 20, 20, 6);
  fill_rect(a, 35, 10, 5, 9);
  BinaryImage b(60, 60, 0);
  fill_disk(b, 27, 31, 6);
  fill_rect(b, 42, 21, 5, 9);
  const PoreStats sa = pore_stats(label_components(a));
  const PoreStats sb = pore_stats(label_components(b));
  REQUIRE(sa.count() == sb.count());
  for (std::size_t k = 0; k < sa.count(); ++k) {
    CHECK(sb.pores[k].area == sa.pores[k].area);
    CHECK(sb.pores[k].perimeter == sa.pores[k].perimeter);
    CHECK(sb.pores[k].centroid_x - sa.pores[k].centroid_x == 7.0);
    CHECK(sb.pores[k].centroid_y - sa.pores[k].centroid_y == 11.0);
  }
}

TEST_CASE("pipeline on a one-block image") {
  GrayImage img(100, 100, 220);
  fill_rect(img, 30, 30, 10, 10, 15);
  PorescanOptions opts;
  opts.dilate_radius = 0;
  const PorescanResult r = porescan(img, opts);
  CHECK(r.stats.count() == 1);
  CHECK(r.stats.porosity_pct == 1.0);
  opts.dilate_radius = 1;
  CHECK(porescan(img, opts).stats.porosity_pct >= 1.0);
  opts.invert = true;
  // bright matrix is the pore phase; dilation eats one ring of the block
  CHECK(porescan(img, opts).stats.porosity_pct == doctest::Approx(100.0 - 0.64));
  CHECK(r.stats.summary_json()["count"] == 1);
}

TEST_CASE("image files") {
  const auto dir = std::filesystem::path(FUSEGP_TEST_DATA);
  const GrayImage png = read_image(dir / "tiny_gray.png");
  CHECK(png.width == 5);
  CHECK(png.height == 4);
  CHECK(png.at(1, 1) == 10);
  CHECK(png.at(0, 0) == 200);
  CHECK_THROWS_AS(read_image(dir / "tiny_rgb.png"), Error);
  CHECK_THROWS_AS(read_image(dir / "corrupt.pgm"), Error);
  CHECK_THROWS_AS(read_image(dir / "missing.pgm"), Error);

  const auto path = std::filesystem::temp_directory_path() / "fusegp_rt.pgm";
  write_pgm(png, path);
  const GrayImage back = read_image(path);
  std::filesystem::remove(path);
  CHECK(back.data == png.data);

  const GrayImage ascii = parse_pgm("P2\n# note\n3 2\n255\n0 1 2\n3 4 255\n");
  CHECK(ascii.width == 3);
  CHECK(ascii.at(2, 1) == 255);
  CHECK_THROWS_AS(parse_pgm("P6\n1 1\n255\n\x01\x02\x03"), Error);

  const LabelImage l{3, 1, 2, {0, 1, 2}};
  const GrayImage shown = render_labels(l);
  CHECK(shown.at(0, 0) == 0);
  CHECK(shown.at(1, 0) != shown.at(2, 0));
}
