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

#include "fusegp/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class PgmReader {
 public:
  PgmReader(std::string_view bytes, std::string_view origin)
      : bytes_(bytes), origin_(origin) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      bad("expected an integer");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000) bad("integer out of range");
    }
    return static_cast<int>(value);
  }

  // After the maxval a single whitespace byte precedes binary data.
  void skip_one_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      bad("missing separator before pixel data");
    }
    ++pos_;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }
  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorKind::kData, std::string(origin_) + ": invalid PGM, " + what);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::string_view origin_;
  std::size_t pos_ = 2;
};

GrayImage read_png(const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) fail(ErrorKind::kIo, "cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorKind::kIo, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::kIo, "libpng initialization failed");
  }
  GrayImage img;
  // libpng reports errors through longjmp; nothing with a destructor may be
  // created between setjmp and the calls below.
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kData, path.string() + ": corrupt PNG");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kData, path.string() + ": only 8-bit single-channel PNG is supported");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.data.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height), 0);
  rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    rows[static_cast<std::size_t>(y)] = img.data.data() + img.index(0, y);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace

GrayImage parse_pgm(std::string_view bytes, std::string_view origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    fail(ErrorKind::kData, std::string(origin) + ": not a PGM file");
  }
  const bool binary = bytes[1] == '5';
  PgmReader reader(bytes, origin);
  const int w = reader.next_int();
  const int h = reader.next_int();
  const int maxval = reader.next_int();
  if (w <= 0 || h <= 0) reader.bad("non-positive size");
  if (maxval <= 0 || maxval > 255) reader.bad("only 8-bit images are supported");
  GrayImage img(w, h);
  if (binary) {
    reader.skip_one_space();
    const auto data = reader.rest();
    if (data.size() < img.pixels()) reader.bad("truncated pixel data");
    for (std::size_t i = 0; i < img.pixels(); ++i) {
      const auto v = static_cast<unsigned char>(data[i]);
      if (v > maxval) reader.bad("pixel exceeds maxval");
      img.data[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  } else {
    for (std::size_t i = 0; i < img.pixels(); ++i) {
      const int v = reader.next_int();
      if (v > maxval) reader.bad("pixel exceeds maxval");
      img.data[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return img;
}

GrayImage read_image(const std::filesystem::path& path) {
  std::string bytes = slurp(path);
  if (bytes.size() >= 8 && bytes.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0) return read_png(path);
  return parse_pgm(bytes, path.string());
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

GrayImage render_labels(const LabelImage& labels) {
  GrayImage out(labels.width, labels.height, 0);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto l = labels.labels[i];
    if (l > 0) out.data[i] = static_cast<std::uint8_t>(1 + (l * 37) % 255);
  }
  return out;
}

}  // namespace fusegp
