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

#ifndef FUSEGP_IMAGE_IO_HPP_
#define FUSEGP_IMAGE_IO_HPP_

#include <filesystem>
#include <string_view>

#include "fusegp/porescan.hpp"

namespace fusegp {

/// Reads an 8-bit grayscale PGM (P5 or P2) or an 8-bit single-channel PNG,
/// chosen by the file's magic bytes.
GrayImage read_image(const std::filesystem::path& path);
GrayImage parse_pgm(std::string_view bytes, std::string_view origin = "<memory>");

void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Grayscale rendering of a label image for visual inspection: background
/// black, labels spread over 1..255.
GrayImage render_labels(const LabelImage& labels);

}  // namespace fusegp

#endif  // FUSEGP_IMAGE_IO_HPP_
