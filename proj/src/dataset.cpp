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

#include "fusegp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "fusegp/error.hpp"
#include "fusegp/rng.hpp"

namespace fusegp {
namespace {

constexpr std::string_view kColumns[] = {"sample_id", "p_w",      "v_mm_s",
                                         "l_um",      "h_um",     "sr_deg",
                                         "material",  "phi_pct",  "hv"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::string_view column,
                    std::string_view where) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(ErrorKind::kData, std::string(where) + ": unparseable number '" +
                               std::string(field) + "' in column " +
                               std::string(column));
  }
  return value;
}

void check_range(double value, double lo, double hi, std::string_view column,
                 std::string_view where) {
  if (value < lo || value > hi) {
    std::ostringstream msg;
    msg << where << ": " << column << "=" << value << " outside [" << lo << ", "
        << hi << "]";
    fail(ErrorKind::kData, msg.str());
  }
}

}  // namespace

const std::vector<std::string>& process_feature_names() {
  static const std::vector<std::string> names = {"p", "v", "l", "h", "sr"};
  return names;
}

Dataset Dataset::with_properties(std::vector<std::string> properties) {
  Dataset d;
  d.properties_ = std::move(properties);
  d.responses_.resize(0, static_cast<Eigen::Index>(d.properties_.size()));
  return d;
}

std::size_t Dataset::property_index(std::string_view property) const {
  const auto it = std::find(properties_.begin(), properties_.end(), property);
  if (it == properties_.end()) {
    fail(ErrorKind::kInvalidArgument,
         "unknown property '" + std::string(property) + "'");
  }
  return static_cast<std::size_t>(it - properties_.begin());
}

Eigen::VectorXd Dataset::response(std::string_view property) const {
  return responses_.col(static_cast<Eigen::Index>(property_index(property)));
}

std::size_t Dataset::source_index(std::string_view material) const {
  const auto it = std::find(sources_.begin(), sources_.end(), material);
  if (it == sources_.end()) {
    fail(ErrorKind::kInvalidArgument,
         "unknown material '" + std::string(material) + "'");
  }
  return static_cast<std::size_t>(it - sources_.begin());
}

void Dataset::add_row(std::string sample_id, ProcessPoint point,
                      std::span<const double> response_values) {
  if (response_values.size() != properties_.size()) {
    fail(ErrorKind::kInvalidArgument, "response count does not match properties");
  }
  if (std::find(ids_.begin(), ids_.end(), sample_id) != ids_.end()) {
    fail(ErrorKind::kData, "duplicate sample id '" + sample_id + "'");
  }
  if (std::find(sources_.begin(), sources_.end(), point.material) == sources_.end()) {
    sources_.push_back(point.material);
  }
  const Eigen::Index row = responses_.rows();
  responses_.conservativeResize(row + 1, static_cast<Eigen::Index>(properties_.size()));
  for (std::size_t k = 0; k < response_values.size(); ++k) {
    responses_(row, static_cast<Eigen::Index>(k)) = response_values[k];
  }
  ids_.push_back(std::move(sample_id));
  points_.push_back(std::move(point));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out = with_properties(properties_);
  std::vector<double> values(properties_.size());
  for (const auto r : rows) {
    for (std::size_t k = 0; k < properties_.size(); ++k) {
      values[k] = responses_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
    }
    out.add_row(ids_[r], points_[r], values);
  }
  return out;
}

std::vector<std::size_t> Dataset::rows_of(std::string_view material) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].material == material) rows.push_back(i);
  }
  return rows;
}

Dataset Dataset::filter_source(std::string_view material) const {
  source_index(material);
  return subset(rows_of(material));
}

Dataset parse_csv(std::string_view text, const ValidationBounds& bounds,
                  std::string_view origin) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find('\n', start);
      if (pos == std::string_view::npos) pos = text.size();
      auto line = text.substr(start, pos - start);
      if (!trim(line).empty()) lines.push_back(line);
      start = pos + 1;
    }
  }
  if (lines.empty()) fail(ErrorKind::kData, std::string(origin) + ": empty file");

  // Strip a UTF-8 byte-order mark from the header.
  auto header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = split(header_line);
  std::size_t col[std::size(kColumns)];
  for (std::size_t c = 0; c < std::size(kColumns); ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      fail(ErrorKind::kData, std::string(origin) + ": missing column '" +
                                 std::string(kColumns[c]) + "'");
    }
    col[c] = static_cast<std::size_t>(it - header.begin());
  }

  Dataset data = Dataset::with_properties({std::string(kPhi), std::string(kHv)});
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(lines[li]);
    const std::string where = std::string(origin) + ":" + std::to_string(li + 1);
    if (fields.size() != header.size()) {
      fail(ErrorKind::kData, where + ": expected " + std::to_string(header.size()) +
                                 " fields, got " + std::to_string(fields.size()));
    }
    auto num = [&](std::size_t c) {
      return parse_number(fields[col[c]], kColumns[c], where);
    };
    ProcessPoint pt;
    pt.p = num(1);
    pt.v = num(2);
    pt.l = num(3);
    pt.h = num(4);
    pt.sr = num(5);
    pt.material = std::string(fields[col[6]]);
    const double phi = num(7);
    const double hv = num(8);
    if (pt.material.empty()) fail(ErrorKind::kData, where + ": empty material");
    if (std::string(fields[col[0]]).empty()) {
      fail(ErrorKind::kData, where + ": empty sample_id");
    }
    if (bounds.enabled) {
      check_range(pt.p, bounds.p_min, bounds.p_max, "p_w", where);
      check_range(pt.v, bounds.v_min, bounds.v_max, "v_mm_s", where);
      check_range(pt.l, bounds.l_min, bounds.l_max, "l_um", where);
      check_range(pt.h, bounds.h_min, bounds.h_max, "h_um", where);
      if (pt.sr != 67.0 && pt.sr != 90.0) {
        fail(ErrorKind::kData, where + ": sr outside {67,90}");
      }
    }
    check_range(phi, 0.0, 100.0, "phi_pct", where);
    if (!(hv > 0.0)) fail(ErrorKind::kData, where + ": hv must be positive");
    const double values[] = {phi, hv};
    data.add_row(std::string(fields[col[0]]), std::move(pt), values);
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const ValidationBounds& bounds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), bounds, path.string());
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "sample_id,p_w,v_mm_s,l_um,h_um,sr_deg,material,phi_pct,hv\n";
  const auto phi = data.property_index(kPhi);
  const auto hv = data.property_index(kHv);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& pt = data.points()[i];
    const auto r = static_cast<Eigen::Index>(i);
    out << data.sample_ids()[i] << ',' << pt.p << ',' << pt.v << ',' << pt.l << ','
        << pt.h << ',' << pt.sr << ',' << pt.material << ','
        << data.responses()(r, static_cast<Eigen::Index>(phi)) << ','
        << data.responses()(r, static_cast<Eigen::Index>(hv)) << '\n';
  }
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.property_names() != b.property_names()) {
    fail(ErrorKind::kData, "cannot concatenate datasets with different properties");
  }
  Dataset out = a;
  std::vector<double> values(b.property_names().size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      values[k] = b.responses()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    out.add_row(b.sample_ids()[i], b.points()[i], values);
  }
  return out;
}

std::size_t NormalizationSpec::feature_index(std::string_view name) const {
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j].name == name) return j;
  }
  fail(ErrorKind::kInvalidArgument, "unknown feature '" + std::string(name) + "'");
}

Eigen::VectorXd raw_features(const ProcessPoint& point) {
  Eigen::VectorXd x(5);
  x << point.p, point.v, point.l, point.h, point.sr;
  return x;
}

NormalizationSpec fit_normalization(const Dataset& data) {
  if (data.size() < 2) fail(ErrorKind::kData, "normalization needs at least 2 rows");
  NormalizationSpec spec;
  const auto& names = process_feature_names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    FeatureRange range{names[j], 0.0, 1.0, false};
    if (names[j] == "sr") {
      // Fixed map 67 -> 0, 90 -> 1 regardless of which levels appear.
      range = {names[j], 67.0, 90.0, true};
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& pt : data.points()) {
        const double v = raw_features(pt)(static_cast<Eigen::Index>(j));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) {
        fail(ErrorKind::kData, "constant column '" + names[j] + "' cannot be scaled");
      }
      range.min = lo;
      range.max = hi;
    }
    spec.features.push_back(range);
  }
  const auto n = static_cast<double>(data.size());
  for (std::size_t k = 0; k < data.property_names().size(); ++k) {
    const Eigen::VectorXd col = data.responses().col(static_cast<Eigen::Index>(k));
    const double mean = col.sum() / n;
    // Sample variance (n - 1).
    const double var = (col.array() - mean).square().sum() / (n - 1.0);
    if (!(var > 0.0)) {
      fail(ErrorKind::kData,
           "constant response '" + data.property_names()[k] + "' cannot be standardized");
    }
    spec.responses.push_back({data.property_names()[k], mean, std::sqrt(var)});
  }
  return spec;
}

NormalizedData apply_normalization(const Dataset& data, const NormalizationSpec& spec) {
  NormalizedData out;
  out.spec = spec;
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(spec.features.size());
  out.x.resize(n, d);
  out.y.resize(n, static_cast<Eigen::Index>(spec.responses.size()));
  out.source_labels = data.sources();
  out.source.reserve(data.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = data.points()[static_cast<std::size_t>(i)];
    const Eigen::VectorXd raw = raw_features(pt);
    for (Eigen::Index j = 0; j < d; ++j) {
      out.x(i, j) = spec.scale_feature(static_cast<std::size_t>(j), raw(j));
    }
    for (std::size_t k = 0; k < spec.responses.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(data.property_index(spec.responses[k].name));
      out.y(i, static_cast<Eigen::Index>(k)) = spec.standardize(k, data.responses()(i, col));
    }
    out.source.push_back(static_cast<int>(data.source_index(pt.material)));
  }
  return out;
}

NormalizedData normalize(const Dataset& data) {
  return apply_normalization(data, fit_normalization(data));
}

double compute_ved(double p, double v, double h_um, double l_um) {
  if (!(v > 0.0) || !(h_um > 0.0) || !(l_um > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "VED needs positive v, h and l");
  }
  return p / (v * (h_um / 1000.0) * (l_um / 1000.0));
}

std::vector<std::size_t> FoldAssignment::test_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

nlohmann::json FoldAssignment::to_json() const {
  return {{"k", k}, {"seed", seed}, {"assignment", assignment}};
}

FoldAssignment kfold(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    fail(ErrorKind::kInvalidArgument, "kfold needs 2 <= k <= n (k=" +
                                          std::to_string(k) + ", n=" +
                                          std::to_string(n) + ")");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Engine eng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[uniform_index(eng, i + 1)]);
  }
  FoldAssignment folds{k, seed, std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    folds.assignment[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return folds;
}

double median_hardness(std::span<const double> grid) {
  if (grid.size() != 36) {
    fail(ErrorKind::kData, "hardness grid needs 36 values, got " +
                               std::to_string(grid.size()));
  }
  std::vector<double> v(grid.begin(), grid.end());
  for (const double x : v) {
    if (!std::isfinite(x)) fail(ErrorKind::kData, "non-finite hardness value");
  }
  std::sort(v.begin(), v.end());
  return 0.5 * (v[17] + v[18]);
}

std::vector<double> read_hardness_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 6) {
      fail(ErrorKind::kData, path.string() + ": hardness row " +
                                 std::to_string(rows + 1) + " needs 6 values");
    }
    for (const auto f : fields) values.push_back(parse_number(f, "hv", path.string()));
    ++rows;
  }
  if (rows != 6) {
    fail(ErrorKind::kData, path.string() + ": hardness grid needs 6 rows, got " +
                               std::to_string(rows));
  }
  return values;
}

}  // namespace fusegp
