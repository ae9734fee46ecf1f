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

#include "fusegp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "fusegp/error.hpp"
#include "fusegp/mtgp.hpp"

namespace fusegp {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) fail(ErrorKind::kInvalidArgument, "length mismatch");
  if (a.size() < min_len) {
    fail(ErrorKind::kInvalidArgument,
         "need at least " + std::to_string(min_len) + " values");
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// Model inputs of process points under a fitted spec.
Eigen::VectorXd scaled_features(const ProcessPoint& pt, const NormalizationSpec& spec) {
  const Eigen::VectorXd raw = raw_features(pt);
  Eigen::VectorXd x(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    x(j) = spec.scale_feature(static_cast<std::size_t>(j), raw(j));
  }
  return x;
}

// Fits on `train` and returns test predictions, n_test x properties, in
// response units.
Eigen::MatrixXd fit_and_predict(const Dataset& train, const Dataset& test,
                                const CvConfig& config) {
  const NormalizationSpec spec = fit_normalization(train);
  const NormalizedData nd = apply_normalization(train, spec);
  const auto n_test = static_cast<Eigen::Index>(test.size());
  const auto n_prop = static_cast<Eigen::Index>(config.properties.size());
  Eigen::MatrixXd pred(n_test, n_prop);

  auto source_of = [&](const auto& model, std::size_t row) {
    return config.fused ? model.source_index(test.points()[row].material) : 0;
  };
  if (config.kind == ModelKind::kSogp) {
    for (Eigen::Index p = 0; p < n_prop; ++p) {
      const GpData data =
          GpData::from(nd, {config.properties[static_cast<std::size_t>(p)]}, config.fused);
      const TrainedModel model = fit(data, config.fit);
      for (Eigen::Index i = 0; i < n_test; ++i) {
        const auto row = static_cast<std::size_t>(i);
        pred(i, p) =
            model.predict(scaled_features(test.points()[row], spec), source_of(model, row)).mean;
      }
    }
  } else {
    const GpData data = GpData::from(nd, config.properties, config.fused);
    const MultiTaskModel model = fit_mt(data, config.fit);
    for (Eigen::Index i = 0; i < n_test; ++i) {
      const auto row = static_cast<std::size_t>(i);
      pred.row(i) = model.predict(scaled_features(test.points()[row], spec), source_of(model, row))
                        .mean.transpose();
    }
  }
  return pred;
}

struct FoldJob {
  std::vector<std::size_t> train;  // rows of the full dataset
  std::vector<std::size_t> test;
  Eigen::MatrixXd pred;
};

void assert_disjoint(const FoldJob& job) {
  std::vector<std::size_t> overlap;
  std::set_intersection(job.train.begin(), job.train.end(), job.test.begin(), job.test.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) fail(ErrorKind::kInvalidArgument, "test rows leaked into training");
}

std::vector<std::size_t> pick(const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (const auto p : positions) out.push_back(rows[p]);
  return out;
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(acc / static_cast<double>(y.size()));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, 2);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "correlation of a constant vector is undefined");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> a) {
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
  std::vector<double> ranks(a.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && a[order[end]] == a[order[start]]) ++end;
    // Positions start..end-1 (0-based) share the mean 1-based rank.
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b, 2);
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  // Avoid "-0" in outputs.
  if (std::string_view(buf) == "-0") return "0";
  return buf;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::kSogp ? "SOGP" : "MTGP"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "sogp" || text == "SOGP") return ModelKind::kSogp;
  if (text == "mtgp" || text == "MTGP") return ModelKind::kMtgp;
  fail(ErrorKind::kInvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

CvReport run_cv(const Dataset& data, const CvConfig& config) {
  if (config.properties.empty()) fail(ErrorKind::kInvalidArgument, "no properties selected");
  for (const auto& p : config.properties) data.property_index(p);
  if (config.kind == ModelKind::kMtgp && config.properties.size() != 2) {
    fail(ErrorKind::kInvalidArgument, "multi-task CV needs both properties");
  }
  const auto& materials = data.sources();
  if (config.fused && materials.size() != 2) {
    fail(ErrorKind::kData, "fused CV needs exactly 2 materials, found " +
                               std::to_string(materials.size()));
  }

  std::vector<std::vector<std::size_t>> material_rows;
  std::vector<FoldAssignment> material_folds;
  for (std::size_t m = 0; m < materials.size(); ++m) {
    material_rows.push_back(data.rows_of(materials[m]));
    material_folds.push_back(kfold(material_rows.back().size(), config.k, config.seed + m));
  }

  // Jobs: (material, fold) without fusion, one per fold with fusion.
  std::vector<FoldJob> jobs;
  if (config.fused) {
    for (int f = 0; f < config.k; ++f) {
      FoldJob job;
      for (std::size_t m = 0; m < materials.size(); ++m) {
        const auto tr = pick(material_rows[m], material_folds[m].train_rows(f));
        const auto te = pick(material_rows[m], material_folds[m].test_rows(f));
        job.train.insert(job.train.end(), tr.begin(), tr.end());
        job.test.insert(job.test.end(), te.begin(), te.end());
      }
      std::sort(job.train.begin(), job.train.end());
      std::sort(job.test.begin(), job.test.end());
      jobs.push_back(std::move(job));
    }
  } else {
    for (std::size_t m = 0; m < materials.size(); ++m) {
      for (int f = 0; f < config.k; ++f) {
        FoldJob job;
        job.train = pick(material_rows[m], material_folds[m].train_rows(f));
        job.test = pick(material_rows[m], material_folds[m].test_rows(f));
        jobs.push_back(std::move(job));
      }
    }
  }
  for (const auto& job : jobs) {
    if (job.train.size() < 2) fail(ErrorKind::kData, "fold with fewer than 2 training rows");
    assert_disjoint(job);
  }

  std::vector<std::exception_ptr> errors(jobs.size());
  const int count = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel_folds)
  for (int j = 0; j < count; ++j) {
    auto& job = jobs[static_cast<std::size_t>(j)];
    try {
      job.pred = fit_and_predict(data.subset(job.train), data.subset(job.test), config);
    } catch (...) {
      errors[static_cast<std::size_t>(j)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CvReport report;
  report.kind = config.kind;
  report.fused = config.fused;
  report.k = config.k;
  report.seed = config.seed;
  report.properties = config.properties;
  for (std::size_t m = 0; m < materials.size(); ++m) {
    CvRow row;
    row.model = to_string(config.kind);
    row.train = config.fused ? std::string(kFusedLabel) : materials[m];
    row.test = materials[m];
    for (std::size_t p = 0; p < config.properties.size(); ++p) {
      PropertyScore score;
      score.property = config.properties[p];
      const auto col = static_cast<Eigen::Index>(data.property_index(score.property));
      std::vector<double> all_y;
      std::vector<double> all_hat;
      for (int f = 0; f < config.k; ++f) {
        const auto& job = jobs[config.fused ? static_cast<std::size_t>(f)
                                            : m * static_cast<std::size_t>(config.k) +
                                                  static_cast<std::size_t>(f)];
        std::vector<double> y;
        std::vector<double> hat;
        for (std::size_t t = 0; t < job.test.size(); ++t) {
          const auto r = job.test[t];
          if (data.points()[r].material != materials[m]) continue;
          y.push_back(data.responses()(static_cast<Eigen::Index>(r), col));
          hat.push_back(job.pred(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(p)));
        }
        score.fold_rmse.push_back(rmse(y, hat));
        all_y.insert(all_y.end(), y.begin(), y.end());
        all_hat.insert(all_hat.end(), hat.begin(), hat.end());
      }
      score.mean_rmse = std::accumulate(score.fold_rmse.begin(), score.fold_rmse.end(), 0.0) /
                        static_cast<double>(score.fold_rmse.size());
      score.pooled_rmse = rmse(all_y, all_hat);
      row.scores.push_back(std::move(score));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json CvReport::to_json() const {
  nlohmann::json j;
  j["model"] = to_string(kind);
  j["fused"] = fused;
  j["k"] = k;
  j["seed"] = seed;
  j["properties"] = properties;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r{{"model", row.model}, {"train", row.train}, {"test", row.test}};
    for (const auto& s : row.scores) {
      r["scores"][s.property] = {{"fold_rmse", s.fold_rmse},
                                 {"mean_rmse", s.mean_rmse},
                                 {"pooled_rmse", s.pooled_rmse}};
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

void write_cv_table(std::ostream& out, std::span<const CvReport> reports) {
  std::vector<std::string> props;
  for (const auto& rep : reports) {
    for (const auto& p : rep.properties) {
      if (std::find(props.begin(), props.end(), p) == props.end()) props.push_back(p);
    }
  }
  out << "model,train,test";
  for (const auto& p : props) out << ',' << p << "_rmse";
  out << '\n';
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      out << row.model << ',' << row.train << ',' << row.test;
      for (const auto& p : props) {
        out << ',';
        for (const auto& s : row.scores) {
          if (s.property == p) out << format_number(s.mean_rmse);
        }
      }
      out << '\n';
    }
  }
}

void write_cv_folds(std::ostream& out, std::span<const CvReport> reports) {
  out << "model,train,test,property,fold,rmse\n";
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      for (const auto& s : row.scores) {
        for (std::size_t f = 0; f < s.fold_rmse.size(); ++f) {
          out << row.model << ',' << row.train << ',' << row.test << ',' << s.property << ','
              << f << ',' << format_number(s.fold_rmse[f]) << '\n';
        }
      }
    }
  }
}

CorrelationTable correlation_table(const Dataset& a, const Dataset& b) {
  if (a.sources().size() != 1 || b.sources().size() != 1) {
    fail(ErrorKind::kData, "each correlation input must hold exactly one material");
  }
  std::map<std::string, std::size_t> b_rows;
  for (std::size_t i = 0; i < b.size(); ++i) b_rows[b.sample_ids()[i]] = i;
  std::set<std::string> a_ids(a.sample_ids().begin(), a.sample_ids().end());
  std::vector<std::string> missing;
  for (const auto& id : a.sample_ids()) {
    if (!b_rows.count(id)) missing.push_back(id);
  }
  for (const auto& id : b.sample_ids()) {
    if (!a_ids.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    fail(ErrorKind::kData, "sample ids not present in both files: " + list);
  }

  const auto n = a.size();
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  const auto a_phi = static_cast<Eigen::Index>(a.property_index(kPhi));
  const auto a_hv = static_cast<Eigen::Index>(a.property_index(kHv));
  const auto b_phi = static_cast<Eigen::Index>(b.property_index(kPhi));
  const auto b_hv = static_cast<Eigen::Index>(b.property_index(kHv));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto rb = static_cast<Eigen::Index>(b_rows.at(a.sample_ids()[i]));
    cols[0][i] = a.responses()(r, a_phi);
    cols[1][i] = a.responses()(r, a_hv);
    cols[2][i] = b.responses()(rb, b_phi);
    cols[3][i] = b.responses()(rb, b_hv);
  }

  const std::string ma = a.sources().front();
  std::string mb = b.sources().front();
  if (mb == ma) mb += "#2";
  CorrelationTable table;
  table.labels = {ma + ":phi", ma + ":hv", mb + ":phi", mb + ":hv"};
  table.pearson = Eigen::MatrixXd::Identity(4, 4);
  table.spearman = Eigen::MatrixXd::Identity(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = i + 1; j < 4; ++j) {
      const auto& ci = cols[static_cast<std::size_t>(i)];
      const auto& cj = cols[static_cast<std::size_t>(j)];
      table.pearson(i, j) = table.pearson(j, i) = pearson(ci, cj);
      table.spearman(i, j) = table.spearman(j, i) = spearman(ci, cj);
    }
  }
  return table;
}

nlohmann::json CorrelationTable::to_json() const {
  auto rows = [](const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_vector(m.row(i).transpose()));
    return out;
  };
  return {{"labels", labels}, {"pearson", rows(pearson)}, {"spearman", rows(spearman)}};
}

void CorrelationTable::write_csv(std::ostream& out, bool use_spearman) const {
  const Eigen::MatrixXd& m = use_spearman ? spearman : pearson;
  out << "label";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_number(m(i, j));
    out << '\n';
  }
}

void write_ved_scatter(std::ostream& out, std::span<const Dataset* const> datasets) {
  out << "material,sample_id,ved,log10_ved,property,value\n";
  for (const Dataset* d : datasets) {
    for (std::size_t i = 0; i < d->size(); ++i) {
      const auto& pt = d->points()[i];
      const double ved = compute_ved(pt.p, pt.v, pt.h, pt.l);
      for (std::size_t k = 0; k < d->property_names().size(); ++k) {
        out << pt.material << ',' << d->sample_ids()[i] << ',' << format_number(ved) << ','
            << format_number(std::log10(ved)) << ',' << d->property_names()[k] << ','
            << format_number(d->responses()(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(k)))
            << '\n';
      }
    }
  }
}

const LengthscaleRow& LengthscaleReport::row(std::string_view feature) const {
  for (const auto& r : rows) {
    if (r.feature == feature) return r;
  }
  fail(ErrorKind::kInvalidArgument, "no lengthscale for '" + std::string(feature) + "'");
}

nlohmann::json LengthscaleReport::to_json() const {
  nlohmann::json j{{"method", method},
                   {"material", material},
                   {"sigma2", sigma2},
                   {"nugget", nugget},
                   {"has_signal", has_signal},
                   {"most_influential", most_influential},
                   {"least_influential", least_influential}};
  for (const auto& r : rows) {
    j["features"].push_back({{"feature", r.feature},
                             {"omega", std::isfinite(r.omega) ? nlohmann::json(r.omega)
                                                              : nlohmann::json()},
                             {"rank", r.rank},
                             {"influential", r.influential}});
  }
  j["z"] = z ? nlohmann::json(*z) : nlohmann::json();
  j["task_correlation"] = task_correlation ? nlohmann::json(*task_correlation) : nlohmann::json();
  return j;
}

LengthscaleReport lengthscale_report(const AnyModel& model, std::string method,
                                     std::string material) {
  const GpData& data = model_data(model);
  const Hyperparams& hp = model_hyperparams(model);
  LengthscaleReport rep;
  rep.method = std::move(method);
  rep.material = std::move(material);
  rep.sigma2 = hp.sigma2;
  rep.nugget = hp.nugget;
  // Standardized responses have unit variance; below this the kernel part
  // is negligible and lengthscales are unidentified.
  rep.has_signal = hp.sigma2 >= 1e-3;
  for (std::size_t j = 0; j < data.spec.features.size(); ++j) {
    rep.rows.push_back({data.spec.features[j].name, hp.omega(static_cast<Eigen::Index>(j))});
  }
  if (hp.z) {
    rep.z = *hp.z;
    rep.rows.push_back({"s", std::log10(*hp.z * *hp.z)});
  }
  if (const auto* mt = std::get_if<MultiTaskModel>(&model)) {
    rep.task_correlation = mt->task_correlation();
  }

  std::vector<std::size_t> order(rep.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return rep.rows[i].omega > rep.rows[j].omega;
  });
  for (std::size_t r = 0; r < order.size(); ++r) rep.rows[order[r]].rank = static_cast<int>(r) + 1;
  if (!order.empty()) {
    const double top = rep.rows[order.front()].omega;
    for (auto& row : rep.rows) row.influential = rep.has_signal && row.omega >= top - 1.0;
    rep.most_influential = rep.rows[order.front()].feature;
    rep.least_influential = rep.rows[order.back()].feature;
  }
  return rep;
}

void write_lengthscale_table(std::ostream& out, std::span<const LengthscaleReport> reports,
                             std::span<const std::string> columns) {
  out << "Method,Material";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& rep : reports) {
    out << rep.method << ',' << rep.material;
    for (const auto& c : columns) {
      out << ',';
      const auto it = std::find_if(rep.rows.begin(), rep.rows.end(),
                                   [&](const LengthscaleRow& r) { return r.feature == c; });
      out << (it == rep.rows.end() ? std::string("-") : format_number(it->omega));
    }
    out << '\n';
  }
}

MarginalSweep marginal_sweep(const AnyModel& model, std::string_view feature, int grid_size) {
  if (grid_size < 1) fail(ErrorKind::kInvalidArgument, "grid size must be >= 1");
  const GpData& data = model_data(model);
  const auto& spec = data.spec;
  const std::size_t target = spec.feature_index(feature);
  if (spec.features[target].categorical) {
    fail(ErrorKind::kInvalidArgument,
         "feature '" + std::string(feature) + "' is categorical and cannot be swept");
  }

  // Anchor point in model units: medians / modes of the training inputs.
  const Eigen::Index n = data.rows();
  Eigen::VectorXd anchor(data.dims());
  for (Eigen::Index j = 0; j < data.dims(); ++j) {
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      raw[static_cast<std::size_t>(i)] = spec.unscale_feature(static_cast<std::size_t>(j), data.x(i, j));
    }
    std::sort(raw.begin(), raw.end());
    double value = 0.0;
    if (spec.features[static_cast<std::size_t>(j)].categorical) {
      // Mode of the rounded levels; ties go to the smaller level.
      std::map<double, int> counts;
      for (const double r : raw) ++counts[std::round(r)];
      int best = -1;
      for (const auto& [level, c] : counts) {
        if (c > best) {
          best = c;
          value = level;
        }
      }
    } else {
      const std::size_t mid = raw.size() / 2;
      value = raw.size() % 2 ? raw[mid] : 0.5 * (raw[mid - 1] + raw[mid]);
    }
    anchor(j) = spec.scale_feature(static_cast<std::size_t>(j), value);
  }

  MarginalSweep sweep;
  sweep.feature = std::string(feature);
  const auto& range = spec.features[target];
  if (grid_size == 1) {
    sweep.grid.push_back(0.5 * (range.min + range.max));
  } else {
    for (int g = 0; g < grid_size; ++g) {
      sweep.grid.push_back(range.min + (range.max - range.min) * g / (grid_size - 1));
    }
  }

  std::vector<std::string> materials = data.source_labels;
  if (!data.fused()) materials.resize(std::min<std::size_t>(materials.size(), 1));
  if (materials.empty()) materials.emplace_back();

  for (const double value : sweep.grid) {
    Eigen::VectorXd x = anchor;
    x(static_cast<Eigen::Index>(target)) = spec.scale_feature(target, value);
    for (std::size_t m = 0; m < materials.size(); ++m) {
      const int source = static_cast<int>(m);
      auto emit = [&](const std::string& property, const PredictiveDistribution& p) {
        const double sd = std::sqrt(p.variance);
        sweep.points.push_back({value, materials[m], property, p.mean, p.mean - 2.0 * sd,
                                p.mean + 2.0 * sd});
      };
      if (const auto* so = std::get_if<TrainedModel>(&model)) {
        emit(spec.responses.front().name, so->predict(x, source));
      } else {
        const auto& mt = std::get<MultiTaskModel>(model);
        const auto pred = mt.predict(x, source);
        for (Eigen::Index g = 0; g < data.tasks(); ++g) {
          emit(spec.responses[static_cast<std::size_t>(g)].name, pred.task(static_cast<int>(g)));
        }
      }
    }
  }
  return sweep;
}

nlohmann::json MarginalSweep::to_json() const {
  nlohmann::json j{{"feature", feature}, {"grid", grid}};
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    j["points"].push_back({{"value", p.value},
                           {"material", p.material},
                           {"property", p.property},
                           {"mean", p.mean},
                           {"lower", p.lower},
                           {"upper", p.upper}});
  }
  return j;
}

void MarginalSweep::write_csv(std::ostream& out) const {
  out << "feature,value,material,property,mean,lower,upper\n";
  for (const auto& p : points) {
    out << feature << ',' << format_number(p.value) << ',' << p.material << ',' << p.property
        << ',' << format_number(p.mean) << ',' << format_number(p.lower) << ','
        << format_number(p.upper) << '\n';
  }
}

}  // namespace fusegp
