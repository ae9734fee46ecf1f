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

#include "fusegp/model_io.hpp"

#include <fstream>

#include "fusegp/error.hpp"

namespace fusegp {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::kData, "model file: ragged matrix");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json common_json(const GpData& data, const Hyperparams& hp, std::string_view kind) {
  json doc;
  doc["format"] = "fusegp-model";
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = kind;
  doc["fused"] = data.fused();
  doc["features"] = json::array();
  for (const auto& f : data.spec.features) {
    doc["features"].push_back(
        {{"name", f.name}, {"min", f.min}, {"max", f.max}, {"categorical", f.categorical}});
  }
  doc["responses"] = json::array();
  for (const auto& r : data.spec.responses) {
    doc["responses"].push_back({{"name", r.name}, {"mean", r.mean}, {"std", r.std}});
  }
  doc["source_labels"] = data.source_labels;
  json h;
  h["omega"] = vector_json(hp.omega);
  h["sigma2"] = hp.sigma2;
  h["beta"] = vector_json(hp.beta);
  h["nugget"] = hp.nugget;
  h["z"] = hp.z ? json(*hp.z) : json();
  h["task_factor"] = hp.task_factor.size() ? matrix_json(hp.task_factor) : json::array();
  doc["hyperparams"] = std::move(h);
  doc["training"] = {{"x", matrix_json(data.x)},
                     {"y", matrix_json(data.y)},
                     {"source", data.source}};
  return doc;
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  return common_json(model.data(), model.hyperparams(), "sogp");
}

json model_to_json(const MultiTaskModel& model) {
  json doc = common_json(model.data(), model.hyperparams(), "mtgp");
  doc["vec_ordering"] = kTaskMajor;
  doc["task_covariance"] = matrix_json(model.task_covariance().matrix);
  doc["task_correlation"] = model.task_correlation();
  return doc;
}

json model_to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return model_to_json(m); }, model);
}

AnyModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "fusegp-model") {
      fail(ErrorKind::kData, "not a fusegp model document");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorKind::kData, "unsupported model format version " + std::to_string(version));
    }
    GpData data;
    for (const auto& f : doc.at("features")) {
      data.spec.features.push_back({f.at("name").get<std::string>(), f.at("min").get<double>(),
                                    f.at("max").get<double>(),
                                    f.at("categorical").get<bool>()});
    }
    for (const auto& r : doc.at("responses")) {
      data.spec.responses.push_back(
          {r.at("name").get<std::string>(), r.at("mean").get<double>(), r.at("std").get<double>()});
    }
    data.source_labels = doc.at("source_labels").get<std::vector<std::string>>();
    const auto& tr = doc.at("training");
    data.x = matrix_from(tr.at("x"), static_cast<Eigen::Index>(data.spec.features.size()));
    data.y = matrix_from(tr.at("y"), static_cast<Eigen::Index>(data.spec.responses.size()));
    data.source = tr.at("source").get<std::vector<int>>();

    const auto& h = doc.at("hyperparams");
    Hyperparams hp;
    hp.omega = vector_from(h.at("omega"));
    hp.sigma2 = h.at("sigma2").get<double>();
    hp.beta = vector_from(h.at("beta"));
    hp.nugget = h.at("nugget").get<double>();
    if (!h.at("z").is_null()) hp.z = h.at("z").get<double>();
    if (!h.at("task_factor").empty()) hp.task_factor = matrix_from(h.at("task_factor"), hp.tasks());

    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "sogp") return TrainedModel::from_hyperparams(std::move(data), std::move(hp));
    if (kind == "mtgp") {
      if (doc.at("vec_ordering").get<std::string>() != kTaskMajor) {
        fail(ErrorKind::kData, "unsupported vec ordering");
      }
      return MultiTaskModel::from_hyperparams(std::move(data), std::move(hp));
    }
    fail(ErrorKind::kData, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

const GpData& model_data(const AnyModel& model) {
  return std::visit([](const auto& m) -> const GpData& { return m.data(); }, model);
}

const Hyperparams& model_hyperparams(const AnyModel& model) {
  return std::visit([](const auto& m) -> const Hyperparams& { return m.hyperparams(); }, model);
}

}  // namespace fusegp
