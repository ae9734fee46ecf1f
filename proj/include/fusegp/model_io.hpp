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

#ifndef FUSEGP_MODEL_IO_HPP_
#define FUSEGP_MODEL_IO_HPP_

#include <filesystem>
#include <variant>

#include <nlohmann/json.hpp>

#include "fusegp/gp.hpp"
#include "fusegp/mtgp.hpp"

namespace fusegp {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<TrainedModel, MultiTaskModel>;

nlohmann::json model_to_json(const TrainedModel& model);
nlohmann::json model_to_json(const MultiTaskModel& model);
nlohmann::json model_to_json(const AnyModel& model);

/// Rebuilds the model (re-factorizing the stored covariance). Doubles are
/// written with round-trip precision, so predictions are reproduced exactly.
AnyModel model_from_json(const nlohmann::json& doc);

void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

const GpData& model_data(const AnyModel& model);
const Hyperparams& model_hyperparams(const AnyModel& model);

}  // namespace fusegp

#endif  // FUSEGP_MODEL_IO_HPP_
