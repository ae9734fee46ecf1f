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

#ifndef FUSEGP_TOOLS_COMMANDS_HPP_
#define FUSEGP_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fusegp::cli {

/// Process exit codes, one per error class.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,
  kExitIo = 2,
  kExitData = 3,
  kExitNumerical = 4,
  kExitInternal = 5,
};

struct RunConfig {
  std::string command;
  std::filesystem::path data;
  std::filesystem::path data_b;
  /// "sogp", "mtgp", or "all" (cv only: every model and fusion setting).
  std::string model = "sogp";
  bool fuse = false;
  /// "phi", "hv" or "both".
  std::string property = "both";
  int k = 5;
  std::optional<std::uint64_t> seed;
  int restarts = 8;
  int max_iters = 500;
  std::filesystem::path out = ".";
  bool trace = false;
  bool validate = true;
  // marginal
  std::filesystem::path model_file;
  std::string feature;
  int grid = 50;
  // porescan
  std::filesystem::path input;
  bool invert = false;
  int dilate_radius = 1;
  int margin = 0;
  bool write_labels = false;

  std::vector<std::string> properties() const;
  /// Explicit seed, else FUSEGP_SEED, else 0.
  std::uint64_t resolved_seed() const;
  void validate_common() const;
};

/// Each command writes its artifacts under cfg.out and returns the paths
/// written. Failures are thrown as fusegp::Error.
std::vector<std::filesystem::path> cmd_fit(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_cv(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_correlate(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_marginal(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_porescan(const RunConfig& cfg);

std::vector<std::filesystem::path> dispatch(const RunConfig& cfg);

/// Full command line entry point: parses flags (plus an optional JSON
/// --config whose values are overridden by explicit flags), runs the
/// command and maps errors to exit codes.
int run(int argc, const char* const* argv);

}  // namespace fusegp::cli

#endif  // FUSEGP_TOOLS_COMMANDS_HPP_
