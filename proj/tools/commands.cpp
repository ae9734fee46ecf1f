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

#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string_view>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fusegp/dataset.hpp"
#include "fusegp/error.hpp"
#include "fusegp/eval.hpp"
#include "fusegp/gp.hpp"
#include "fusegp/image_io.hpp"
#include "fusegp/model_io.hpp"
#include "fusegp/mtgp.hpp"
#include "fusegp/porescan.hpp"

namespace fusegp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

fs::path prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    fail(ErrorKind::kIo, "cannot create output directory '" + cfg.out.string() + "'");
  }
  return cfg.out;
}

std::string slug(std::string_view text) {
  std::string out;
  for (const char c : text) {
    const auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ValidationBounds bounds_of(const RunConfig& cfg) {
  ValidationBounds b;
  b.enabled = cfg.validate;
  return b;
}

void require_path(const fs::path& path, std::string_view flag) {
  if (path.empty()) fail(ErrorKind::kInvalidArgument, std::string(flag) + " is required");
}

Dataset load_inputs(const RunConfig& cfg) {
  require_path(cfg.data, "--data");
  Dataset data = load_csv(cfg.data, bounds_of(cfg));
  if (!cfg.data_b.empty()) data = concat(data, load_csv(cfg.data_b, bounds_of(cfg)));
  return data;
}

FitOptions fit_options(const RunConfig& cfg) {
  FitOptions opts;
  opts.optimizer.n_restarts = cfg.restarts;
  opts.optimizer.max_iters = cfg.max_iters;
  opts.optimizer.seed = cfg.resolved_seed();
  opts.optimizer.validate();
  return opts;
}

std::vector<ModelKind> model_kinds(const RunConfig& cfg) {
  if (cfg.model == "all") return {ModelKind::kSogp, ModelKind::kMtgp};
  return {parse_model_kind(cfg.model)};
}

void check_model_property(ModelKind kind, const RunConfig& cfg) {
  if (kind == ModelKind::kMtgp && cfg.property != "both") {
    fail(ErrorKind::kInvalidArgument, "--model mtgp requires --property both");
  }
}

void check_fusion(const Dataset& data) {
  if (data.sources().size() < 2) {
    fail(ErrorKind::kInvalidArgument, "--fuse requires at least two materials in the data");
  }
}

json trace_json(const AnyModel& model) {
  const GpData& data = model_data(model);
  const Hyperparams& hp = model_hyperparams(model);
  std::vector<std::string> features;
  for (const auto& f : data.spec.features) features.push_back(f.name);
  const ParamLayout layout(data.dims(), hp.tasks(), hp.fused());
  const auto& opt = std::visit([](const auto& m) -> const std::optional<OptResult>& {
    return m.opt_result();
  }, model);
  return opt ? opt->to_json(layout.names(features)) : json(nullptr);
}

}  // namespace

std::vector<std::string> RunConfig::properties() const {
  if (property == "phi") return {"phi"};
  if (property == "hv") return {"hv"};
  if (property == "both") return {"phi", "hv"};
  fail(ErrorKind::kInvalidArgument, "--property must be phi, hv or both, got '" + property + "'");
}

std::uint64_t RunConfig::resolved_seed() const {
  if (seed) return *seed;
  if (const char* env = std::getenv("FUSEGP_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long value = std::stoull(env, &used);
      if (used == std::string_view(env).size()) return value;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::kInvalidArgument, std::string("FUSEGP_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

void RunConfig::validate_common() const {
  if (model != "sogp" && model != "mtgp" && model != "all") {
    fail(ErrorKind::kInvalidArgument, "--model must be sogp, mtgp or all, got '" + model + "'");
  }
  (void)properties();
  if (k < 2) fail(ErrorKind::kInvalidArgument, "--k must be >= 2");
  if (restarts < 1) fail(ErrorKind::kInvalidArgument, "--restarts must be >= 1");
  if (max_iters < 1) fail(ErrorKind::kInvalidArgument, "--max-iters must be >= 1");
  if (grid < 1) fail(ErrorKind::kInvalidArgument, "--grid must be >= 1");
  if (dilate_radius < 0) fail(ErrorKind::kInvalidArgument, "--dilate-radius must be >= 0");
  if (margin < 0) fail(ErrorKind::kInvalidArgument, "--margin must be >= 0");
}

std::vector<fs::path> cmd_fit(const RunConfig& cfg) {
  cfg.validate_common();
  if (cfg.model == "all") fail(ErrorKind::kInvalidArgument, "fit takes --model sogp or mtgp");
  const ModelKind kind = parse_model_kind(cfg.model);
  check_model_property(kind, cfg);
  const Dataset data = load_inputs(cfg);
  if (cfg.fuse) check_fusion(data);
  const FitOptions opts = fit_options(cfg);
  const fs::path out = prepare_out(cfg);

  struct Target {
    std::string label;
    Dataset rows;
  };
  std::vector<Target> targets;
  if (cfg.fuse) {
    targets.push_back({std::string(kFusedLabel), data});
  } else {
    for (const auto& m : data.sources()) targets.push_back({m, data.filter_source(m)});
  }

  std::vector<fs::path> written;
  std::vector<LengthscaleReport> reports;
  json traces = json::object();
  for (const auto& target : targets) {
    const NormalizedData nd = normalize(target.rows);
    std::vector<std::pair<std::string, AnyModel>> models;
    if (kind == ModelKind::kMtgp) {
      models.emplace_back("MTGP", fit_mt(GpData::from(nd, {"phi", "hv"}, cfg.fuse), opts));
    } else {
      for (const auto& prop : cfg.properties()) {
        models.emplace_back("SOGP-" + prop, fit(GpData::from(nd, {prop}, cfg.fuse), opts));
      }
    }
    for (const auto& [method, model] : models) {
      const std::string stem = slug(target.label) + "_" + slug(method);
      const fs::path path = out / ("model_" + stem + ".json");
      save_model(model, path);
      written.push_back(path);
      reports.push_back(lengthscale_report(model, method, target.label));
      if (cfg.trace) traces[stem] = trace_json(model);
    }
  }

  std::vector<std::string> columns = process_feature_names();
  if (cfg.fuse) columns.push_back("s");
  std::ostringstream table;
  write_lengthscale_table(table, reports, columns);
  written.push_back(out / "lengthscales.csv");
  write_text(written.back(), table.str());
  json rep = json::array();
  for (const auto& r : reports) rep.push_back(r.to_json());
  written.push_back(out / "lengthscales.json");
  write_json(written.back(), rep);
  if (cfg.trace) {
    written.push_back(out / "trace.json");
    write_json(written.back(), traces);
  }
  return written;
}

std::vector<fs::path> cmd_cv(const RunConfig& cfg) {
  cfg.validate_common();
  const std::vector<ModelKind> kinds = model_kinds(cfg);
  for (const auto kind : kinds) check_model_property(kind, cfg);
  const Dataset data = load_inputs(cfg);
  std::vector<bool> fusions;
  if (cfg.model == "all") {
    fusions = {false, true};
  } else {
    fusions = {cfg.fuse};
  }
  if (std::find(fusions.begin(), fusions.end(), true) != fusions.end()) check_fusion(data);
  const FitOptions opts = fit_options(cfg);
  const fs::path out = prepare_out(cfg);

  std::vector<CvReport> reports;
  for (const auto kind : kinds) {
    for (const bool fused : fusions) {
      CvConfig cv;
      cv.kind = kind;
      cv.fused = fused;
      cv.properties = cfg.properties();
      cv.k = cfg.k;
      cv.seed = cfg.resolved_seed();
      cv.fit = opts;
      reports.push_back(run_cv(data, cv));
    }
  }

  std::vector<fs::path> written;
  std::ostringstream table;
  write_cv_table(table, reports);
  written.push_back(out / "cv_table.csv");
  write_text(written.back(), table.str());
  std::ostringstream folds;
  write_cv_folds(folds, reports);
  written.push_back(out / "cv_folds.csv");
  write_text(written.back(), folds.str());
  json doc = json::array();
  for (const auto& r : reports) doc.push_back(r.to_json());
  written.push_back(out / "cv_report.json");
  write_json(written.back(), doc);
  return written;
}

std::vector<fs::path> cmd_correlate(const RunConfig& cfg) {
  cfg.validate_common();
  require_path(cfg.data, "--data");
  require_path(cfg.data_b, "--data-b");
  const Dataset a = load_csv(cfg.data, bounds_of(cfg));
  const Dataset b = load_csv(cfg.data_b, bounds_of(cfg));
  const CorrelationTable table = correlation_table(a, b);
  const fs::path out = prepare_out(cfg);

  std::vector<fs::path> written;
  for (const bool spearman : {false, true}) {
    std::ostringstream csv;
    table.write_csv(csv, spearman);
    written.push_back(out / (spearman ? "correlation_spearman.csv" : "correlation_pearson.csv"));
    write_text(written.back(), csv.str());
  }
  written.push_back(out / "correlation.json");
  write_json(written.back(), table.to_json());
  const Dataset* sets[] = {&a, &b};
  std::ostringstream scatter;
  write_ved_scatter(scatter, sets);
  written.push_back(out / "ved_scatter.csv");
  write_text(written.back(), scatter.str());
  return written;
}

std::vector<fs::path> cmd_marginal(const RunConfig& cfg) {
  cfg.validate_common();
  require_path(cfg.model_file, "--model-file");
  if (cfg.feature.empty()) fail(ErrorKind::kInvalidArgument, "--feature is required");
  const AnyModel model = load_model(cfg.model_file);
  const MarginalSweep sweep = marginal_sweep(model, cfg.feature, cfg.grid);
  const fs::path out = prepare_out(cfg);

  std::vector<fs::path> written;
  std::ostringstream csv;
  sweep.write_csv(csv);
  written.push_back(out / ("marginal_" + slug(cfg.feature) + ".csv"));
  write_text(written.back(), csv.str());
  written.push_back(out / ("marginal_" + slug(cfg.feature) + ".json"));
  write_json(written.back(), sweep.to_json());
  return written;
}

namespace {

constexpr std::string_view kPorescanHeader =
    "file,status,threshold,width,height,count,porosity_pct,mean_radius,std_radius,"
    "mean_perimeter,std_perimeter,error\n";

struct ScanOutcome {
  std::string file;
  std::optional<PorescanResult> result;
  std::string error;
};

std::string summary_row(const ScanOutcome& o) {
  std::string row = csv_field(o.file);
  if (!o.result) return row + ",error,,,,,,,,,," + csv_field(o.error) + "\n";
  const PoreStats& s = o.result->stats;
  row += ",ok," + std::to_string(o.result->otsu.threshold) + "," + std::to_string(s.width) +
         "," + std::to_string(s.height) + "," + std::to_string(s.count()) + "," +
         format_number(s.porosity_pct) + "," + format_number(s.mean_radius) + "," +
         format_number(s.std_radius) + "," + format_number(s.mean_perimeter) + "," +
         format_number(s.std_perimeter) + ",\n";
  return row;
}

std::string pore_rows(const ScanOutcome& o) {
  std::string rows;
  if (!o.result) return rows;
  for (const auto& p : o.result->stats.pores) {
    rows += csv_field(o.file) + "," + std::to_string(p.label) + "," + std::to_string(p.area) +
            "," + std::to_string(p.perimeter) + "," + format_number(p.centroid_x) + "," +
            format_number(p.centroid_y) + "," + format_number(p.radius) + "\n";
  }
  return rows;
}

json outcome_json(const ScanOutcome& o) {
  json j{{"file", o.file}};
  if (!o.result) {
    j["status"] = "error";
    j["error"] = o.error;
    return j;
  }
  j["status"] = "ok";
  j["threshold"] = o.result->otsu.threshold;
  j["degenerate"] = o.result->otsu.degenerate;
  j["summary"] = o.result->stats.summary_json();
  json pores = json::array();
  for (const auto& p : o.result->stats.pores) {
    pores.push_back({{"label", p.label},
                     {"area", p.area},
                     {"perimeter", p.perimeter},
                     {"centroid_x", p.centroid_x},
                     {"centroid_y", p.centroid_y},
                     {"radius", p.radius}});
  }
  j["pores"] = std::move(pores);
  return j;
}

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm";
}

}  // namespace

std::vector<fs::path> cmd_porescan(const RunConfig& cfg) {
  cfg.validate_common();
  require_path(cfg.input, "--input");
  PorescanOptions opts;
  opts.margin = cfg.margin;
  opts.dilate_radius = cfg.dilate_radius;
  opts.invert = cfg.invert;

  std::vector<fs::path> files;
  const bool batch = fs::is_directory(cfg.input);
  if (batch) {
    for (const auto& entry : fs::directory_iterator(cfg.input)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    if (!fs::exists(cfg.input)) {
      fail(ErrorKind::kIo, "input '" + cfg.input.string() + "' does not exist");
    }
    files.push_back(cfg.input);
  }

  std::vector<ScanOutcome> outcomes(files.size());
  std::vector<std::exception_ptr> errors(files.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(files.size()); ++i) {
    const auto u = static_cast<std::size_t>(i);
    outcomes[u].file = files[u].filename().string();
    try {
      outcomes[u].result = porescan(read_image(files[u]), opts);
    } catch (const std::exception& e) {
      outcomes[u].error = e.what();
      errors[u] = std::current_exception();
    }
  }
  if (!batch && errors.front()) std::rethrow_exception(errors.front());

  const fs::path out = prepare_out(cfg);
  std::vector<fs::path> written;
  std::string summary(kPorescanHeader);
  std::string pores = "file,label,area,perimeter,centroid_x,centroid_y,radius\n";
  json doc = json::array();
  for (const auto& o : outcomes) {
    summary += summary_row(o);
    pores += pore_rows(o);
    doc.push_back(outcome_json(o));
  }
  written.push_back(out / "porescan.csv");
  write_text(written.back(), summary);
  written.push_back(out / "pores.csv");
  write_text(written.back(), pores);
  written.push_back(out / "porescan.json");
  write_json(written.back(), batch ? doc : doc.front());
  if (cfg.write_labels) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].result) continue;
      written.push_back(out / (files[i].stem().string() + "_labels.pgm"));
      write_pgm(render_labels(outcomes[i].result->labels), written.back());
    }
  }
  return written;
}

std::vector<fs::path> dispatch(const RunConfig& cfg) {
  if (cfg.command == "fit") return cmd_fit(cfg);
  if (cfg.command == "cv") return cmd_cv(cfg);
  if (cfg.command == "correlate") return cmd_correlate(cfg);
  if (cfg.command == "marginal") return cmd_marginal(cfg);
  if (cfg.command == "porescan") return cmd_porescan(cfg);
  fail(ErrorKind::kInvalidArgument, "unknown command '" + cfg.command + "'");
}

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return kExitInvalid;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kNumerical: return kExitNumerical;
  }
  return kExitInternal;
}

// Config-file keys are flag names without the leading dashes.
void apply_config(const fs::path& path, CLI::App& app, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidArgument, "config '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kInvalidArgument, "config must be a JSON object");

  using Setter = std::function<void(const json&)>;
  auto path_setter = [](fs::path& dst) { return Setter([&dst](const json& v) { dst = v.get<std::string>(); }); };
  auto string_setter = [](std::string& dst) { return Setter([&dst](const json& v) { dst = v.get<std::string>(); }); };
  auto int_setter = [](int& dst) { return Setter([&dst](const json& v) { dst = v.get<int>(); }); };
  auto bool_setter = [](bool& dst) { return Setter([&dst](const json& v) { dst = v.get<bool>(); }); };
  const std::map<std::string, Setter> setters = {
      {"data", path_setter(cfg.data)},
      {"data-b", path_setter(cfg.data_b)},
      {"model", string_setter(cfg.model)},
      {"fuse", bool_setter(cfg.fuse)},
      {"property", string_setter(cfg.property)},
      {"k", int_setter(cfg.k)},
      {"seed", [&cfg](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
      {"restarts", int_setter(cfg.restarts)},
      {"max-iters", int_setter(cfg.max_iters)},
      {"out", path_setter(cfg.out)},
      {"trace", bool_setter(cfg.trace)},
      {"no-validate", [&cfg](const json& v) { cfg.validate = !v.get<bool>(); }},
      {"model-file", path_setter(cfg.model_file)},
      {"feature", string_setter(cfg.feature)},
      {"grid", int_setter(cfg.grid)},
      {"input", path_setter(cfg.input)},
      {"invert", bool_setter(cfg.invert)},
      {"dilate-radius", int_setter(cfg.dilate_radius)},
      {"margin", int_setter(cfg.margin)},
      {"labels", bool_setter(cfg.write_labels)},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorKind::kInvalidArgument, "unknown config key '" + key + "'");
    if (app.get_option("--" + key)->count() > 0) continue;
    try {
      it->second(value);
    } catch (const json::exception&) {
      fail(ErrorKind::kInvalidArgument, "config key '" + key + "' has the wrong type");
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Gaussian-process process-property modeling and pore analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::string config_path;
  std::uint64_t seed = 0;

  app.add_option("--data", cfg.data, "Process dataset CSV");
  app.add_option("--data-b", cfg.data_b, "Second dataset CSV");
  app.add_option("--model", cfg.model, "sogp, mtgp, or all (cv)");
  app.add_flag("--fuse", cfg.fuse, "Train on both materials with a source variable");
  app.add_option("--property", cfg.property, "phi, hv or both");
  app.add_option("--k", cfg.k, "Number of CV folds");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (fallback: FUSEGP_SEED)");
  app.add_option("--restarts", cfg.restarts, "Optimizer restarts");
  app.add_option("--max-iters", cfg.max_iters, "Optimizer iterations per restart");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_flag("--trace", cfg.trace, "Write optimizer traces");
  app.add_flag("--no-validate", "Skip process-parameter range checks");
  app.add_option("--model-file", cfg.model_file, "Fitted model JSON (marginal)");
  app.add_option("--feature", cfg.feature, "Feature to sweep (marginal)");
  app.add_option("--grid", cfg.grid, "Sweep grid size (marginal)");
  app.add_option("--input", cfg.input, "Image file or directory (porescan)");
  app.add_flag("--invert", cfg.invert, "Pores are bright (porescan)");
  app.add_option("--dilate-radius", cfg.dilate_radius, "Dilation radius in px (porescan)");
  app.add_option("--margin", cfg.margin, "Border crop in px (porescan)");
  app.add_flag("--labels", cfg.write_labels, "Write label images (porescan)");
  app.add_option("--config", config_path, "JSON config; explicit flags take precedence");

  const std::pair<const char*, const char*> commands[] = {
      {"fit", "Fit a model and write it with its lengthscale table"},
      {"cv", "k-fold cross-validation RMSE table"},
      {"correlate", "Correlation tables between two material datasets"},
      {"marginal", "Marginal posterior sweep along one feature"},
      {"porescan", "Pore statistics of an image or a directory of images"}};
  for (const auto& [name, description] : commands) {
    app.add_subcommand(name, description)->callback([&cfg, name = name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (app.get_option("--no-validate")->count() > 0) cfg.validate = false;
    if (!config_path.empty()) apply_config(config_path, app, cfg);
    for (const auto& path : dispatch(cfg)) std::cout << path.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "fusegp: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "fusegp: error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "fusegp: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace fusegp::cli
