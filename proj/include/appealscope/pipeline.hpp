/*
 * Copyright 2026 the appealscope authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APPEALSCOPE_PIPELINE_HPP_
#define APPEALSCOPE_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "appealscope/design.hpp"
#include "appealscope/synth.hpp"

namespace appealscope {

enum class Stage { ingest, classify, graph, metrics, regress, report, synth };

std::string_view stage_name(Stage stage);

// 0 success; 10..15 for the analysis stages in pipeline order; 16 synth.
int stage_exit_code(Stage stage);

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& message)
      : std::runtime_error(std::string(stage_name(stage)) + ": " + message),
        stage(stage) {}
  Stage stage;
};

enum class TableFormat { csv, json };

struct RunConfig {
  std::filesystem::path tweets_path;
  std::filesystem::path users_path;
  std::filesystem::path references_path;
  std::filesystem::path out_dir = "out";
  PeriodConfig periods;  // defaults to the bundled windows when unset
  double misinfo_threshold = kDefaultMisinfoThreshold;
  double bot_threshold = kDefaultBotThreshold;
  unsigned threads = 0;  // 0 = hardware concurrency
  TableFormat format = TableFormat::csv;
  bool standardize_account_age = false;
  SynthConfig synth;

  unsigned effective_threads() const;

  // Flat key = value text; '#' starts a comment; relative paths resolve
  // against the config file's directory. Unknown keys are rejected.
  static RunConfig from_file(const std::filesystem::path& path);
};

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string status;  // "ok" or "FAILED"
  std::string failed_stage;
  std::vector<ManifestEntry> artifacts;  // sorted by path
};

// Full composition: ingest, validate, classify, per-period graphs,
// metrics, descriptives, four fits, collinearity check, effect table,
// summary chart, network exports, then a manifest with a content hash per
// artifact. Partial outputs are retained on failure and the manifest is
// marked FAILED with the stage name.
Manifest run_pipeline(const RunConfig& config);

// Standalone stage entry points; each loads its declared inputs from disk
// so stages can run independently given prior-stage outputs.
void stage_ingest(const RunConfig& config);
void stage_classify(const RunConfig& config);
void stage_graph(const RunConfig& config);
void stage_metrics(const RunConfig& config);
void stage_regress(const RunConfig& config,
                   std::optional<DependentVariable> only_dv = std::nullopt,
                   std::optional<ModelKind> only_model = std::nullopt);
void stage_report(const RunConfig& config);
void stage_synth(const RunConfig& config);

void write_manifest(const Manifest& manifest, const std::filesystem::path& out_dir);

}  // namespace appealscope

#endif  // APPEALSCOPE_PIPELINE_HPP_
