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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "appealscope/pipeline.hpp"

using namespace appealscope;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_override;
  unsigned threads = 0;
  std::string format;
  bool standardize_age = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_override, "output directory (overrides config)");
  cmd->add_option("--threads", opts.threads, "worker thread cap (0 = all cores)");
  cmd->add_option("--format", opts.format, "table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--standardize-age", opts.standardize_age,
                "standardize the account-age regressor (sensitivity run)");
}

RunConfig make_config(const CommonOptions& opts) {
  RunConfig cfg = RunConfig::from_file(opts.config_path);
  if (!opts.out_override.empty()) cfg.out_dir = opts.out_override;
  if (opts.threads != 0) cfg.threads = opts.threads;
  if (opts.format == "csv") cfg.format = TableFormat::csv;
  if (opts.format == "json") cfg.format = TableFormat::json;
  if (opts.standardize_age) cfg.standardize_account_age = true;
  return cfg;
}

int guarded(int (*body)(const RunConfig&), const CommonOptions& opts) {
  try {
    RunConfig cfg = make_config(opts);
    return body(cfg);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stage_exit_code(e.stage);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"appealscope: influence metrics and bot-effect estimation over "
               "post corpora"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string dv_choice, model_choice;

  CLI::App* run = app.add_subcommand("run", "execute the full pipeline");
  add_common(run, opts);
  CLI::App* ingest = app.add_subcommand("ingest", "parse and validate the corpus");
  add_common(ingest, opts);
  CLI::App* classify = app.add_subcommand("classify", "label misinformation and bots");
  add_common(classify, opts);
  CLI::App* graph = app.add_subcommand("graph", "build per-period interaction networks");
  add_common(graph, opts);
  CLI::App* metrics = app.add_subcommand("metrics", "compute appeal and scope records");
  add_common(metrics, opts);
  CLI::App* regress = app.add_subcommand("regress", "fit the regression models");
  add_common(regress, opts);
  regress->add_option("--dv", dv_choice, "dependent variable: appeal or scope")
      ->check(CLI::IsMember({"appeal", "scope"}));
  regress->add_option("--model", model_choice, "model: baseline or conditional")
      ->check(CLI::IsMember({"baseline", "conditional"}));
  CLI::App* report = app.add_subcommand("report", "summaries, descriptives and charts");
  add_common(report, opts);
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, opts);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return guarded([](const RunConfig& cfg) {
      Manifest manifest = run_pipeline(cfg);
      std::cout << "wrote " << manifest.artifacts.size() << " artifacts to "
                << cfg.out_dir.string() << "\n";
      return 0;
    }, opts);
  if (ingest->parsed())
    return guarded([](const RunConfig& cfg) { stage_ingest(cfg); return 0; }, opts);
  if (classify->parsed())
    return guarded([](const RunConfig& cfg) { stage_classify(cfg); return 0; }, opts);
  if (graph->parsed())
    return guarded([](const RunConfig& cfg) { stage_graph(cfg); return 0; }, opts);
  if (metrics->parsed())
    return guarded([](const RunConfig& cfg) { stage_metrics(cfg); return 0; }, opts);
  if (regress->parsed()) {
    std::optional<DependentVariable> dv;
    if (dv_choice == "appeal") dv = DependentVariable::appeal;
    if (dv_choice == "scope") dv = DependentVariable::scope;
    std::optional<ModelKind> model;
    if (model_choice == "baseline") model = ModelKind::baseline;
    if (model_choice == "conditional") model = ModelKind::conditional;
    try {
      RunConfig cfg = make_config(opts);
      stage_regress(cfg, dv, model);
      return 0;
    } catch (const StageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return stage_exit_code(e.stage);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  if (report->parsed())
    return guarded([](const RunConfig& cfg) { stage_report(cfg); return 0; }, opts);
  if (synth->parsed())
    return guarded([](const RunConfig& cfg) { stage_synth(cfg); return 0; }, opts);
  return 0;
}
