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

#include "appealscope/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "appealscope/csv.hpp"
#include "appealscope/parallel.hpp"
#include "appealscope/sha256.hpp"

namespace appealscope {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::classify: return "classify";
    case Stage::graph: return "graph";
    case Stage::metrics: return "metrics";
    case Stage::regress: return "regress";
    case Stage::report: return "report";
    case Stage::synth: return "synth";
  }
  return "unknown";
}

int stage_exit_code(Stage stage) {
  switch (stage) {
    case Stage::ingest: return 10;
    case Stage::classify: return 11;
    case Stage::graph: return 12;
    case Stage::metrics: return 13;
    case Stage::regress: return 14;
    case Stage::report: return 15;
    case Stage::synth: return 16;
  }
  return 1;
}

unsigned RunConfig::effective_threads() const {
  return threads == 0 ? default_thread_count() : threads;
}

// --- config file ---------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad number for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::runtime_error("config: bad boolean for '" + key + "': " + value);
}

}  // namespace

RunConfig RunConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read '" + path.string() + "'");
  fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  RunConfig cfg;
  struct PartialPeriod {
    std::optional<std::string> label;
    std::optional<UtcDate> start, end;
  };
  std::map<long long, PartialPeriod> period_keys;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not 'key = value'");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));

    if (key == "tweets") cfg.tweets_path = resolve(value);
    else if (key == "users") cfg.users_path = resolve(value);
    else if (key == "references") cfg.references_path = resolve(value);
    else if (key == "out") cfg.out_dir = resolve(value);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_int(key, value));
    else if (key == "format") {
      if (value == "csv") cfg.format = TableFormat::csv;
      else if (value == "json") cfg.format = TableFormat::json;
      else throw std::runtime_error("config: format must be csv or json");
    } else if (key == "standardize_account_age") {
      cfg.standardize_account_age = parse_bool(key, value);
    } else if (key == "classify.misinfo_threshold") {
      cfg.misinfo_threshold = parse_double(key, value);
    } else if (key == "classify.bot_threshold") {
      cfg.bot_threshold = parse_double(key, value);
    } else if (key.starts_with("period.")) {
      auto rest = key.substr(7);
      auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw std::runtime_error("config: bad period key '" + key + "'");
      long long idx = parse_int(key, rest.substr(0, dot));
      std::string field = rest.substr(dot + 1);
      PartialPeriod& p = period_keys[idx];
      if (field == "label") p.label = value;
      else if (field == "start" || field == "end") {
        auto d = parse_utc_date(value);
        if (!d) throw std::runtime_error("config: bad date for '" + key + "'");
        (field == "start" ? p.start : p.end) = *d;
      } else {
        throw std::runtime_error("config: unknown period field '" + key + "'");
      }
    } else if (key == "synth.seed") cfg.synth.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "synth.n_users") cfg.synth.n_users = static_cast<int>(parse_int(key, value));
    else if (key == "synth.n_tweets") cfg.synth.n_tweets = static_cast<int>(parse_int(key, value));
    else if (key == "synth.bot_fraction") cfg.synth.bot_fraction = parse_double(key, value);
    else if (key == "synth.misinfo_fraction") cfg.synth.misinfo_fraction = parse_double(key, value);
    else if (key == "synth.retweet_probability") cfg.synth.retweet_probability = parse_double(key, value);
    else if (key == "synth.mention_rate") cfg.synth.mention_rate = parse_double(key, value);
    else if (key == "synth.bot_activity") cfg.synth.bot_activity = parse_double(key, value);
    else if (key == "synth.bot_visibility") cfg.synth.bot_visibility = parse_double(key, value);
    else if (key == "synth.dispersion") cfg.synth.dispersion = parse_double(key, value);
    else if (key == "synth.power") cfg.synth.power = parse_double(key, value);
    else if (key == "synth.embedding_dim") cfg.synth.embedding_dim = static_cast<int>(parse_int(key, value));
    else if (key == "synth.emit_embeddings") cfg.synth.emit_embeddings = parse_bool(key, value);
    else if (key == "synth.period_mix") {
      cfg.synth.period_mix.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        cfg.synth.period_mix.push_back(parse_double(key, trim(item)));
    } else if (key.starts_with("synth.coef.")) {
      cfg.synth.planted[key.substr(11)] = parse_double(key, value);
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }

  if (!period_keys.empty()) {
    std::vector<Period> periods;
    for (const auto& [idx, p] : period_keys) {
      if (!p.label || !p.start || !p.end)
        throw std::runtime_error("config: period " + std::to_string(idx) +
                                 " needs label, start and end");
      periods.push_back({*p.label, *p.start, *p.end});
    }
    cfg.periods = PeriodConfig::from_periods(std::move(periods));
  } else {
    cfg.periods = default_periods();
  }
  cfg.synth.periods = cfg.periods;
  return cfg;
}

// --- artifact emission -----------------------------------------------------------

namespace {

std::string fmt10(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Collects everything a run writes so the manifest can hash exactly those
// files, in path order, independent of scheduling.
class Emitter {
 public:
  Emitter(fs::path out_dir, TableFormat format)
      : out_dir_(std::move(out_dir)), format_(format) {
    fs::create_directories(out_dir_);
  }

  TableFormat format() const { return format_; }

  void write_text(const std::string& rel_path, const std::string& content) {
    fs::path full = out_dir_ / rel_path;
    std::ofstream f(full, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + full.string() + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("short write on '" + full.string() + "'");
    f.close();
    ManifestEntry entry;
    entry.path = rel_path;
    entry.sha256 = sha256_hex(content);
    entry.bytes = content.size();
    entries_.push_back(std::move(entry));
  }

  // Table helper: rows of (name -> string cell), emitted as CSV or JSON
  // per the configured format. JSON cells that parse fully as finite
  // numbers are emitted as numbers; empty cells become null.
  void write_table(const std::string& basename,
                   const std::vector<std::string>& columns,
                   const std::vector<std::vector<std::string>>& rows) {
    if (format_ == TableFormat::csv) {
      std::ostringstream out;
      csv::write_row(out, columns);
      for (const auto& row : rows) csv::write_row(out, row);
      write_text(basename + ".csv", out.str());
    } else {
      auto cell_value = [](const std::string& cell) -> json {
        if (cell.empty()) return nullptr;
        try {
          std::size_t pos = 0;
          double v = std::stod(cell, &pos);
          if (pos == cell.size() && std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        return cell;
      };
      json array = json::array();
      for (const auto& row : rows) {
        json obj;
        for (std::size_t c = 0; c < columns.size(); ++c)
          obj[columns[c]] = c < row.size() ? cell_value(row[c]) : json(nullptr);
        array.push_back(std::move(obj));
      }
      write_text(basename + ".json", array.dump(2) + "\n");
    }
  }

  Manifest manifest(const std::string& status, const std::string& failed_stage) {
    Manifest m;
    m.status = status;
    m.failed_stage = failed_stage;
    m.artifacts = entries_;
    std::sort(m.artifacts.begin(), m.artifacts.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return m;
  }

 private:
  fs::path out_dir_;
  TableFormat format_;
  std::vector<ManifestEntry> entries_;
};

// --- loading -----------------------------------------------------------------

Corpus load_corpus(const RunConfig& cfg, std::vector<Diagnostic>* diagnostics) {
  std::ifstream tweets_in(cfg.tweets_path, std::ios::binary);
  if (!tweets_in)
    throw StageError(Stage::ingest, "cannot read tweets file '" + cfg.tweets_path.string() + "'");
  std::ifstream users_in(cfg.users_path, std::ios::binary);
  if (!users_in)
    throw StageError(Stage::ingest, "cannot read users file '" + cfg.users_path.string() + "'");

  Corpus corpus;
  corpus.periods = cfg.periods;
  try {
    auto tweet_result = parse_tweets(tweets_in);
    corpus.tweets = std::move(tweet_result.tweets);
    auto user_result = parse_users(users_in);
    corpus.users = std::move(user_result.users);
    if (diagnostics) {
      for (auto& d : tweet_result.diagnostics)
        diagnostics->push_back({d.line, "tweets.jsonl: " + d.message});
      for (auto& d : user_result.diagnostics)
        diagnostics->push_back({d.line, "users.csv: " + d.message});
    }
  } catch (const std::exception& e) {
    throw StageError(Stage::ingest, e.what());
  }
  return corpus;
}

std::vector<ReferenceTweet> load_references(const RunConfig& cfg) {
  if (cfg.references_path.empty()) return {};
  std::ifstream in(cfg.references_path, std::ios::binary);
  if (!in)
    throw StageError(Stage::classify,
                     "cannot read references file '" + cfg.references_path.string() + "'");
  auto result = parse_references(in);
  for (const auto& d : result.diagnostics)
    std::cerr << "references.jsonl line " << d.line << ": " << d.message << "\n";
  return std::move(result.references);
}

std::string validation_report_csv(const std::vector<Diagnostic>& parse_diagnostics,
                                  const ValidationReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"severity", "code", "message"});
  for (const Diagnostic& d : parse_diagnostics)
    csv::write_row(out, {"warning", "parse_diagnostic",
                         "line " + std::to_string(d.line) + ": " + d.message});
  for (const Finding& f : report.findings)
    csv::write_row(out, {f.severity == Severity::fatal ? "fatal" : "warning", f.code,
                         f.message});
  return out.str();
}

std::string labels_csv(const Corpus& corpus, const CorpusLabels& labels) {
  std::vector<std::string> ids;
  ids.reserve(corpus.tweets.size());
  for (const Tweet& t : corpus.tweets) ids.push_back(t.tweet_id);
  std::sort(ids.begin(), ids.end());
  std::ostringstream out;
  csv::write_row(out, {"tweet_id", "is_misinfo", "misinfo_type", "similarity",
                       "matched_reference_id"});
  for (const std::string& id : ids) {
    const MisinfoLabel& l = labels.misinfo_by_tweet.at(id);
    csv::write_row(out, {id, l.is_misinfo ? "1" : "0",
                         l.type ? std::string(to_string(*l.type)) : "",
                         l.similarity ? fmt10(*l.similarity) : "",
                         l.matched_reference_id.value_or("")});
  }
  return out.str();
}

std::string bots_csv(const Corpus& corpus, const CorpusLabels& labels) {
  std::vector<const UserProfile*> users;
  users.reserve(corpus.users.size());
  for (const auto& [id, u] : corpus.users) users.push_back(&u);
  std::sort(users.begin(), users.end(),
            [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });
  std::ostringstream out;
  csv::write_row(out, {"user_id", "bot_probability", "is_bot"});
  for (const UserProfile* u : users)
    csv::write_row(out, {u->user_id, fmt10(u->bot_probability),
                         labels.bot_by_user.at(u->user_id) ? "1" : "0"});
  return out.str();
}

CorpusLabels read_labels_files(const RunConfig& cfg, Stage stage) {
  CorpusLabels labels;
  std::ifstream lin(cfg.out_dir / "labels.csv", std::ios::binary);
  if (!lin) throw StageError(stage, "labels.csv not found; run the classify stage first");
  auto rows = csv::read_all(lin);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5) throw StageError(stage, "labels.csv: bad row");
    MisinfoLabel l;
    l.is_misinfo = row[1] == "1";
    if (!row[2].empty()) l.type = misinfo_type_from_string(row[2]);
    if (!row[3].empty()) l.similarity = std::stod(row[3]);
    if (!row[4].empty()) l.matched_reference_id = row[4];
    labels.misinfo_by_tweet.emplace(row[0], std::move(l));
  }
  std::ifstream bin(cfg.out_dir / "bots.csv", std::ios::binary);
  if (!bin) throw StageError(stage, "bots.csv not found; run the classify stage first");
  auto brows = csv::read_all(bin);
  for (std::size_t i = 1; i < brows.size(); ++i) {
    const auto& row = brows[i];
    if (row.size() != 3) throw StageError(stage, "bots.csv: bad row");
    labels.bot_by_user.emplace(row[0], row[2] == "1");
  }
  return labels;
}

std::string degrees_csv(const CommNetwork& net) {
  std::ostringstream out;
  csv::write_row(out, {"user_id", "in_degree", "out_degree", "total_degree"});
  for (const std::string& node : net.nodes) {
    const DegreeEntry& d = net.degrees.at(node);
    csv::write_row(out, {node, std::to_string(d.in), std::to_string(d.out),
                         std::to_string(d.total())});
  }
  return out.str();
}

CommNetwork read_degrees_csv(const fs::path& path, const std::string& period_label,
                             Stage stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw StageError(stage, path.filename().string() + " not found; run the graph stage first");
  auto rows = csv::read_all(in);
  CommNetwork net;
  net.period_label = period_label;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) throw StageError(stage, "degrees file: bad row");
    net.nodes.push_back(row[0]);
    net.degrees.emplace(row[0], DegreeEntry{std::stoll(row[1]), std::stoll(row[2])});
  }
  return net;
}

// --- stage cores ---------------------------------------------------------------

struct LoadedInputs {
  Corpus corpus;
  std::vector<Diagnostic> parse_diagnostics;
  ValidationReport report;
};

LoadedInputs ingest_core(const RunConfig& cfg, Emitter& emit) {
  LoadedInputs loaded;
  loaded.corpus = load_corpus(cfg, &loaded.parse_diagnostics);
  loaded.report = validate_corpus(loaded.corpus);
  emit.write_text("validation_report.csv",
                  validation_report_csv(loaded.parse_diagnostics, loaded.report));
  if (!loaded.report.accepted())
    throw StageError(Stage::ingest,
                     "corpus rejected with " + std::to_string(loaded.report.fatal_count()) +
                         " fatal finding(s); see validation_report.csv");
  return loaded;
}

CorpusLabels classify_core(const RunConfig& cfg, const Corpus& corpus,
                           std::span<const ReferenceTweet> references, Emitter& emit) {
  CorpusLabels labels;
  try {
    labels = label_corpus(corpus, references, cfg.misinfo_threshold, cfg.bot_threshold,
                          cfg.effective_threads());
  } catch (const std::exception& e) {
    throw StageError(Stage::classify, e.what());
  }
  if (labels.unlabeled_tweets > 0)
    std::cerr << "classify: " << labels.unlabeled_tweets
              << " tweet(s) lack both an embedding and a precomputed label; "
                 "treated as regular content\n";
  emit.write_text("labels.csv", labels_csv(corpus, labels));
  emit.write_text("bots.csv", bots_csv(corpus, labels));
  return labels;
}

std::vector<CommNetwork> graph_core(const RunConfig& cfg, const Corpus& corpus,
                                    const CorpusLabels& labels, Emitter& emit) {
  std::vector<CommNetwork> networks;
  try {
    networks = build_all_networks(corpus, &labels.bot_by_user, cfg.effective_threads());
  } catch (const std::exception& e) {
    throw StageError(Stage::graph, e.what());
  }
  std::ostringstream stats;
  csv::write_row(stats, {"period", "nodes", "edges", "dropped_external_targets",
                         "dropped_self_loops"});
  for (const CommNetwork& net : networks) {
    std::string slug = slugify(net.period_label);
    emit.write_text("degrees_" + slug + ".csv", degrees_csv(net));
    emit.write_text("network_" + slug + ".dot", export_network(net, GraphFormat::dot));
    emit.write_text("network_" + slug + ".gexf", export_network(net, GraphFormat::gexf));
    csv::write_row(stats, {net.period_label, std::to_string(net.nodes.size()),
                           std::to_string(net.edges.size()),
                           std::to_string(net.dropped_external_targets),
                           std::to_string(net.dropped_self_loops)});
  }
  emit.write_text("graph_stats.csv", stats.str());
  return networks;
}

std::vector<MetricRecord> metrics_core(const RunConfig& cfg, const Corpus& corpus,
                                       std::span<const CommNetwork> networks,
                                       const CorpusLabels& labels, Emitter& emit) {
  std::vector<MetricRecord> records;
  try {
    records = compute_metrics(corpus, networks, labels, cfg.effective_threads());
  } catch (const std::exception& e) {
    throw StageError(Stage::metrics, e.what());
  }
  std::ostringstream out;
  write_metrics_csv(records, out);
  emit.write_text("metrics.csv", out.str());
  return records;
}

struct FitJob {
  DependentVariable dv;
  ModelKind kind;
  DesignMatrix design;
  FitResult fit;
};

void regress_core(const RunConfig& cfg, std::span<const MetricRecord> records,
                  Emitter& emit, std::optional<DependentVariable> only_dv,
                  std::optional<ModelKind> only_model) {
  std::vector<MetricRecord> misinfo_records;
  for (const MetricRecord& r : records)
    if (r.is_misinfo) misinfo_records.push_back(r);
  if (misinfo_records.empty())
    throw StageError(Stage::regress, "no misinformation records to fit");

  std::vector<FitJob> jobs;
  for (auto dv : {DependentVariable::appeal, DependentVariable::scope}) {
    if (only_dv && dv != *only_dv) continue;
    for (auto kind : {ModelKind::baseline, ModelKind::conditional}) {
      if (only_model && kind != *only_model) continue;
      jobs.push_back({dv, kind, {}, {}});
    }
  }

  try {
    parallel_for_chunks(jobs.size(), cfg.effective_threads(), [&](std::size_t begin,
                                                                  std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        FitJob& job = jobs[i];
        ModelSpec spec{job.kind, job.dv, cfg.standardize_account_age};
        job.design = build_design_matrix(misinfo_records, spec, cfg.periods);
        try {
          job.fit = fit_tweedie_glm(job.design.values, job.design.response,
                                    TweedieSpec{1.5, 100, 1e-8});
        } catch (const RankDeficiencyError& e) {
          std::string named = "design for " + std::string(to_string(job.dv)) + "/" +
                              std::string(to_string(job.kind)) +
                              " is rank deficient; dependent columns:";
          for (Eigen::Index c : e.dependent_columns)
            named += ' ' + job.design.column_names[static_cast<std::size_t>(c)];
          throw std::runtime_error(named);
        }
        if (!job.fit.converged)
          throw std::runtime_error(std::string("fit did not converge for ") +
                                   std::string(to_string(job.dv)) + "/" +
                                   std::string(to_string(job.kind)));
      }
    });
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(Stage::regress, e.what());
  }

  std::vector<std::vector<std::string>> vif_rows;
  std::vector<std::vector<std::string>> effect_rows;
  std::vector<std::vector<std::string>> meta_rows;
  for (const FitJob& job : jobs) {
    for (const std::string& warning : job.design.warnings)
      std::cerr << "regress: " << to_string(job.dv) << "/" << to_string(job.kind)
                << ": " << warning << "\n";
    auto rows = wald_table(job.fit, job.design.column_names);
    std::vector<std::vector<std::string>> table;
    for (const WaldRow& r : rows)
      table.push_back({r.term, fmt10(r.estimate), fmt10(r.std_error), fmt10(r.z),
                       fmt10(r.p_value), r.stars});
    std::string base = "fit_" + std::string(to_string(job.dv)) + "_" +
                       std::string(to_string(job.kind));
    emit.write_table(base, {"term", "estimate", "std_error", "z", "p_value", "stars"},
                     table);

    for (const WaldRow& r : rows)
      effect_rows.push_back({std::string(to_string(job.dv)),
                             std::string(to_string(job.kind)), r.term, fmt10(r.estimate),
                             fmt10(effect_percent(r.estimate))});

    meta_rows.push_back({std::string(to_string(job.dv)), std::string(to_string(job.kind)),
                         std::to_string(job.design.values.rows()),
                         std::to_string(job.design.values.cols()),
                         fmt10(job.fit.deviance), fmt10(job.fit.dispersion),
                         std::to_string(job.fit.iterations_used),
                         job.fit.converged ? "1" : "0", cfg.periods.periods().front().label,
                         std::string(to_string(kAllMisinfoTypes.front()))});

    // The collinearity check depends only on the design, so run it once
    // per model kind (the appeal and scope designs share columns).
    if (job.dv == DependentVariable::appeal || only_dv) {
      for (const VifEntry& v : vif(job.design)) {
        char value[40];
        if (std::isinf(v.vif)) std::snprintf(value, sizeof value, "inf");
        else std::snprintf(value, sizeof value, "%.10g", v.vif);
        vif_rows.push_back({std::string(to_string(job.kind)), v.term, value,
                            v.vif < 5.0 ? "1" : "0", v.warning});
      }
    }
  }
  emit.write_table("vif", {"model", "term", "vif", "below_threshold_5", "warning"},
                   vif_rows);
  emit.write_table("effects", {"dv", "model", "term", "estimate", "percent"}, effect_rows);
  emit.write_table("fit_meta",
                   {"dv", "model", "n_rows", "n_columns", "deviance", "dispersion",
                    "iterations", "converged", "reference_period", "reference_misinfo_type"},
                   meta_rows);
}

void report_core(const RunConfig& cfg, const Corpus& corpus, const CorpusLabels& labels,
                 std::span<const MetricRecord> records, Emitter& emit) {
  std::vector<std::string> period_labels;
  for (const Period& p : cfg.periods.periods()) period_labels.push_back(p.label);

  auto summary = summarize_groups(records, period_labels);
  if (emit.format() == TableFormat::csv) {
    std::ostringstream out;
    write_summary_csv(summary, out);
    emit.write_text("summary.csv", out.str());
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const GroupSummary& s : summary)
      rows.push_back({s.group, s.period, std::to_string(s.count), fmt10(s.mean_appeal),
                      fmt10(s.mean_scope), fmt10(s.ln1p_mean_appeal),
                      fmt10(s.ln1p_mean_scope), fmt10(s.appeal_ratio_to_bot),
                      fmt10(s.scope_ratio_to_bot)});
    emit.write_table("summary",
                     {"group", "period", "count", "mean_appeal", "mean_scope",
                      "ln1p_mean_appeal", "ln1p_mean_scope", "appeal_ratio_to_bot",
                      "scope_ratio_to_bot"},
                     rows);
  }
  {
    std::ostringstream out;
    write_summary_svg(summary, out);
    emit.write_text("summary.svg", out.str());
  }

  auto descriptives = descriptive_stats(corpus, labels);
  std::vector<std::vector<std::string>> rows;
  for (const DescriptiveRow& d : descriptives)
    rows.push_back({d.period, std::to_string(d.total_tweets), std::to_string(d.bot_misinfo),
                    std::to_string(d.human_misinfo), std::to_string(d.bot_regular),
                    std::to_string(d.human_regular), fmt10(d.misinfo_share),
                    std::to_string(d.bot_accounts), std::to_string(d.human_accounts),
                    fmt10(d.bot_to_human_ratio), fmt10(d.bot_misinfo_share),
                    fmt10(d.human_misinfo_share)});
  emit.write_table("descriptives",
                   {"period", "total_tweets", "bot_misinfo", "human_misinfo", "bot_regular",
                    "human_regular", "misinfo_share", "bot_accounts", "human_accounts",
                    "bot_to_human_ratio", "bot_misinfo_share", "human_misinfo_share"},
                   rows);
}

std::string manifest_json(const Manifest& m) {
  json j;
  j["status"] = m.status;
  if (!m.failed_stage.empty()) j["failed_stage"] = m.failed_stage;
  json artifacts = json::array();
  for (const ManifestEntry& e : m.artifacts) {
    json entry;
    entry["path"] = e.path;
    entry["sha256"] = e.sha256;
    entry["bytes"] = e.bytes;
    artifacts.push_back(std::move(entry));
  }
  j["artifacts"] = std::move(artifacts);
  return j.dump(2) + "\n";
}

}  // namespace

Manifest run_pipeline(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  try {
    LoadedInputs loaded = ingest_core(cfg, emit);
    auto references = load_references(cfg);
    CorpusLabels labels = classify_core(cfg, loaded.corpus, references, emit);
    auto networks = graph_core(cfg, loaded.corpus, labels, emit);
    auto records = metrics_core(cfg, loaded.corpus, networks, labels, emit);
    regress_core(cfg, records, emit, std::nullopt, std::nullopt);
    report_core(cfg, loaded.corpus, labels, records, emit);
  } catch (const StageError& e) {
    Manifest failed = emit.manifest("FAILED", std::string(stage_name(e.stage)));
    write_manifest(failed, cfg.out_dir);
    throw;
  }
  Manifest manifest = emit.manifest("ok", "");
  write_manifest(manifest, cfg.out_dir);
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream f(out_dir / "manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest.json");
  std::string text = manifest_json(manifest);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// --- standalone stage entry points ----------------------------------------------

void stage_ingest(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  ingest_core(cfg, emit);
}

void stage_classify(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  std::vector<Diagnostic> diagnostics;
  Corpus corpus = load_corpus(cfg, &diagnostics);
  auto references = load_references(cfg);
  classify_core(cfg, corpus, references, emit);
}

void stage_graph(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  Corpus corpus = load_corpus(cfg, nullptr);
  CorpusLabels labels = read_labels_files(cfg, Stage::graph);
  graph_core(cfg, corpus, labels, emit);
}

void stage_metrics(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  Corpus corpus = load_corpus(cfg, nullptr);
  CorpusLabels labels = read_labels_files(cfg, Stage::metrics);
  std::vector<CommNetwork> networks;
  for (const Period& p : cfg.periods.periods())
    networks.push_back(read_degrees_csv(cfg.out_dir / ("degrees_" + slugify(p.label) + ".csv"),
                                        p.label, Stage::metrics));
  metrics_core(cfg, corpus, networks, labels, emit);
}

void stage_regress(const RunConfig& cfg, std::optional<DependentVariable> only_dv,
                   std::optional<ModelKind> only_model) {
  Emitter emit(cfg.out_dir, cfg.format);
  std::ifstream in(cfg.out_dir / "metrics.csv", std::ios::binary);
  if (!in) throw StageError(Stage::regress, "metrics.csv not found; run the metrics stage first");
  std::vector<MetricRecord> records;
  try {
    records = read_metrics_csv(in);
  } catch (const std::exception& e) {
    throw StageError(Stage::regress, e.what());
  }
  regress_core(cfg, records, emit, only_dv, only_model);
}

void stage_report(const RunConfig& cfg) {
  Emitter emit(cfg.out_dir, cfg.format);
  Corpus corpus = load_corpus(cfg, nullptr);
  CorpusLabels labels = read_labels_files(cfg, Stage::report);
  std::ifstream in(cfg.out_dir / "metrics.csv", std::ios::binary);
  if (!in) throw StageError(Stage::report, "metrics.csv not found; run the metrics stage first");
  std::vector<MetricRecord> records;
  try {
    records = read_metrics_csv(in);
  } catch (const std::exception& e) {
    throw StageError(Stage::report, e.what());
  }
  report_core(cfg, corpus, labels, records, emit);
}

void stage_synth(const RunConfig& cfg) {
  if (cfg.tweets_path.empty() || cfg.users_path.empty() || cfg.references_path.empty())
    throw StageError(Stage::synth, "tweets, users and references paths must be configured");
  try {
    SynthOutput output = generate_corpus(cfg.synth);
    fs::path truth = cfg.tweets_path.parent_path() / "truth.json";
    fs::create_directories(cfg.tweets_path.parent_path());
    write_corpus_files(output, cfg.tweets_path, cfg.users_path, cfg.references_path, truth);
  } catch (const std::exception& e) {
    throw StageError(Stage::synth, e.what());
  }
}

}  // namespace appealscope
