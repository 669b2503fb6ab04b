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

#include "appealscope/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "appealscope/csv.hpp"

namespace appealscope {

using nlohmann::json;

std::string_view to_string(MisinfoType t) {
  switch (t) {
    case MisinfoType::conspiracy: return "conspiracy";
    case MisinfoType::fake_cure: return "fake_cure";
    case MisinfoType::fake_treatment: return "fake_treatment";
    case MisinfoType::false_fact_or_prevention: return "false_fact_or_prevention";
    case MisinfoType::false_public_health_response: return "false_public_health_response";
  }
  return "unknown";
}

std::optional<MisinfoType> misinfo_type_from_string(std::string_view name) {
  for (MisinfoType t : kAllMisinfoTypes)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

bool operator==(const Tweet& a, const Tweet& b) {
  auto embedding_equal = [](const std::optional<Eigen::VectorXd>& x,
                            const std::optional<Eigen::VectorXd>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->size() == y->size() && *x == *y;
  };
  return a.tweet_id == b.tweet_id && a.author_id == b.author_id &&
         a.created_at == b.created_at && a.is_retweet == b.is_retweet &&
         a.retweeted_author_id == b.retweeted_author_id &&
         a.mentioned_author_ids == b.mentioned_author_ids &&
         a.retweet_count == b.retweet_count && a.misinfo == b.misinfo &&
         embedding_equal(a.embedding, b.embedding);
}

// --- periods -----------------------------------------------------------------

PeriodConfig PeriodConfig::from_periods(std::vector<Period> periods) {
  if (periods.empty()) throw std::invalid_argument("period config: no periods given");
  std::unordered_set<std::string> labels;
  for (const Period& p : periods) {
    if (p.start > p.end)
      throw std::invalid_argument("period '" + p.label + "': start after end");
    if (!labels.insert(p.label).second)
      throw std::invalid_argument("period label '" + p.label + "' repeated");
  }
  for (std::size_t i = 0; i < periods.size(); ++i)
    for (std::size_t j = i + 1; j < periods.size(); ++j)
      if (periods[i].start <= periods[j].end && periods[j].start <= periods[i].end)
        throw std::invalid_argument("periods '" + periods[i].label + "' and '" +
                                    periods[j].label + "' overlap");
  PeriodConfig cfg;
  cfg.periods_ = std::move(periods);
  return cfg;
}

std::optional<std::size_t> PeriodConfig::index_of(UtcSeconds instant) const {
  UtcDate d = date_of(instant);
  for (std::size_t i = 0; i < periods_.size(); ++i)
    if (periods_[i].start <= d && d <= periods_[i].end) return i;
  return std::nullopt;
}

std::optional<std::string> PeriodConfig::label_of(UtcSeconds instant) const {
  auto i = index_of(instant);
  if (!i) return std::nullopt;
  return periods_[*i].label;
}

PeriodConfig default_periods() {
  auto d = [](int y, unsigned m, unsigned day) {
    return UtcDate{std::chrono::year{y} / m / day};
  };
  return PeriodConfig::from_periods({
      {"Pre-Vaccine", d(2020, 12, 1), d(2020, 12, 7)},
      {"Vaccine Launch", d(2020, 12, 8), d(2020, 12, 10)},
      {"Post-Vaccine", d(2021, 1, 25), d(2021, 1, 31)},
  });
}

std::optional<std::string> assign_period(UtcSeconds created_at,
                                         const PeriodConfig& config) {
  return config.label_of(created_at);
}

// --- tweet parsing -----------------------------------------------------------

namespace {

Tweet tweet_from_json(const json& j, const TweetParseOptions& options) {
  Tweet t;
  t.tweet_id = j.at("id").get<std::string>();
  t.author_id = j.at("author_id").get<std::string>();

  auto ts = parse_utc_timestamp(j.at("created_at").get<std::string>());
  if (!ts) throw std::runtime_error("bad created_at timestamp");
  t.created_at = *ts;

  t.is_retweet = j.at("is_retweet").get<bool>();
  if (j.contains("retweeted_author_id") && !j["retweeted_author_id"].is_null())
    t.retweeted_author_id = j["retweeted_author_id"].get<std::string>();
  if (t.is_retweet && !t.retweeted_author_id)
    throw std::runtime_error("retweet missing source");

  if (j.contains("mentions"))
    t.mentioned_author_ids = j.at("mentions").get<std::vector<std::string>>();

  t.retweet_count = j.at("retweet_count").get<long long>();
  if (t.retweet_count < 0) throw std::runtime_error("negative retweet_count");

  if (j.contains("embedding") && !j["embedding"].is_null()) {
    auto values = j["embedding"].get<std::vector<double>>();
    Eigen::VectorXd e(static_cast<Eigen::Index>(values.size()));
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = values[static_cast<size_t>(i)];
    if (options.embedding_dim && e.size() != *options.embedding_dim)
      throw std::runtime_error("embedding dimension mismatch");
    t.embedding = std::move(e);
  }

  if (j.contains("misinfo") && !j["misinfo"].is_null()) {
    const json& m = j["misinfo"];
    MisinfoLabel label;
    label.is_misinfo = m.at("is_misinfo").get<bool>();
    if (m.contains("type") && !m["type"].is_null()) {
      auto type = misinfo_type_from_string(m["type"].get<std::string>());
      if (!type) throw std::runtime_error("unknown misinfo type");
      label.type = *type;
    }
    if (m.contains("similarity") && !m["similarity"].is_null())
      label.similarity = m["similarity"].get<double>();
    if (m.contains("matched_reference_id") && !m["matched_reference_id"].is_null())
      label.matched_reference_id = m["matched_reference_id"].get<std::string>();
    if (label.is_misinfo && (!label.type || !label.similarity))
      throw std::runtime_error("misinfo label missing type or similarity");
    t.misinfo = std::move(label);
  }
  return t;
}

}  // namespace

TweetParseResult parse_tweets(std::istream& in, const TweetParseOptions& options) {
  if (!in) throw std::runtime_error("tweet stream unreadable");
  TweetParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      result.tweets.push_back(tweet_from_json(json::parse(line), options));
    } catch (const std::exception& e) {
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw std::runtime_error("tweet stream read failure");
  return result;
}

UserParseResult parse_users(std::istream& in) {
  if (!in) throw std::runtime_error("user stream unreadable");
  UserParseResult result;
  auto rows = csv::read_all(in);
  if (rows.empty()) return result;

  const std::vector<std::string> expected = {"user_id", "created_at", "bot_probability"};
  if (rows[0] != expected)
    throw std::runtime_error("users.csv: unexpected header");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::size_t line_no = r + 1;
    if (row.size() != 3) {
      result.diagnostics.push_back({line_no, "expected 3 fields"});
      continue;
    }
    UserProfile u;
    u.user_id = row[0];
    auto date = parse_utc_date(row[1]);
    if (!date) {
      result.diagnostics.push_back({line_no, "bad created_at date"});
      continue;
    }
    u.created_at = *date;
    try {
      size_t pos = 0;
      u.bot_probability = std::stod(row[2], &pos);
      if (pos != row[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      result.diagnostics.push_back({line_no, "bad bot_probability"});
      continue;
    }
    if (u.bot_probability < 0.0 || u.bot_probability > 1.0) {
      result.diagnostics.push_back({line_no, "bot_probability outside [0,1]"});
      continue;
    }
    auto [it, inserted] = result.users.emplace(u.user_id, std::move(u));
    if (!inserted)
      throw std::runtime_error("duplicate user_id '" + row[0] + "'");
  }
  return result;
}

// --- serialization -----------------------------------------------------------

void serialize_tweets(std::span<const Tweet> tweets, std::ostream& out) {
  for (const Tweet& t : tweets) {
    json j;
    j["id"] = t.tweet_id;
    j["author_id"] = t.author_id;
    j["created_at"] = format_utc_timestamp(t.created_at);
    j["is_retweet"] = t.is_retweet;
    if (t.retweeted_author_id) j["retweeted_author_id"] = *t.retweeted_author_id;
    j["mentions"] = t.mentioned_author_ids;
    j["retweet_count"] = t.retweet_count;
    if (t.embedding) {
      std::vector<double> values(t.embedding->data(),
                                 t.embedding->data() + t.embedding->size());
      j["embedding"] = values;
    }
    if (t.misinfo) {
      json m;
      m["is_misinfo"] = t.misinfo->is_misinfo;
      if (t.misinfo->type) m["type"] = std::string(to_string(*t.misinfo->type));
      if (t.misinfo->similarity) m["similarity"] = *t.misinfo->similarity;
      if (t.misinfo->matched_reference_id)
        m["matched_reference_id"] = *t.misinfo->matched_reference_id;
      j["misinfo"] = std::move(m);
    }
    out << j.dump() << '\n';
  }
}

void serialize_users(const std::unordered_map<std::string, UserProfile>& users,
                     std::ostream& out) {
  csv::write_row(out, {"user_id", "created_at", "bot_probability"});
  std::vector<const UserProfile*> sorted;
  sorted.reserve(users.size());
  for (const auto& [id, u] : users) sorted.push_back(&u);
  std::sort(sorted.begin(), sorted.end(),
            [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });
  for (const UserProfile* u : sorted) {
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.10g", u->bot_probability);
    csv::write_row(out, {u->user_id, format_utc_date(u->created_at), prob});
  }
}

// --- validation --------------------------------------------------------------

std::size_t ValidationReport::fatal_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.severity == Severity::fatal; }));
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const Finding& f : findings)
    out << (f.severity == Severity::fatal ? "fatal" : "warning") << ',' << f.code
        << ',' << f.message << '\n';
  return out.str();
}

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  std::unordered_set<std::string> seen_ids;
  std::optional<Eigen::Index> embedding_dim;

  for (const Tweet& t : corpus.tweets) {
    if (!seen_ids.insert(t.tweet_id).second)
      report.findings.push_back({Severity::fatal, "duplicate_tweet_id",
                                 "tweet_id '" + t.tweet_id + "' repeated"});
    if (!corpus.users.contains(t.author_id))
      report.findings.push_back({Severity::fatal, "unresolved_author",
                                 "tweet '" + t.tweet_id + "' author '" +
                                     t.author_id + "' not in user table"});
    if (t.is_retweet && !t.retweeted_author_id)
      report.findings.push_back({Severity::fatal, "retweet_missing_source",
                                 "tweet '" + t.tweet_id + "' is a retweet without source"});
    auto period_index = corpus.periods.index_of(t.created_at);
    if (!period_index) {
      report.findings.push_back({Severity::warning, "out_of_window",
                                 "tweet '" + t.tweet_id + "' at " +
                                     format_utc_timestamp(t.created_at) +
                                     " falls outside every period"});
    } else if (auto user = corpus.users.find(t.author_id); user != corpus.users.end()) {
      // An account cannot tweet inside a period that ends before it was
      // created; downstream account-age arithmetic relies on this.
      const Period& period = corpus.periods.periods()[*period_index];
      if (user->second.created_at > period.end)
        report.findings.push_back({Severity::fatal, "impossible_account",
                                   "tweet '" + t.tweet_id + "' author '" + t.author_id +
                                       "' was created " +
                                       format_utc_date(user->second.created_at) +
                                       ", after period '" + period.label + "' ends"});
    }
    if (t.embedding) {
      if (!embedding_dim) {
        embedding_dim = t.embedding->size();
      } else if (*embedding_dim != t.embedding->size()) {
        report.findings.push_back({Severity::fatal, "embedding_dim_mismatch",
                                   "tweet '" + t.tweet_id + "' embedding has dimension " +
                                       std::to_string(t.embedding->size()) + ", expected " +
                                       std::to_string(*embedding_dim)});
      }
    }
  }
  return report;
}

}  // namespace appealscope
