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

#ifndef APPEALSCOPE_CORPUS_HPP_
#define APPEALSCOPE_CORPUS_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "appealscope/labels.hpp"
#include "appealscope/timeutil.hpp"

namespace appealscope {

// One post record as ingested. `retweet_count` is the platform engagement
// snapshot carried on the record, not a within-corpus recount.
struct Tweet {
  std::string tweet_id;
  std::string author_id;
  UtcSeconds created_at{};
  bool is_retweet = false;
  std::optional<std::string> retweeted_author_id;
  std::vector<std::string> mentioned_author_ids;
  long long retweet_count = 0;
  std::optional<Eigen::VectorXd> embedding;
  std::optional<MisinfoLabel> misinfo;
};

bool operator==(const Tweet& a, const Tweet& b);

struct UserProfile {
  std::string user_id;
  UtcDate created_at{};
  double bot_probability = 0.0;
};

struct Period {
  std::string label;
  UtcDate start{};  // inclusive
  UtcDate end{};    // inclusive
};

// Ordered, validated sequence of non-overlapping periods.
class PeriodConfig {
 public:
  PeriodConfig() = default;

  // Throws std::invalid_argument on empty input, duplicate labels,
  // start > end, or overlapping date ranges.
  static PeriodConfig from_periods(std::vector<Period> periods);

  const std::vector<Period>& periods() const { return periods_; }
  std::size_t size() const { return periods_.size(); }

  // Containment is by UTC calendar date with inclusive bounds, so an
  // instant at 23:59:59 on the end date still belongs to the period.
  std::optional<std::size_t> index_of(UtcSeconds instant) const;
  std::optional<std::string> label_of(UtcSeconds instant) const;

 private:
  std::vector<Period> periods_;
};

// The bundled three-window study configuration.
PeriodConfig default_periods();

std::optional<std::string> assign_period(UtcSeconds created_at,
                                         const PeriodConfig& config);

struct Corpus {
  std::vector<Tweet> tweets;
  std::unordered_map<std::string, UserProfile> users;
  PeriodConfig periods;
};

// --- parsing ---------------------------------------------------------------

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct TweetParseOptions {
  // When set, every embedding must have exactly this dimension; otherwise
  // consistency is checked later by validate_corpus.
  std::optional<Eigen::Index> embedding_dim;
};

struct TweetParseResult {
  std::vector<Tweet> tweets;
  std::vector<Diagnostic> diagnostics;
};

// Line-delimited JSON, one object per line. Malformed lines become
// diagnostics and parsing continues; an unreadable stream throws
// std::runtime_error.
TweetParseResult parse_tweets(std::istream& in, const TweetParseOptions& options = {});

struct UserParseResult {
  std::unordered_map<std::string, UserProfile> users;
  std::vector<Diagnostic> diagnostics;
};

// CSV with header `user_id,created_at,bot_probability`. Out-of-range
// probabilities and malformed rows become diagnostics; a duplicate
// user_id throws std::runtime_error naming the id.
UserParseResult parse_users(std::istream& in);

// Inverse of parse_tweets/parse_users, used by the synthetic generator
// and the round-trip tests.
void serialize_tweets(std::span<const Tweet> tweets, std::ostream& out);
void serialize_users(const std::unordered_map<std::string, UserProfile>& users,
                     std::ostream& out);

// --- validation ------------------------------------------------------------

enum class Severity { warning, fatal };

struct Finding {
  Severity severity = Severity::warning;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  std::size_t fatal_count() const;
  bool accepted() const { return fatal_count() == 0; }
  std::string to_text() const;
};

// Checks author resolution, tweet-id uniqueness, retweet structure,
// embedding dimension consistency and period containment. Out-of-window
// tweets are warnings: they stay in the corpus but are excluded from all
// downstream computation.
ValidationReport validate_corpus(const Corpus& corpus);

}  // namespace appealscope

#endif  // APPEALSCOPE_CORPUS_HPP_
