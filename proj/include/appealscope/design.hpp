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

#ifndef APPEALSCOPE_DESIGN_HPP_
#define APPEALSCOPE_DESIGN_HPP_

#include <span>
#include <string>
#include <vector>

#include "appealscope/influence.hpp"
#include "appealscope/tweedie.hpp"

namespace appealscope {

enum class ModelKind { baseline, conditional };
enum class DependentVariable { appeal, scope };

std::string_view to_string(ModelKind kind);
std::string_view to_string(DependentVariable dv);

// Reference levels: the first configured period, the alphabetically first
// content category, human account, original tweet.
struct ModelSpec {
  ModelKind kind = ModelKind::baseline;
  DependentVariable dv = DependentVariable::appeal;
  // Optional sensitivity switch: center and scale account age to unit
  // variance instead of entering raw days.
  bool standardize_account_age = false;
};

struct DesignMatrix {
  std::vector<std::string> column_names;  // first is the all-ones intercept
  Matrix values;                          // n x k
  Vector response;
  std::vector<std::string> row_keys;      // tweet ids
  std::vector<std::string> warnings;      // dropped zero-observation categories
};

// Lowercase snake_case identifier from a free-form label.
std::string slugify(std::string_view label);

// Fixed column order: intercept, bot, non-reference period dummies, (for
// the conditional model) bot x period interactions, non-reference content
// category dummies, is_retweet, account_age_days. All records must carry
// a positive content label; a category observed zero times is dropped
// with a warning. Throws std::invalid_argument on empty or mixed input.
DesignMatrix build_design_matrix(std::span<const MetricRecord> records,
                                 const ModelSpec& spec, const PeriodConfig& periods);

struct VifEntry {
  std::string term;
  double vif = 0.0;      // +infinity under perfect collinearity
  std::string warning;   // nonempty when flagged
};

// 1 / (1 - R^2) from regressing each non-intercept column on all the
// others (intercept included). Perfect collinearity reports +infinity
// with a named warning instead of failing.
std::vector<VifEntry> vif(const DesignMatrix& design);

// (exp(coefficient) - 1) * 100: percent change per unit under a log link.
double effect_percent(double coefficient);

// Per-period composition: tweet counts crossed over account identity and
// content class, misinfo shares, and the distinct-account bot-to-human
// ratio. Shares are NaN for empty denominators.
struct DescriptiveRow {
  std::string period;  // label or "overall"
  long long total_tweets = 0;
  long long bot_misinfo = 0;
  long long human_misinfo = 0;
  long long bot_regular = 0;
  long long human_regular = 0;
  double misinfo_share = 0.0;
  long long bot_accounts = 0;    // distinct in-period authors
  long long human_accounts = 0;
  double bot_to_human_ratio = 0.0;
  double bot_misinfo_share = 0.0;    // misinfo share within bot tweets
  double human_misinfo_share = 0.0;
};

std::vector<DescriptiveRow> descriptive_stats(const Corpus& corpus,
                                              const CorpusLabels& labels);

}  // namespace appealscope

#endif  // APPEALSCOPE_DESIGN_HPP_
