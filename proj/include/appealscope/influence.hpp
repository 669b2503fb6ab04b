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

#ifndef APPEALSCOPE_INFLUENCE_HPP_
#define APPEALSCOPE_INFLUENCE_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "appealscope/classify.hpp"
#include "appealscope/corpus.hpp"
#include "appealscope/netgraph.hpp"

namespace appealscope {

// Mid-distribution percentile ranks over a fixed population, mapped to
// [0,1]: (fraction strictly below) + 0.5 * (fraction equal). Under this
// convention the rank averaged over every member is exactly 1/2, ties or
// not, which is why it is used for the heavily tied degree and
// retweet-count distributions.
class PercentileTable {
 public:
  // Throws std::invalid_argument on an empty population.
  explicit PercentileTable(std::vector<double> population);

  // `value` must be a member of the population (std::invalid_argument
  // otherwise).
  double rank(double value) const;

  // count_below + 0.5 * count_equal; a half-integer, exact in a double.
  // rank() is this divided by size().
  double rank_numerator(double value) const;

  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

// One-shot convenience over PercentileTable.
double percentile_rank(std::span<const double> population, double value);

// retweet_count * (1 + degree_percentile): engagement weighted by the
// author's relative network position. Range [count, 2*count].
double appeal(long long retweet_count, double degree_percentile);

// total_degree * (1 + retweet_percentile): the author's reach weighted by
// the tweet's relative engagement. Range [degree, 2*degree].
double scope(long long total_degree, double retweet_percentile);

// Per-tweet analysis row. Invariants: appeal and scope equal the formulas
// above exactly; percentiles lie in [0,1].
struct MetricRecord {
  std::string tweet_id;
  std::string period;
  double appeal = 0.0;
  double scope = 0.0;
  long long retweet_count = 0;
  long long total_degree = 0;
  double degree_percentile = 0.0;
  double retweet_percentile = 0.0;
  bool is_bot = false;
  bool is_misinfo = false;
  std::optional<MisinfoType> misinfo_type;
  bool is_retweet = false;
  long account_age_days = 0;
};

// One record per in-period tweet, ordered by (period, tweet_id). Degree
// percentiles are taken over all period nodes, retweet percentiles over
// all in-period tweets. Throws std::runtime_error when a period has no
// network.
std::vector<MetricRecord> compute_metrics(const Corpus& corpus,
                                          std::span<const CommNetwork> networks,
                                          const CorpusLabels& labels,
                                          unsigned threads = 1);

// Group aggregation crossed over account identity and content class, one
// row per group overall and per period. ln(1+mean) tolerates zero means.
struct GroupSummary {
  std::string group;   // BotMisinfo / HumanMisinfo / BotInfo / HumanInfo
  std::string period;  // "overall" or a period label
  std::size_t count = 0;
  double mean_appeal = 0.0;  // NaN when count == 0
  double mean_scope = 0.0;
  double ln1p_mean_appeal = 0.0;
  double ln1p_mean_scope = 0.0;
  // Human rows: human-group mean over the bot counterpart's mean in the
  // same content class and period scope. NaN when undefined.
  double appeal_ratio_to_bot = 0.0;
  double scope_ratio_to_bot = 0.0;
};

std::vector<GroupSummary> summarize_groups(std::span<const MetricRecord> records,
                                           std::span<const std::string> period_labels);

void write_metrics_csv(std::span<const MetricRecord> records, std::ostream& out);
std::vector<MetricRecord> read_metrics_csv(std::istream& in);
void write_summary_csv(std::span<const GroupSummary> rows, std::ostream& out);

// Grouped bar chart of the ln-transformed overall means, raw means
// printed atop the bars.
void write_summary_svg(std::span<const GroupSummary> rows, std::ostream& out);

}  // namespace appealscope

#endif  // APPEALSCOPE_INFLUENCE_HPP_
