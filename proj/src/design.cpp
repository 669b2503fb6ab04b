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

#include "appealscope/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace appealscope {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::baseline ? "baseline" : "conditional";
}

std::string_view to_string(DependentVariable dv) {
  return dv == DependentVariable::appeal ? "appeal" : "scope";
}

std::string slugify(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool last_underscore = false;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      last_underscore = false;
    } else if (!out.empty() && !last_underscore) {
      out.push_back('_');
      last_underscore = true;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

DesignMatrix build_design_matrix(std::span<const MetricRecord> records,
                                 const ModelSpec& spec, const PeriodConfig& periods) {
  if (records.empty())
    throw std::invalid_argument("design: no records");
  for (const MetricRecord& r : records) {
    if (!r.is_misinfo)
      throw std::invalid_argument("design: record '" + r.tweet_id +
                                  "' is not a misinformation tweet");
    if (!r.misinfo_type)
      throw std::invalid_argument("design: record '" + r.tweet_id +
                                  "' lacks a content category");
  }

  const auto& period_list = periods.periods();
  if (period_list.empty()) throw std::invalid_argument("design: no periods");

  // Column plan. Reference levels: first period, first (alphabetical)
  // content category.
  struct Column {
    std::string name;
    enum class Kind { intercept, bot, period, interaction, type, retweet, age } kind;
    std::size_t period_index = 0;   // for period/interaction columns
    MisinfoType type = MisinfoType::conspiracy;
  };
  using Kind = Column::Kind;

  std::vector<Column> plan;
  plan.push_back({"intercept", Kind::intercept, 0, {}});
  plan.push_back({"bot", Kind::bot, 0, {}});
  for (std::size_t i = 1; i < period_list.size(); ++i)
    plan.push_back({slugify(period_list[i].label), Kind::period, i, {}});
  if (spec.kind == ModelKind::conditional)
    for (std::size_t i = 1; i < period_list.size(); ++i)
      plan.push_back({"bot_x_" + slugify(period_list[i].label), Kind::interaction, i, {}});
  for (std::size_t t = 1; t < kAllMisinfoTypes.size(); ++t)
    plan.push_back({std::string(to_string(kAllMisinfoTypes[t])), Kind::type, 0,
                    kAllMisinfoTypes[t]});
  plan.push_back({"is_retweet", Kind::retweet, 0, {}});
  plan.push_back({"account_age_days", Kind::age, 0, {}});

  std::map<std::string, std::size_t> period_index;
  for (std::size_t i = 0; i < period_list.size(); ++i)
    period_index[period_list[i].label] = i;

  auto cell = [&](const MetricRecord& r, const Column& col) -> double {
    auto pit = period_index.find(r.period);
    if (pit == period_index.end())
      throw std::invalid_argument("design: record '" + r.tweet_id +
                                  "' has unknown period '" + r.period + "'");
    switch (col.kind) {
      case Kind::intercept: return 1.0;
      case Kind::bot: return r.is_bot ? 1.0 : 0.0;
      case Kind::period: return pit->second == col.period_index ? 1.0 : 0.0;
      case Kind::interaction:
        return (r.is_bot && pit->second == col.period_index) ? 1.0 : 0.0;
      case Kind::type: return *r.misinfo_type == col.type ? 1.0 : 0.0;
      case Kind::retweet: return r.is_retweet ? 1.0 : 0.0;
      case Kind::age: return static_cast<double>(r.account_age_days);
    }
    return 0.0;
  };

  const auto n = static_cast<Eigen::Index>(records.size());
  Matrix full(n, static_cast<Eigen::Index>(plan.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t j = 0; j < plan.size(); ++j)
      full(i, static_cast<Eigen::Index>(j)) = cell(records[static_cast<std::size_t>(i)], plan[j]);

  // Drop dummy columns with zero observations.
  DesignMatrix design;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const Column& col = plan[j];
    bool droppable = col.kind == Kind::period || col.kind == Kind::interaction ||
                     col.kind == Kind::type;
    if (droppable && full.col(static_cast<Eigen::Index>(j)).isZero(0.0)) {
      design.warnings.push_back("column '" + col.name + "' has zero observations; dropped");
      continue;
    }
    keep.push_back(static_cast<Eigen::Index>(j));
  }

  design.values.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    design.values.col(static_cast<Eigen::Index>(j)) = full.col(keep[j]);
    design.column_names.push_back(plan[static_cast<std::size_t>(keep[j])].name);
  }

  if (spec.standardize_account_age) {
    Eigen::Index age_col = static_cast<Eigen::Index>(design.column_names.size()) - 1;
    auto col = design.values.col(age_col);
    double mean = col.mean();
    double sd = std::sqrt((col.array() - mean).square().sum() /
                          std::max<double>(1.0, static_cast<double>(n - 1)));
    if (sd > 0.0) col = (col.array() - mean) / sd;
    design.column_names[static_cast<std::size_t>(age_col)] = "account_age_std";
  }

  design.response.resize(n);
  design.row_keys.reserve(records.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const MetricRecord& r = records[static_cast<std::size_t>(i)];
    design.response[i] = spec.dv == DependentVariable::appeal ? r.appeal : r.scope;
    design.row_keys.push_back(r.tweet_id);
  }
  return design;
}

std::vector<VifEntry> vif(const DesignMatrix& design) {
  const Eigen::Index k = design.values.cols();
  const Eigen::Index n = design.values.rows();
  if (k < 2) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<VifEntry> out;
  for (Eigen::Index j = 1; j < k; ++j) {  // intercept excluded from the report
    VifEntry entry;
    entry.term = design.column_names[static_cast<std::size_t>(j)];

    Vector target = design.values.col(j);
    double mean = target.mean();
    double sst = (target.array() - mean).square().sum();
    if (sst == 0.0) {
      entry.vif = kInf;
      entry.warning = "column '" + entry.term + "' is constant";
      out.push_back(std::move(entry));
      continue;
    }

    Matrix others(n, k - 1);
    Eigen::Index c = 0;
    for (Eigen::Index m = 0; m < k; ++m)
      if (m != j) others.col(c++) = design.values.col(m);

    Vector fitted = others * others.colPivHouseholderQr().solve(target);
    double ssr = (target - fitted).squaredNorm();
    double r2 = 1.0 - ssr / sst;
    // Rounding noise far below the diagnostic's resolution: independent
    // columns must report exactly 1.
    if (std::abs(r2) < 1e-12) r2 = 0.0;
    if (1.0 - r2 < 1e-12) {
      entry.vif = kInf;
      entry.warning = "column '" + entry.term + "' is perfectly collinear";
    } else {
      entry.vif = 1.0 / (1.0 - r2);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

double effect_percent(double coefficient) {
  return (std::exp(coefficient) - 1.0) * 100.0;
}

std::vector<DescriptiveRow> descriptive_stats(const Corpus& corpus,
                                              const CorpusLabels& labels) {
  const auto& periods = corpus.periods.periods();

  struct Accum {
    long long bot_misinfo = 0, human_misinfo = 0, bot_regular = 0, human_regular = 0;
    std::set<std::string> bot_accounts, human_accounts;
  };
  std::vector<Accum> acc(periods.size() + 1);  // last slot is overall

  for (const Tweet& t : corpus.tweets) {
    auto idx = corpus.periods.index_of(t.created_at);
    if (!idx) continue;
    auto bot_it = labels.bot_by_user.find(t.author_id);
    bool bot = bot_it != labels.bot_by_user.end() && bot_it->second;
    auto mis_it = labels.misinfo_by_tweet.find(t.tweet_id);
    bool misinfo = mis_it != labels.misinfo_by_tweet.end() && mis_it->second.is_misinfo;
    for (Accum* a : {&acc[*idx], &acc.back()}) {
      if (bot && misinfo) ++a->bot_misinfo;
      else if (!bot && misinfo) ++a->human_misinfo;
      else if (bot) ++a->bot_regular;
      else ++a->human_regular;
      (bot ? a->bot_accounts : a->human_accounts).insert(t.author_id);
    }
  }

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  auto share = [](long long part, long long whole) {
    return whole > 0 ? static_cast<double>(part) / static_cast<double>(whole) : kNaN;
  };

  std::vector<DescriptiveRow> rows;
  for (std::size_t i = 0; i <= periods.size(); ++i) {
    const Accum& a = acc[i == periods.size() ? periods.size() : i];
    DescriptiveRow row;
    row.period = i == periods.size() ? "overall" : periods[i].label;
    row.bot_misinfo = a.bot_misinfo;
    row.human_misinfo = a.human_misinfo;
    row.bot_regular = a.bot_regular;
    row.human_regular = a.human_regular;
    row.total_tweets = a.bot_misinfo + a.human_misinfo + a.bot_regular + a.human_regular;
    row.misinfo_share = share(a.bot_misinfo + a.human_misinfo, row.total_tweets);
    row.bot_accounts = static_cast<long long>(a.bot_accounts.size());
    row.human_accounts = static_cast<long long>(a.human_accounts.size());
    row.bot_to_human_ratio = row.human_accounts > 0
                                 ? static_cast<double>(row.bot_accounts) /
                                       static_cast<double>(row.human_accounts)
                                 : kNaN;
    row.bot_misinfo_share = share(a.bot_misinfo, a.bot_misinfo + a.bot_regular);
    row.human_misinfo_share = share(a.human_misinfo, a.human_misinfo + a.human_regular);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace appealscope
