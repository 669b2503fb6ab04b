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

#include "appealscope/influence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "appealscope/csv.hpp"
#include "appealscope/parallel.hpp"

namespace appealscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

PercentileTable::PercentileTable(std::vector<double> population)
    : sorted_(std::move(population)) {
  if (sorted_.empty())
    throw std::invalid_argument("percentile_rank: empty population");
  std::sort(sorted_.begin(), sorted_.end());
}

double PercentileTable::rank_numerator(double value) const {
  auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), value);
  auto hi = std::upper_bound(lo, sorted_.end(), value);
  if (lo == hi)
    throw std::invalid_argument("percentile_rank: value not in population");
  auto below = static_cast<double>(lo - sorted_.begin());
  auto equal = static_cast<double>(hi - lo);
  return below + 0.5 * equal;
}

double PercentileTable::rank(double value) const {
  return rank_numerator(value) / static_cast<double>(sorted_.size());
}

double percentile_rank(std::span<const double> population, double value) {
  return PercentileTable({population.begin(), population.end()}).rank(value);
}

double appeal(long long retweet_count, double degree_percentile) {
  if (retweet_count < 0) throw std::invalid_argument("appeal: negative retweet count");
  if (degree_percentile < 0.0 || degree_percentile > 1.0)
    throw std::invalid_argument("appeal: percentile outside [0,1]");
  return static_cast<double>(retweet_count) * (1.0 + degree_percentile);
}

double scope(long long total_degree, double retweet_percentile) {
  if (total_degree < 0) throw std::invalid_argument("scope: negative degree");
  if (retweet_percentile < 0.0 || retweet_percentile > 1.0)
    throw std::invalid_argument("scope: percentile outside [0,1]");
  return static_cast<double>(total_degree) * (1.0 + retweet_percentile);
}

std::vector<MetricRecord> compute_metrics(const Corpus& corpus,
                                          std::span<const CommNetwork> networks,
                                          const CorpusLabels& labels,
                                          unsigned threads) {
  const auto& periods = corpus.periods.periods();
  for (const Period& p : periods) {
    bool found = std::any_of(networks.begin(), networks.end(),
                             [&](const CommNetwork& n) { return n.period_label == p.label; });
    if (!found)
      throw std::runtime_error("compute_metrics: no network for period '" + p.label + "'");
  }

  std::vector<std::vector<const Tweet*>> in_period(periods.size());
  for (const Tweet& t : corpus.tweets) {
    auto idx = corpus.periods.index_of(t.created_at);
    if (idx) in_period[*idx].push_back(&t);
  }

  std::vector<std::vector<MetricRecord>> per_period(periods.size());
  parallel_for_chunks(periods.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t pi = begin; pi < end; ++pi) {
      const Period& period = periods[pi];
      const auto& tweets = in_period[pi];
      if (tweets.empty()) continue;
      auto net_it = std::find_if(networks.begin(), networks.end(), [&](const CommNetwork& n) {
        return n.period_label == period.label;
      });
      const CommNetwork& net = *net_it;

      std::vector<double> degree_population;
      degree_population.reserve(net.nodes.size());
      for (const std::string& node : net.nodes)
        degree_population.push_back(static_cast<double>(net.degrees.at(node).total()));
      PercentileTable degree_table(std::move(degree_population));

      std::vector<double> retweet_population;
      retweet_population.reserve(tweets.size());
      for (const Tweet* t : tweets)
        retweet_population.push_back(static_cast<double>(t->retweet_count));
      PercentileTable retweet_table(std::move(retweet_population));

      auto& records = per_period[pi];
      records.reserve(tweets.size());
      for (const Tweet* t : tweets) {
        MetricRecord r;
        r.tweet_id = t->tweet_id;
        r.period = period.label;
        r.retweet_count = t->retweet_count;
        r.total_degree = total_degree(net, t->author_id);
        r.degree_percentile = degree_table.rank(static_cast<double>(r.total_degree));
        r.retweet_percentile = retweet_table.rank(static_cast<double>(r.retweet_count));
        r.appeal = appeal(r.retweet_count, r.degree_percentile);
        r.scope = scope(r.total_degree, r.retweet_percentile);

        auto bot_it = labels.bot_by_user.find(t->author_id);
        r.is_bot = bot_it != labels.bot_by_user.end() && bot_it->second;
        auto mis_it = labels.misinfo_by_tweet.find(t->tweet_id);
        if (mis_it != labels.misinfo_by_tweet.end()) {
          r.is_misinfo = mis_it->second.is_misinfo;
          r.misinfo_type = mis_it->second.type;
        }
        r.is_retweet = t->is_retweet;
        auto user_it = corpus.users.find(t->author_id);
        if (user_it == corpus.users.end())
          throw std::runtime_error("compute_metrics: unresolved author '" + t->author_id + "'");
        r.account_age_days = account_age_days(user_it->second.created_at, period.end);
        records.push_back(std::move(r));
      }
      std::sort(records.begin(), records.end(),
                [](const MetricRecord& a, const MetricRecord& b) {
                  return a.tweet_id < b.tweet_id;
                });
    }
  });

  std::vector<MetricRecord> all;
  for (auto& records : per_period)
    for (auto& r : records) all.push_back(std::move(r));
  return all;
}

namespace {

std::string group_name(bool is_bot, bool is_misinfo) {
  if (is_bot) return is_misinfo ? "BotMisinfo" : "BotInfo";
  return is_misinfo ? "HumanMisinfo" : "HumanInfo";
}

struct Accum {
  std::size_t count = 0;
  double appeal_sum = 0.0;
  double scope_sum = 0.0;
};

GroupSummary finish(const std::string& group, const std::string& period, const Accum& a) {
  GroupSummary s;
  s.group = group;
  s.period = period;
  s.count = a.count;
  if (a.count == 0) {
    s.mean_appeal = s.mean_scope = s.ln1p_mean_appeal = s.ln1p_mean_scope = kNaN;
  } else {
    s.mean_appeal = a.appeal_sum / static_cast<double>(a.count);
    s.mean_scope = a.scope_sum / static_cast<double>(a.count);
    s.ln1p_mean_appeal = std::log1p(s.mean_appeal);
    s.ln1p_mean_scope = std::log1p(s.mean_scope);
  }
  s.appeal_ratio_to_bot = kNaN;
  s.scope_ratio_to_bot = kNaN;
  return s;
}

}  // namespace

std::vector<GroupSummary> summarize_groups(std::span<const MetricRecord> records,
                                           std::span<const std::string> period_labels) {
  static const char* kGroups[] = {"BotMisinfo", "HumanMisinfo", "BotInfo", "HumanInfo"};

  std::vector<std::string> scopes = {"overall"};
  scopes.insert(scopes.end(), period_labels.begin(), period_labels.end());

  std::map<std::pair<std::string, std::string>, Accum> table;  // (group, scope)
  for (const char* g : kGroups)
    for (const std::string& s : scopes) table[{g, s}];

  for (const MetricRecord& r : records) {
    std::string g = group_name(r.is_bot, r.is_misinfo);
    for (const std::string& s : {std::string("overall"), r.period}) {
      Accum& a = table[{g, s}];
      ++a.count;
      a.appeal_sum += r.appeal;
      a.scope_sum += r.scope;
    }
  }

  std::vector<GroupSummary> out;
  for (const char* g : kGroups)
    for (const std::string& s : scopes) out.push_back(finish(g, s, table[{g, s}]));

  // Human rows carry the human-over-bot mean ratio within the content class.
  auto find_row = [&](const std::string& g, const std::string& s) -> GroupSummary* {
    for (GroupSummary& row : out)
      if (row.group == g && row.period == s) return &row;
    return nullptr;
  };
  for (const std::string& s : scopes) {
    for (auto [human, bot] : {std::pair{"HumanMisinfo", "BotMisinfo"},
                              std::pair{"HumanInfo", "BotInfo"}}) {
      GroupSummary* h = find_row(human, s);
      GroupSummary* b = find_row(bot, s);
      if (h->count > 0 && b->count > 0 && b->mean_appeal > 0.0)
        h->appeal_ratio_to_bot = h->mean_appeal / b->mean_appeal;
      if (h->count > 0 && b->count > 0 && b->mean_scope > 0.0)
        h->scope_ratio_to_bot = h->mean_scope / b->mean_scope;
    }
  }
  return out;
}

// --- table I/O ---------------------------------------------------------------

void write_metrics_csv(std::span<const MetricRecord> records, std::ostream& out) {
  csv::write_row(out, {"tweet_id", "period", "appeal", "scope", "retweet_count",
                       "total_degree", "degree_pct", "retweet_pct", "is_bot",
                       "is_misinfo", "misinfo_type", "is_retweet", "account_age_days"});
  for (const MetricRecord& r : records) {
    csv::write_row(out, {r.tweet_id, r.period, fmt10(r.appeal), fmt10(r.scope),
                         std::to_string(r.retweet_count), std::to_string(r.total_degree),
                         fmt10(r.degree_percentile), fmt10(r.retweet_percentile),
                         r.is_bot ? "1" : "0", r.is_misinfo ? "1" : "0",
                         r.misinfo_type ? std::string(to_string(*r.misinfo_type)) : "",
                         r.is_retweet ? "1" : "0", std::to_string(r.account_age_days)});
  }
}

std::vector<MetricRecord> read_metrics_csv(std::istream& in) {
  auto rows = csv::read_all(in);
  if (rows.empty()) throw std::runtime_error("metrics.csv: empty");
  std::vector<MetricRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 13)
      throw std::runtime_error("metrics.csv: bad row at line " + std::to_string(i + 1));
    MetricRecord r;
    r.tweet_id = row[0];
    r.period = row[1];
    r.appeal = std::stod(row[2]);
    r.scope = std::stod(row[3]);
    r.retweet_count = std::stoll(row[4]);
    r.total_degree = std::stoll(row[5]);
    r.degree_percentile = std::stod(row[6]);
    r.retweet_percentile = std::stod(row[7]);
    r.is_bot = row[8] == "1";
    r.is_misinfo = row[9] == "1";
    if (!row[10].empty()) r.misinfo_type = misinfo_type_from_string(row[10]);
    r.is_retweet = row[11] == "1";
    r.account_age_days = std::stol(row[12]);
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(std::span<const GroupSummary> rows, std::ostream& out) {
  csv::write_row(out, {"group", "period", "count", "mean_appeal", "mean_scope",
                       "ln1p_mean_appeal", "ln1p_mean_scope", "appeal_ratio_to_bot",
                       "scope_ratio_to_bot"});
  auto cell = [](double v) { return std::isnan(v) ? std::string() : fmt10(v); };
  for (const GroupSummary& s : rows)
    csv::write_row(out, {s.group, s.period, std::to_string(s.count), cell(s.mean_appeal),
                         cell(s.mean_scope), cell(s.ln1p_mean_appeal),
                         cell(s.ln1p_mean_scope), cell(s.appeal_ratio_to_bot),
                         cell(s.scope_ratio_to_bot)});
}

void write_summary_svg(std::span<const GroupSummary> rows, std::ostream& out) {
  static const char* kGroups[] = {"BotMisinfo", "HumanMisinfo", "BotInfo", "HumanInfo"};
  const double width = 680, height = 420;
  const double left = 60, right = 30, top = 40, bottom = 70;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  const GroupSummary* overall[4] = {nullptr, nullptr, nullptr, nullptr};
  for (const GroupSummary& s : rows)
    if (s.period == "overall")
      for (int g = 0; g < 4; ++g)
        if (s.group == kGroups[g]) overall[g] = &s;

  double max_y = 1e-9;
  for (auto* s : overall) {
    if (!s || s->count == 0) continue;
    max_y = std::max({max_y, s->ln1p_mean_appeal, s->ln1p_mean_scope});
  }

  auto f = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width)
      << "\" height=\"" << f(height) << "\" viewBox=\"0 0 " << f(width) << " "
      << f(height) << "\">\n"
      << "  <style>text{font-family:sans-serif;font-size:11px}</style>\n"
      << "  <text x=\"" << f(width / 2)
      << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Average appeal and scope "
         "by group (ln1p scale)</text>\n"
      << "  <line x1=\"" << f(left) << "\" y1=\"" << f(top + plot_h) << "\" x2=\""
      << f(left + plot_w) << "\" y2=\"" << f(top + plot_h)
      << "\" stroke=\"black\"/>\n"
      << "  <line x1=\"" << f(left) << "\" y1=\"" << f(top) << "\" x2=\"" << f(left)
      << "\" y2=\"" << f(top + plot_h) << "\" stroke=\"black\"/>\n";

  const double slot = plot_w / 4.0;
  const double bar_w = slot * 0.28;
  for (int g = 0; g < 4; ++g) {
    const GroupSummary* s = overall[g];
    double cx = left + slot * (g + 0.5);
    struct Bar {
      double value;  // ln1p height
      double raw;    // printed label
      const char* fill;
      double offset;
    };
    double appeal_v = (s && s->count) ? s->ln1p_mean_appeal : 0.0;
    double scope_v = (s && s->count) ? s->ln1p_mean_scope : 0.0;
    double appeal_raw = (s && s->count) ? s->mean_appeal : kNaN;
    double scope_raw = (s && s->count) ? s->mean_scope : kNaN;
    Bar bars[2] = {{appeal_v, appeal_raw, "#4878a8", -bar_w},
                   {scope_v, scope_raw, "#b85c48", 2.0}};
    for (const Bar& bar : bars) {
      double h = max_y > 0 ? bar.value / max_y * plot_h : 0.0;
      if (h < 0 || !std::isfinite(h)) h = 0.0;
      double x = cx + bar.offset;
      double y = top + plot_h - h;
      out << "  <rect x=\"" << f(x) << "\" y=\"" << f(y) << "\" width=\"" << f(bar_w)
          << "\" height=\"" << f(h) << "\" fill=\"" << bar.fill << "\"/>\n";
      std::string label = std::isnan(bar.raw) ? "n/a" : f(bar.raw);
      out << "  <text x=\"" << f(x + bar_w / 2) << "\" y=\"" << f(y - 4)
          << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    out << "  <text x=\"" << f(cx) << "\" y=\"" << f(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << kGroups[g] << "</text>\n";
  }

  out << "  <rect x=\"" << f(left) << "\" y=\"" << f(height - 28)
      << "\" width=\"12\" height=\"12\" fill=\"#4878a8\"/>\n"
      << "  <text x=\"" << f(left + 18) << "\" y=\"" << f(height - 18)
      << "\">mean appeal</text>\n"
      << "  <rect x=\"" << f(left + 120) << "\" y=\"" << f(height - 28)
      << "\" width=\"12\" height=\"12\" fill=\"#b85c48\"/>\n"
      << "  <text x=\"" << f(left + 138) << "\" y=\"" << f(height - 18)
      << "\">mean scope</text>\n"
      << "</svg>\n";
}

}  // namespace appealscope
