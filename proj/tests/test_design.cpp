#include <doctest.h>

#include <cmath>
#include <random>

#include "appealscope/design.hpp"

using namespace appealscope;

namespace {

UtcDate date(int y, unsigned m, unsigned d) {
  return UtcDate{std::chrono::year{y} / m / d};
}

PeriodConfig study_periods() { return default_periods(); }

MetricRecord misinfo_record(bool bot, const std::string& period, MisinfoType type,
                            bool retweet, long age, double appeal_v = 1.0,
                            double scope_v = 1.0) {
  static int counter = 0;
  MetricRecord r;
  r.tweet_id = "t" + std::to_string(counter++);
  r.period = period;
  r.is_bot = bot;
  r.is_misinfo = true;
  r.misinfo_type = type;
  r.is_retweet = retweet;
  r.account_age_days = age;
  r.appeal = appeal_v;
  r.scope = scope_v;
  return r;
}

// One record in every period/type/bot cell so no dummy gets dropped.
std::vector<MetricRecord> full_rank_records() {
  std::vector<MetricRecord> records;
  std::mt19937_64 rng(2);
  const char* periods[] = {"Pre-Vaccine", "Vaccine Launch", "Post-Vaccine"};
  for (int bot = 0; bot < 2; ++bot)
    for (const char* period : periods)
      for (MisinfoType type : kAllMisinfoTypes)
        for (int retweet = 0; retweet < 2; ++retweet)
          records.push_back(misinfo_record(bot, period, type, retweet,
                                           long(30 + rng() % 1000),
                                           double(rng() % 50),
                                           double(rng() % 30)));
  return records;
}

}  // namespace

TEST_CASE("design rows: all-reference record is zero except intercept and age") {
  auto records = std::vector<MetricRecord>{misinfo_record(
      false, "Pre-Vaccine", MisinfoType::conspiracy, false, 365)};
  ModelSpec spec{ModelKind::baseline, DependentVariable::appeal, false};
  // Single record: every non-reference dummy drops, leaving the intercept
  // plus the age column.
  auto design = build_design_matrix(records, spec, study_periods());
  REQUIRE(design.column_names.front() == "intercept");
  CHECK(design.values(0, 0) == 1.0);
  CHECK(design.column_names.back() == "account_age_days");
  CHECK(design.values(0, design.values.cols() - 1) == 365.0);
}

TEST_CASE("design rows: conditional coding of a bot launch-week retweet") {
  auto records = full_rank_records();
  records.push_back(
      misinfo_record(true, "Vaccine Launch", MisinfoType::fake_cure, true, 10));
  ModelSpec spec{ModelKind::conditional, DependentVariable::appeal, false};
  auto design = build_design_matrix(records, spec, study_periods());

  REQUIRE(design.column_names ==
          std::vector<std::string>{"intercept", "bot", "vaccine_launch", "post_vaccine",
                                   "bot_x_vaccine_launch", "bot_x_post_vaccine",
                                   "fake_cure", "fake_treatment",
                                   "false_fact_or_prevention",
                                   "false_public_health_response", "is_retweet",
                                   "account_age_days"});
  Eigen::Index last = design.values.rows() - 1;
  CHECK(design.values(last, 1) == 1.0);   // bot
  CHECK(design.values(last, 2) == 1.0);   // vaccine_launch
  CHECK(design.values(last, 3) == 0.0);   // post_vaccine
  CHECK(design.values(last, 4) == 1.0);   // bot x vaccine_launch
  CHECK(design.values(last, 5) == 0.0);   // bot x post_vaccine
  CHECK(design.values(last, 6) == 1.0);   // fake_cure
  CHECK(design.values(last, 10) == 1.0);  // is_retweet
  CHECK(design.values(last, 11) == 10.0);
}

TEST_CASE("design: baseline has 10 columns, conditional 12") {
  auto records = full_rank_records();
  auto baseline = build_design_matrix(
      records, {ModelKind::baseline, DependentVariable::appeal, false}, study_periods());
  CHECK(baseline.values.cols() == 10);
  CHECK(baseline.warnings.empty());
  auto conditional = build_design_matrix(
      records, {ModelKind::conditional, DependentVariable::scope, false}, study_periods());
  CHECK(conditional.values.cols() == 12);
}

TEST_CASE("design: response column follows the chosen dependent variable") {
  auto records = full_rank_records();
  auto appeal_design = build_design_matrix(
      records, {ModelKind::baseline, DependentVariable::appeal, false}, study_periods());
  auto scope_design = build_design_matrix(
      records, {ModelKind::baseline, DependentVariable::scope, false}, study_periods());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(appeal_design.response[static_cast<Eigen::Index>(i)] == records[i].appeal);
    CHECK(scope_design.response[static_cast<Eigen::Index>(i)] == records[i].scope);
  }
}

TEST_CASE("design: zero-observation category is dropped with a warning") {
  std::vector<MetricRecord> records;
  for (int i = 0; i < 6; ++i)
    records.push_back(misinfo_record(i % 2, "Pre-Vaccine", MisinfoType::conspiracy,
                                     i % 2, 100 + i));
  auto design = build_design_matrix(
      records, {ModelKind::baseline, DependentVariable::appeal, false}, study_periods());
  CHECK(!design.warnings.empty());
  for (const std::string& name : design.column_names) {
    CHECK(name != "vaccine_launch");  // no launch-week records
    CHECK(name != "fake_cure");
  }
}

TEST_CASE("design: a non-misinfo record is rejected") {
  auto records = full_rank_records();
  records.push_back(MetricRecord{});  // is_misinfo = false
  records.back().tweet_id = "bad";
  records.back().period = "Pre-Vaccine";
  CHECK_THROWS_AS(build_design_matrix(records,
                                      {ModelKind::baseline, DependentVariable::appeal, false},
                                      study_periods()),
                  std::invalid_argument);
}

TEST_CASE("design: dummy exclusivity and interaction consistency") {
  auto records = full_rank_records();
  auto design = build_design_matrix(
      records, {ModelKind::conditional, DependentVariable::appeal, false}, study_periods());
  auto col = [&](const std::string& name) -> Eigen::Index {
    for (std::size_t j = 0; j < design.column_names.size(); ++j)
      if (design.column_names[j] == name) return static_cast<Eigen::Index>(j);
    FAIL("missing column ", name);
    return -1;
  };
  Eigen::Index vl = col("vaccine_launch"), pv = col("post_vaccine"), bot = col("bot");
  Eigen::Index bvl = col("bot_x_vaccine_launch"), bpv = col("bot_x_post_vaccine");
  for (Eigen::Index i = 0; i < design.values.rows(); ++i) {
    CHECK(design.values(i, vl) + design.values(i, pv) <= 1.0);
    double type_sum = 0.0;
    for (const char* t : {"fake_cure", "fake_treatment", "false_fact_or_prevention",
                          "false_public_health_response"})
      type_sum += design.values(i, col(t));
    CHECK(type_sum <= 1.0);
    CHECK(design.values(i, bvl) == design.values(i, bot) * design.values(i, vl));
    CHECK(design.values(i, bpv) == design.values(i, bot) * design.values(i, pv));
  }
}

namespace {

// Hand-assembled design for the collinearity checks.
DesignMatrix raw_design(const std::vector<std::string>& names, const Matrix& values) {
  DesignMatrix d;
  d.column_names = names;
  d.values = values;
  d.response = Vector::Zero(values.rows());
  return d;
}

}  // namespace

TEST_CASE("vif: orthogonal zero-mean columns give exactly 1") {
  int n = 8;
  Matrix m(n, 3);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
    m(i, 2) = (i % 4 < 2) ? 1.0 : -1.0;
  }
  auto entries = vif(raw_design({"intercept", "a", "b"}, m));
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].vif == 1.0);
  CHECK(entries[1].vif == 1.0);
  CHECK(entries[0].warning.empty());
}

TEST_CASE("vif: correlation 0.9 gives the closed form 5.263...") {
  int n = 40;
  Matrix m(n, 3);
  double c = std::sqrt(1.0 - 0.81);
  for (int i = 0; i < n; ++i) {
    double a = (i % 2 == 0) ? 1.0 : -1.0;
    double orth = (i % 4 < 2) ? 1.0 : -1.0;
    m(i, 0) = 1.0;
    m(i, 1) = a;
    m(i, 2) = 0.9 * a + c * orth;
  }
  auto entries = vif(raw_design({"intercept", "a", "b"}, m));
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].vif == doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(1e-9));
  CHECK(entries[1].vif == doctest::Approx(5.2631578947).epsilon(1e-9));
}

TEST_CASE("vif: duplicated column flags +infinity") {
  int n = 10;
  Matrix m(n, 3);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = (i % 3 == 0) ? 1.0 : 0.0;
    m(i, 2) = m(i, 1);
  }
  auto entries = vif(raw_design({"intercept", "a", "a_copy"}, m));
  REQUIRE(entries.size() == 2);
  CHECK(std::isinf(entries[0].vif));
  CHECK(std::isinf(entries[1].vif));
  CHECK(!entries[0].warning.empty());
}

TEST_CASE("vif: at least 1, and an orthogonal column leaves others unchanged") {
  std::mt19937_64 rng(12);
  int n = 64;
  Matrix m(n, 3);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = double(rng() % 2);
    m(i, 2) = double(rng() % 3) * 0.5;
  }
  auto base = vif(raw_design({"intercept", "a", "b"}, m));
  for (const auto& e : base) CHECK(e.vif >= 1.0);

  // Append a column orthogonal to everything, including the intercept.
  Matrix wide(n, 4);
  wide.leftCols(3) = m;
  for (int i = 0; i < n; ++i) wide(i, 3) = (i % 2 == 0) ? 1.0 : -1.0;
  // Orthogonalize against the existing columns to machine precision.
  Vector v = wide.col(3);
  Matrix q = m.householderQr().householderQ() * Matrix::Identity(n, 3);
  v -= q * (q.transpose() * v);
  wide.col(3) = v;
  auto extended = vif(raw_design({"intercept", "a", "b", "c"}, wide));
  CHECK(extended[0].vif == doctest::Approx(base[0].vif).epsilon(1e-10));
  CHECK(extended[1].vif == doctest::Approx(base[1].vif).epsilon(1e-10));
}

TEST_CASE("effect_percent: table coefficients reproduce the reported reads") {
  CHECK(effect_percent(-2.42) == doctest::Approx(-91.1078).epsilon(1e-4));
  CHECK(effect_percent(-2.26) == doctest::Approx(-89.5650).epsilon(1e-4));
  CHECK(effect_percent(0.42) == doctest::Approx(52.1964).epsilon(1e-4));
  CHECK(effect_percent(0.0) == 0.0);
}

TEST_CASE("effect_percent: inverse composition collapses to one") {
  for (double a : {0.01, 0.13, 0.42, 1.5, 2.42}) {
    double up = 1.0 + effect_percent(a) / 100.0;
    double down = 1.0 + effect_percent(-a) / 100.0;
    CHECK(up * down == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("standardized account age column replaces raw days") {
  auto records = full_rank_records();
  auto design = build_design_matrix(
      records, {ModelKind::baseline, DependentVariable::appeal, true}, study_periods());
  CHECK(design.column_names.back() == "account_age_std");
  Eigen::Index last = design.values.cols() - 1;
  CHECK(std::abs(design.values.col(last).mean()) < 1e-12);
}

namespace {

Corpus descriptive_corpus() {
  Corpus corpus;
  corpus.periods = default_periods();
  // 7 bot accounts and 20 human accounts, all tweeting in Pre-Vaccine.
  for (int i = 0; i < 27; ++i) {
    std::string id = "u" + std::to_string(i);
    corpus.users[id] = {id, date(2019, 1, 1), i < 7 ? 0.9 : 0.1};
    Tweet t;
    t.tweet_id = "t" + std::to_string(i);
    t.author_id = id;
    t.created_at = UtcSeconds{date(2020, 12, 2)};
    corpus.tweets.push_back(std::move(t));
  }
  return corpus;
}

}  // namespace

TEST_CASE("descriptive_stats: shares and the bot-to-human account ratio") {
  Corpus corpus = descriptive_corpus();
  CorpusLabels labels;
  for (const auto& [id, u] : corpus.users)
    labels.bot_by_user[id] = u.bot_probability > 0.7;
  int mark = 0;
  for (const Tweet& t : corpus.tweets) {
    MisinfoLabel l;
    l.is_misinfo = (mark++ % 4 == 0);  // 7 of 27 misinfo
    if (l.is_misinfo) {
      l.type = MisinfoType::conspiracy;
      l.similarity = 0.9;
      l.matched_reference_id = "r";
    }
    labels.misinfo_by_tweet[t.tweet_id] = l;
  }

  auto rows = descriptive_stats(corpus, labels);
  REQUIRE(rows.size() == 4);  // three periods + overall
  const DescriptiveRow& pre = rows[0];
  CHECK(pre.period == "Pre-Vaccine");
  CHECK(pre.total_tweets == 27);
  CHECK(pre.bot_accounts == 7);
  CHECK(pre.human_accounts == 20);
  CHECK(pre.bot_to_human_ratio == doctest::Approx(0.35));

  const DescriptiveRow& launch = rows[1];
  CHECK(launch.total_tweets == 0);
  CHECK(std::isnan(launch.misinfo_share));  // no division by zero

  const DescriptiveRow& overall = rows.back();
  CHECK(overall.period == "overall");
  CHECK(overall.total_tweets == 27);
}

TEST_CASE("descriptive_stats: four tweets one misinfo gives a quarter share") {
  Corpus corpus;
  corpus.periods = default_periods();
  corpus.users["u"] = {"u", date(2019, 1, 1), 0.0};
  CorpusLabels labels;
  labels.bot_by_user["u"] = false;
  for (int i = 0; i < 4; ++i) {
    Tweet t;
    t.tweet_id = "t" + std::to_string(i);
    t.author_id = "u";
    t.created_at = UtcSeconds{date(2020, 12, 2)};
    corpus.tweets.push_back(t);
    MisinfoLabel l;
    l.is_misinfo = i == 0;
    if (l.is_misinfo) {
      l.type = MisinfoType::fake_cure;
      l.similarity = 0.8;
      l.matched_reference_id = "r";
    }
    labels.misinfo_by_tweet["t" + std::to_string(i)] = l;
  }
  auto rows = descriptive_stats(corpus, labels);
  CHECK(rows[0].misinfo_share == doctest::Approx(0.25));
}

TEST_CASE("slugify maps labels to identifiers") {
  CHECK(slugify("Pre-Vaccine") == "pre_vaccine");
  CHECK(slugify("Vaccine Launch") == "vaccine_launch");
  CHECK(slugify("  odd -- label ") == "odd_label");
}
