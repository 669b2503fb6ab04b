#include <doctest.h>

#include <random>
#include <sstream>

#include "appealscope/corpus.hpp"

using namespace appealscope;

namespace {

UtcDate date(int y, unsigned m, unsigned d) {
  return UtcDate{std::chrono::year{y} / m / d};
}

UtcSeconds ts(const char* text) {
  auto t = parse_utc_timestamp(text);
  REQUIRE(t);
  return *t;
}

}  // namespace

TEST_CASE("timestamp parsing round-trips and rejects junk") {
  CHECK(format_utc_timestamp(ts("2020-12-09T13:00:00Z")) == "2020-12-09T13:00:00Z");
  CHECK(parse_utc_timestamp("2020-12-09T13:00:00.123Z"));  // fraction truncated
  CHECK(parse_utc_timestamp("2020-12-09T13:00:00+00:00"));
  CHECK(!parse_utc_timestamp("2020-12-09 13:00:00Z"));
  CHECK(!parse_utc_timestamp("2020-13-09T13:00:00Z"));
  CHECK(!parse_utc_timestamp("2020-02-30T13:00:00Z"));
  CHECK(!parse_utc_timestamp("2020-12-09T24:00:00Z"));
  CHECK(!parse_utc_date("2021-2-3"));
  CHECK(format_utc_date(date(2021, 2, 3)) == "2021-02-03");
}

TEST_CASE("parse_tweets: empty stream yields empty sequence") {
  std::istringstream in("");
  auto result = parse_tweets(in);
  CHECK(result.tweets.empty());
  CHECK(result.diagnostics.empty());
}

TEST_CASE("parse_tweets: minimal valid record") {
  std::istringstream in(
      R"({"id":"t1","author_id":"u1","created_at":"2020-12-02T10:00:00Z",)"
      R"("is_retweet":false,"mentions":[],"retweet_count":3})"
      "\n");
  auto result = parse_tweets(in);
  REQUIRE(result.tweets.size() == 1);
  CHECK(result.diagnostics.empty());
  const Tweet& t = result.tweets[0];
  CHECK(t.tweet_id == "t1");
  CHECK(t.author_id == "u1");
  CHECK(!t.is_retweet);
  CHECK(!t.retweeted_author_id);
  CHECK(t.retweet_count == 3);
  CHECK(!t.embedding);
  CHECK(!t.misinfo);
}

TEST_CASE("parse_tweets: retweet without source is skipped with a diagnostic") {
  std::istringstream in(
      R"({"id":"t1","author_id":"u1","created_at":"2020-12-02T10:00:00Z",)"
      R"("is_retweet":true,"mentions":[],"retweet_count":0})"
      "\n");
  auto result = parse_tweets(in);
  CHECK(result.tweets.empty());
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].line == 1);
  CHECK(result.diagnostics[0].message.find("retweet missing source") != std::string::npos);
}

TEST_CASE("parse_tweets: malformed line keeps parsing") {
  std::istringstream in(
      "this is not json\n"
      R"({"id":"t2","author_id":"u1","created_at":"2020-12-02T10:00:00Z",)"
      R"("is_retweet":false,"mentions":[],"retweet_count":0})"
      "\n");
  auto result = parse_tweets(in);
  CHECK(result.tweets.size() == 1);
  CHECK(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].line == 1);
}

TEST_CASE("parse_users: header-only file yields empty mapping") {
  std::istringstream in("user_id,created_at,bot_probability\n");
  auto result = parse_users(in);
  CHECK(result.users.empty());
  CHECK(result.diagnostics.empty());
}

TEST_CASE("parse_users: plain row maps fields directly") {
  std::istringstream in("user_id,created_at,bot_probability\nu1,2019-05-01,0.85\n");
  auto result = parse_users(in);
  REQUIRE(result.users.contains("u1"));
  CHECK(result.users.at("u1").bot_probability == doctest::Approx(0.85));
  CHECK(result.users.at("u1").created_at == date(2019, 5, 1));
}

TEST_CASE("parse_users: duplicate id is fatal and names the id") {
  std::istringstream in(
      "user_id,created_at,bot_probability\nu1,2019-05-01,0.85\nu1,2019-06-01,0.2\n");
  CHECK_THROWS_WITH_AS(parse_users(in), doctest::Contains("u1"), std::runtime_error);
}

TEST_CASE("parse_users: out-of-range probability becomes a diagnostic") {
  std::istringstream in("user_id,created_at,bot_probability\nu1,2019-05-01,1.5\n");
  auto result = parse_users(in);
  CHECK(result.users.empty());
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].message.find("[0,1]") != std::string::npos);
}

TEST_CASE("assign_period: stated examples") {
  PeriodConfig cfg = default_periods();
  CHECK(assign_period(ts("2020-12-09T13:00:00Z"), cfg) == "Vaccine Launch");
  CHECK(!assign_period(ts("2020-12-25T00:00:00Z"), cfg));
  // inclusive boundaries at both ends of a period
  CHECK(assign_period(ts("2020-12-08T00:00:00Z"), cfg) == "Vaccine Launch");
  CHECK(assign_period(ts("2020-12-10T23:59:59Z"), cfg) == "Vaccine Launch");
}

TEST_CASE("period config validation") {
  CHECK_THROWS_AS(PeriodConfig::from_periods({}), std::invalid_argument);
  CHECK_THROWS_AS(PeriodConfig::from_periods(
                      {{"a", date(2020, 1, 5), date(2020, 1, 1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PeriodConfig::from_periods(
                      {{"a", date(2020, 1, 1), date(2020, 1, 10)},
                       {"b", date(2020, 1, 10), date(2020, 1, 20)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PeriodConfig::from_periods(
                      {{"a", date(2020, 1, 1), date(2020, 1, 2)},
                       {"a", date(2020, 2, 1), date(2020, 2, 2)}}),
                  std::invalid_argument);
}

TEST_CASE("assign_period matches at most one period on random configs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    // Build random non-overlapping periods by slicing a date line.
    std::vector<Period> periods;
    UtcDate cursor = date(2020, 1, 1);
    int count = 1 + int(rng() % 4);
    for (int i = 0; i < count; ++i) {
      cursor += std::chrono::days{1 + long(rng() % 10)};  // gap
      UtcDate start = cursor;
      cursor += std::chrono::days{long(rng() % 10)};
      periods.push_back({"p" + std::to_string(i), start, cursor});
      cursor += std::chrono::days{1};
    }
    PeriodConfig cfg = PeriodConfig::from_periods(periods);
    for (int probe = 0; probe < 50; ++probe) {
      UtcSeconds t = UtcSeconds{date(2020, 1, 1)} +
                     std::chrono::seconds{long(rng() % (200LL * 86400))};
      UtcDate d = date_of(t);
      int contained = 0;
      for (const Period& p : periods)
        if (p.start <= d && d <= p.end) ++contained;
      auto label = assign_period(t, cfg);
      CHECK(contained <= 1);
      CHECK(label.has_value() == (contained == 1));
    }
  }
}

namespace {

Corpus tiny_corpus() {
  Corpus corpus;
  corpus.periods = default_periods();
  UserProfile u1{"u1", date(2019, 5, 1), 0.2};
  UserProfile u2{"u2", date(2018, 3, 9), 0.9};
  corpus.users = {{"u1", u1}, {"u2", u2}};
  Tweet t1;
  t1.tweet_id = "t1";
  t1.author_id = "u1";
  t1.created_at = ts("2020-12-02T10:00:00Z");
  Tweet t2;
  t2.tweet_id = "t2";
  t2.author_id = "u2";
  t2.created_at = ts("2020-12-09T11:30:00Z");
  t2.is_retweet = true;
  t2.retweeted_author_id = "u1";
  t2.retweet_count = 5;
  corpus.tweets = {t1, t2};
  return corpus;
}

}  // namespace

TEST_CASE("validate_corpus: clean corpus has zero findings") {
  CHECK(validate_corpus(tiny_corpus()).findings.empty());
}

TEST_CASE("validate_corpus: unknown author is fatal and named") {
  Corpus corpus = tiny_corpus();
  corpus.tweets[0].author_id = "ghost";
  auto report = validate_corpus(corpus);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].severity == Severity::fatal);
  CHECK(report.findings[0].message.find("ghost") != std::string::npos);
  CHECK(!report.accepted());
}

TEST_CASE("validate_corpus: out-of-window tweet is a warning") {
  Corpus corpus = tiny_corpus();
  corpus.tweets[0].created_at = ts("2020-11-01T00:00:00Z");
  auto report = validate_corpus(corpus);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].severity == Severity::warning);
  CHECK(report.findings[0].code == "out_of_window");
  CHECK(report.accepted());
}

TEST_CASE("validate_corpus: account created after its period end is fatal") {
  Corpus corpus = tiny_corpus();
  corpus.users.at("u1").created_at = date(2021, 3, 1);  // after every window
  auto report = validate_corpus(corpus);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].code == "impossible_account");
  CHECK(report.findings[0].severity == Severity::fatal);
  CHECK(report.findings[0].message.find("u1") != std::string::npos);
}

TEST_CASE("parse_tweets: fixed embedding dimension option") {
  std::istringstream in(
      R"({"id":"t1","author_id":"u1","created_at":"2020-12-02T10:00:00Z",)"
      R"("is_retweet":false,"mentions":[],"retweet_count":0,"embedding":[1,2,3]})"
      "\n");
  TweetParseOptions options;
  options.embedding_dim = 4;
  auto result = parse_tweets(in, options);
  CHECK(result.tweets.empty());
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].message.find("dimension") != std::string::npos);
}

TEST_CASE("validate_corpus: embedding dimension mismatch is fatal") {
  Corpus corpus = tiny_corpus();
  corpus.tweets[0].embedding = Eigen::VectorXd::Ones(4);
  corpus.tweets[1].embedding = Eigen::VectorXd::Ones(5);
  auto report = validate_corpus(corpus);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].code == "embedding_dim_mismatch");
}

TEST_CASE("validation is deterministic over identical corpora") {
  Corpus corpus = tiny_corpus();
  corpus.tweets[0].author_id = "ghost";
  corpus.tweets[1].created_at = ts("2021-06-01T00:00:00Z");
  CHECK(validate_corpus(corpus).to_text() == validate_corpus(corpus).to_text());
}

TEST_CASE("tweet serialization round-trips exactly") {
  std::mt19937_64 rng(42);
  auto random_id = [&](const char* prefix) {
    return std::string(prefix) + std::to_string(rng() % 100000);
  };
  std::vector<Tweet> tweets;
  for (int i = 0; i < 200; ++i) {
    Tweet t;
    t.tweet_id = "t" + std::to_string(i);
    t.author_id = random_id("u");
    t.created_at = UtcSeconds{UtcDate{std::chrono::year{2020} / 12 / 1}} +
                   std::chrono::seconds{long(rng() % (40LL * 86400))};
    t.is_retweet = rng() % 2 == 0;
    if (t.is_retweet) t.retweeted_author_id = random_id("u");
    int mentions = int(rng() % 4);
    for (int m = 0; m < mentions; ++m) t.mentioned_author_ids.push_back(random_id("u"));
    t.retweet_count = long(rng() % 1000);
    if (rng() % 2 == 0) {
      Eigen::VectorXd e(8);
      for (int j = 0; j < 8; ++j)
        e[j] = std::uniform_real_distribution<double>(-1, 1)(rng);
      t.embedding = e;
    }
    if (rng() % 3 == 0) {
      MisinfoLabel label;
      label.is_misinfo = true;
      label.type = kAllMisinfoTypes[rng() % kAllMisinfoTypes.size()];
      label.similarity = std::uniform_real_distribution<double>(0.7, 1.0)(rng);
      label.matched_reference_id = random_id("r");
      t.misinfo = label;
    }
    tweets.push_back(std::move(t));
  }

  std::ostringstream out;
  serialize_tweets(tweets, out);
  std::istringstream in(out.str());
  auto result = parse_tweets(in);
  CHECK(result.diagnostics.empty());
  REQUIRE(result.tweets.size() == tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) CHECK(result.tweets[i] == tweets[i]);

  // And a second serialization is byte-identical.
  std::ostringstream again;
  serialize_tweets(result.tweets, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("user serialization round-trips") {
  std::unordered_map<std::string, UserProfile> users;
  users["u2"] = {"u2", date(2018, 3, 9), 0.925};
  users["u1"] = {"u1", date(2019, 5, 1), 0.125};
  users["u,weird\"id"] = {"u,weird\"id", date(2020, 1, 2), 0.5};
  std::ostringstream out;
  serialize_users(users, out);
  std::istringstream in(out.str());
  auto result = parse_users(in);
  CHECK(result.diagnostics.empty());
  REQUIRE(result.users.size() == 3);
  CHECK(result.users.at("u,weird\"id").bot_probability == 0.5);
  CHECK(result.users.at("u2").created_at == date(2018, 3, 9));
}
