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

#include "appealscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "appealscope/design.hpp"

namespace appealscope {

long long Rng::uniform_int(long long lo, long long hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<long long>(next_u64());  // full 64-bit span
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<long long>(draw % range);
}

double Rng::normal() {
  double u1 = 1.0 - uniform01();  // (0,1]
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    double boost = std::pow(1.0 - uniform01(), 1.0 / shape);
    return gamma(shape + 1.0, scale) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

long long Rng::poisson(double lambda) {
  if (lambda < 0.0) throw std::domain_error("poisson: negative mean");
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) {
    // multiplication method
    double limit = std::exp(-lambda);
    long long k = 0;
    double product = uniform01();
    while (product > limit) {
      ++k;
      product *= uniform01();
    }
    return k;
  }
  // PTRD transformed rejection (Hoermann 1993).
  const double smu = std::sqrt(lambda);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform01() - 0.5;
    double v = uniform01();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (v <= 0.0) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * std::log(lambda) - lambda - std::lgamma(k + 1.0))
      return static_cast<long long>(k);
  }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  auto mix = [](std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  std::uint64_t state = seed;
  state = mix(state) ^ domain;
  state = mix(state) ^ index;
  return mix(state);
}

double sample_tweedie(double mu, double p, double phi, Rng& rng) {
  if (!(mu > 0.0)) throw std::domain_error("sample_tweedie: mu must be positive");
  if (!(p > 1.0 && p < 2.0)) throw std::domain_error("sample_tweedie: power outside (1,2)");
  if (!(phi > 0.0)) throw std::domain_error("sample_tweedie: phi must be positive");

  const double lambda = std::pow(mu, 2.0 - p) / ((2.0 - p) * phi);
  const double shape = (2.0 - p) / (p - 1.0);
  const double scale = phi * (p - 1.0) * std::pow(mu, p - 1.0);

  long long count = rng.poisson(lambda);
  double total = 0.0;
  for (long long i = 0; i < count; ++i) total += rng.gamma(shape, scale);
  return total;
}

GlmProblem sample_glm_problem(Eigen::Index n, const Vector& planted_beta, double p,
                              double phi, std::uint64_t seed,
                              Eigen::Index continuous_columns) {
  const Eigen::Index k = planted_beta.size();
  if (k < 1) throw std::invalid_argument("sample_glm_problem: empty coefficient vector");
  if (continuous_columns >= k)
    throw std::invalid_argument("sample_glm_problem: too many continuous columns");

  GlmProblem problem;
  problem.planted = planted_beta;
  problem.X.resize(n, k);
  problem.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng(stream_seed(seed, 0xD1, static_cast<std::uint64_t>(i)));
    problem.X(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) {
      bool continuous = j >= k - continuous_columns;
      problem.X(i, j) = continuous ? rng.uniform(0.0, 2.0)
                                   : (rng.uniform01() < 0.4 ? 1.0 : 0.0);
    }
    double mu = std::exp(problem.X.row(i).dot(planted_beta));
    problem.y[i] = sample_tweedie(mu, p, phi, rng);
  }
  return problem;
}

// --- corpus generation ---------------------------------------------------------

namespace {

std::string padded_id(char prefix, int value, int width) {
  char buf[32];
  if (width > 16) width = 16;
  std::snprintf(buf, sizeof buf, "%c%0*d", prefix, width, value);
  return buf;
}

int digits_for(int n) {
  int width = 1;
  while (n >= 10) {
    n /= 10;
    ++width;
  }
  return width;
}

// Conditional-model column set; generation draws from the widest design
// this corpus can feed.
std::vector<std::string> generation_columns(const PeriodConfig& periods) {
  std::vector<std::string> cols = {"intercept", "bot"};
  const auto& list = periods.periods();
  for (std::size_t i = 1; i < list.size(); ++i) cols.push_back(slugify(list[i].label));
  for (std::size_t i = 1; i < list.size(); ++i)
    cols.push_back("bot_x_" + slugify(list[i].label));
  for (std::size_t t = 1; t < kAllMisinfoTypes.size(); ++t)
    cols.push_back(std::string(to_string(kAllMisinfoTypes[t])));
  cols.push_back("is_retweet");
  cols.push_back("account_age_days");
  return cols;
}

}  // namespace

SynthOutput generate_corpus(const SynthConfig& config) {
  SynthConfig cfg = config;
  if (cfg.periods.size() == 0) cfg.periods = default_periods();
  const auto& periods = cfg.periods.periods();
  const std::size_t n_periods = periods.size();

  if (cfg.period_mix.empty())
    cfg.period_mix.assign(n_periods, 1.0 / static_cast<double>(n_periods));
  if (cfg.period_mix.size() != n_periods)
    throw std::invalid_argument("synth: period_mix size does not match period count");
  double mix_sum = std::accumulate(cfg.period_mix.begin(), cfg.period_mix.end(), 0.0);
  if (std::abs(mix_sum - 1.0) > 1e-9)
    throw std::invalid_argument("synth: period_mix must sum to 1");
  for (double m : cfg.period_mix)
    if (m < 0.0) throw std::invalid_argument("synth: negative period proportion");

  if (cfg.n_users < 2) throw std::invalid_argument("synth: need at least 2 users");
  if (cfg.bot_fraction < 0.0 || cfg.bot_fraction > 1.0 || cfg.misinfo_fraction < 0.0 ||
      cfg.misinfo_fraction > 1.0)
    throw std::invalid_argument("synth: fractions must lie in [0,1]");
  if (!(cfg.power > 1.0 && cfg.power < 2.0))
    throw std::invalid_argument("synth: power outside (1,2)");
  if (!(cfg.dispersion > 0.0)) throw std::invalid_argument("synth: dispersion must be positive");
  if (cfg.emit_embeddings && cfg.embedding_dim < 8)
    throw std::invalid_argument("synth: embedding_dim must be at least 8");

  std::vector<std::string> columns = generation_columns(cfg.periods);
  if (cfg.n_tweets < static_cast<int>(columns.size()) * 50)
    throw std::invalid_argument("synth: n_tweets must be at least 50 per design column (" +
                                std::to_string(columns.size() * 50) + ")");
  for (const auto& [name, value] : cfg.planted) {
    if (std::find(columns.begin(), columns.end(), name) == columns.end())
      throw std::invalid_argument("synth: planted coefficient for unknown column '" + name + "'");
    bool is_type_column =
        std::any_of(kAllMisinfoTypes.begin() + 1, kAllMisinfoTypes.end(),
                    [&](MisinfoType t) { return to_string(t) == name; });
    if (is_type_column && value != 0.0 && cfg.misinfo_fraction == 0.0)
      throw std::invalid_argument(
          "synth: content-category effect planted but misinfo_fraction is 0");
  }
  auto coefficient = [&](const std::string& name) {
    auto it = cfg.planted.find(name);
    return it == cfg.planted.end() ? 0.0 : it->second;
  };

  SynthOutput out;
  out.corpus.periods = cfg.periods;
  out.truth.seed = cfg.seed;
  out.truth.power = cfg.power;
  out.truth.dispersion = cfg.dispersion;
  out.truth.planted = cfg.planted;

  // Users. Bot probabilities straddle the 0.70 decision threshold.
  const int user_width = std::max(4, digits_for(cfg.n_users));
  std::vector<std::string> user_ids(static_cast<std::size_t>(cfg.n_users));
  std::vector<bool> user_is_bot(static_cast<std::size_t>(cfg.n_users));
  UtcDate first_start = periods.front().start;
  for (int u = 0; u < cfg.n_users; ++u) {
    Rng rng(stream_seed(cfg.seed, 0xA0, static_cast<std::uint64_t>(u)));
    UserProfile profile;
    profile.user_id = padded_id('u', u + 1, user_width);
    bool bot = rng.uniform01() < cfg.bot_fraction;
    profile.bot_probability = bot ? rng.uniform(0.705, 0.995) : rng.uniform(0.005, 0.695);
    profile.created_at = first_start - std::chrono::days{rng.uniform_int(30, 1800)};
    user_ids[static_cast<std::size_t>(u)] = profile.user_id;
    user_is_bot[static_cast<std::size_t>(u)] = bot;
    out.corpus.users.emplace(profile.user_id, std::move(profile));
  }

  // Interaction target weights: bots draw less inbound attention.
  std::vector<double> cumulative(static_cast<std::size_t>(cfg.n_users));
  double weight_total = 0.0;
  for (int u = 0; u < cfg.n_users; ++u) {
    weight_total += user_is_bot[static_cast<std::size_t>(u)] ? cfg.bot_visibility : 1.0;
    cumulative[static_cast<std::size_t>(u)] = weight_total;
  }
  auto pick_target = [&](Rng& rng) {
    double r = rng.uniform01() * weight_total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= user_ids.size()) idx = user_ids.size() - 1;
    return static_cast<int>(idx);
  };

  // References: one exemplar per category on an orthonormal basis.
  const int dim = cfg.embedding_dim;
  for (std::size_t t = 0; t < kAllMisinfoTypes.size(); ++t) {
    ReferenceTweet ref;
    ref.reference_id = "ref_" + std::string(to_string(kAllMisinfoTypes[t]));
    ref.type = kAllMisinfoTypes[t];
    ref.embedding = Eigen::VectorXd::Zero(dim);
    ref.embedding[static_cast<Eigen::Index>(t)] = 1.0;
    out.references.push_back(std::move(ref));
  }

  const int tweet_width = std::max(6, digits_for(cfg.n_tweets));
  out.corpus.tweets.reserve(static_cast<std::size_t>(cfg.n_tweets));
  for (int i = 0; i < cfg.n_tweets; ++i) {
    Rng rng(stream_seed(cfg.seed, 0xB0, static_cast<std::uint64_t>(i)));
    Tweet t;
    t.tweet_id = padded_id('t', i + 1, tweet_width);

    // Period from the configured mix.
    double r = rng.uniform01();
    std::size_t pi = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_periods; ++j) {
      acc += cfg.period_mix[j];
      if (r < acc || j + 1 == n_periods) {
        pi = j;
        break;
      }
    }
    const Period& period = periods[pi];
    long long span_days = days_between(period.start, period.end) + 1;
    long long offset = rng.uniform_int(0, span_days * 86400 - 1);
    t.created_at = UtcSeconds{period.start} + std::chrono::seconds{offset};

    int author = static_cast<int>(rng.uniform_int(0, cfg.n_users - 1));
    t.author_id = user_ids[static_cast<std::size_t>(author)];
    bool author_bot = user_is_bot[static_cast<std::size_t>(author)];

    t.is_retweet = rng.uniform01() < cfg.retweet_probability;
    if (t.is_retweet) {
      int target = pick_target(rng);
      while (target == author) target = pick_target(rng);
      t.retweeted_author_id = user_ids[static_cast<std::size_t>(target)];
    }
    double rate = cfg.mention_rate * (author_bot ? cfg.bot_activity : 1.0);
    long long mention_count = rate > 0.0 ? rng.poisson(rate) : 0;
    for (long long m = 0; m < mention_count; ++m)
      t.mentioned_author_ids.push_back(user_ids[static_cast<std::size_t>(pick_target(rng))]);

    bool misinfo = rng.uniform01() < cfg.misinfo_fraction;
    std::size_t type_index =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(
                                                        kAllMisinfoTypes.size() - 1)));
    MisinfoType type = kAllMisinfoTypes[type_index];

    if (cfg.emit_embeddings) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      Eigen::Index off_axis = 5 + static_cast<Eigen::Index>(i % (dim - 5));
      if (misinfo) {
        e[static_cast<Eigen::Index>(type_index)] = 1.0;
        e[off_axis] = 0.3;  // cosine vs the matching reference: 1/sqrt(1.09)
      } else {
        e[off_axis] = 1.0;
        e[static_cast<Eigen::Index>(type_index)] = 0.3;  // max cosine well below 0.7
      }
      t.embedding = std::move(e);
    }
    if (misinfo) {
      MisinfoLabel label;
      label.is_misinfo = true;
      label.type = type;
      label.similarity = t.embedding
                             ? cosine_similarity(*t.embedding,
                                                 out.references[type_index].embedding)
                             : 1.0 / std::sqrt(1.09);
      label.matched_reference_id = out.references[type_index].reference_id;
      t.misinfo = std::move(label);
    }

    // Engagement from the planted model at the widest design row.
    const UserProfile& author_profile = out.corpus.users.at(t.author_id);
    long age = days_between(author_profile.created_at, period.end);
    double eta = coefficient("intercept") + (author_bot ? coefficient("bot") : 0.0);
    if (pi > 0) {
      std::string slug = slugify(period.label);
      eta += coefficient(slug);
      if (author_bot) eta += coefficient("bot_x_" + slug);
    }
    if (misinfo && type != kAllMisinfoTypes[0])
      eta += coefficient(std::string(to_string(type)));
    if (t.is_retweet) eta += coefficient("is_retweet");
    eta += coefficient("account_age_days") * static_cast<double>(age);

    double dv = sample_tweedie(std::exp(eta), cfg.power, cfg.dispersion, rng);
    t.retweet_count = std::llround(dv);
    out.truth.dv_by_tweet.emplace(t.tweet_id, dv);

    out.corpus.tweets.push_back(std::move(t));
  }
  return out;
}

void serialize_references(std::span<const ReferenceTweet> references, std::ostream& out) {
  for (const ReferenceTweet& ref : references) {
    nlohmann::json j;
    j["reference_id"] = ref.reference_id;
    j["type"] = std::string(to_string(ref.type));
    j["embedding"] = std::vector<double>(ref.embedding.data(),
                                         ref.embedding.data() + ref.embedding.size());
    out << j.dump() << '\n';
  }
}

void write_corpus_files(const SynthOutput& output, const std::filesystem::path& tweets_path,
                        const std::filesystem::path& users_path,
                        const std::filesystem::path& references_path,
                        const std::filesystem::path& truth_path) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(tweets_path);
    serialize_tweets(output.corpus.tweets, f);
  }
  {
    auto f = open(users_path);
    serialize_users(output.corpus.users, f);
  }
  {
    auto f = open(references_path);
    serialize_references(output.references, f);
  }
  {
    nlohmann::json j;
    j["seed"] = output.truth.seed;
    j["power"] = output.truth.power;
    j["dispersion"] = output.truth.dispersion;
    j["planted"] = output.truth.planted;
    j["dv"] = output.truth.dv_by_tweet;
    auto f = open(truth_path);
    f << j.dump(2) << '\n';
  }
}

}  // namespace appealscope
