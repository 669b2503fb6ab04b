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

#ifndef APPEALSCOPE_SYNTH_HPP_
#define APPEALSCOPE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "appealscope/classify.hpp"
#include "appealscope/corpus.hpp"
#include "appealscope/tweedie.hpp"

namespace appealscope {

// Seedable generator with fully specified draw algorithms, so the same
// seed yields the same bytes on every platform. The standard library's
// distribution objects are deliberately not used: their algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive bounds, rejection-sampled to avoid modulo bias.
  long long uniform_int(long long lo, long long hi);

  // Box-Muller; two uniforms per draw, no cached spare.
  double normal();

  // Marsaglia-Tsang squeeze, with the shape<1 boost.
  double gamma(double shape, double scale);

  // Inversion below lambda = 30, transformed rejection (PTRD) above.
  long long poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

// Stream-splitting rule: every (seed, domain, index) triple maps to an
// independent generator through a SplitMix64 chain, so corpora are
// reproducible regardless of scheduling or thread count.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t domain, std::uint64_t index);

// Exact compound draw for the variance-power family on (1,2):
//   N ~ Poisson(mu^(2-p) / ((2-p) phi)), then the sum of N Gamma variates
//   with shape (2-p)/(p-1) and scale phi (p-1) mu^(p-1); exactly 0 when
//   N = 0. Throws std::domain_error outside mu > 0, 1 < p < 2, phi > 0.
double sample_tweedie(double mu, double p, double phi, Rng& rng);

// Regression problem with known truth, used to validate the fitter:
// intercept column, then Bernoulli(0.4) dummies, with the final
// `continuous_columns` replaced by uniform(0,2) draws. The response is
// sampled from the family at mu = exp(X beta).
struct GlmProblem {
  Matrix X;
  Vector y;
  Vector planted;
};

GlmProblem sample_glm_problem(Eigen::Index n, const Vector& planted_beta, double p,
                              double phi, std::uint64_t seed,
                              Eigen::Index continuous_columns = 0);

// --- full corpus generation ----------------------------------------------------

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_users = 200;
  int n_tweets = 2000;
  double bot_fraction = 0.3;
  double misinfo_fraction = 0.5;
  double retweet_probability = 0.35;
  double mention_rate = 1.2;      // Poisson mean mentions per tweet
  double bot_activity = 0.6;      // outbound rate multiplier for bot authors
  double bot_visibility = 0.35;   // inbound target weight for bot users
  std::vector<double> period_mix;  // one proportion per period, sums to 1
  PeriodConfig periods;            // defaults to the bundled windows when empty
  std::map<std::string, double> planted;  // design column -> log-scale coefficient
  double dispersion = 1.0;
  double power = 1.5;
  int embedding_dim = 8;
  bool emit_embeddings = true;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  double power = 1.5;
  double dispersion = 1.0;
  std::map<std::string, double> planted;
  std::map<std::string, double> dv_by_tweet;  // continuous draw behind retweet_count
};

struct SynthOutput {
  Corpus corpus;
  std::vector<ReferenceTweet> references;
  GroundTruth truth;
};

// Builds users whose bot probabilities straddle the 0.70 threshold,
// tweets with retweet/mention structure, embeddings aligned with their
// content labels, and engagement counts rounded from exact draws at
// mu = exp(design row . planted). Misinformation tweets carry precomputed
// labels; regular tweets classify through their embeddings. Throws
// std::invalid_argument on an infeasible configuration.
SynthOutput generate_corpus(const SynthConfig& config);

// Emits tweets.jsonl, users.csv, references.jsonl and truth.json.
void write_corpus_files(const SynthOutput& output, const std::filesystem::path& tweets_path,
                        const std::filesystem::path& users_path,
                        const std::filesystem::path& references_path,
                        const std::filesystem::path& truth_path);

void serialize_references(std::span<const ReferenceTweet> references, std::ostream& out);

}  // namespace appealscope

#endif  // APPEALSCOPE_SYNTH_HPP_
