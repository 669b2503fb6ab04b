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

#ifndef APPEALSCOPE_CLASSIFY_HPP_
#define APPEALSCOPE_CLASSIFY_HPP_

#include <iosfwd>
#include <span>
#include <unordered_map>

#include "appealscope/corpus.hpp"
#include "appealscope/labels.hpp"

namespace appealscope {

inline constexpr double kDefaultMisinfoThreshold = 0.70;
inline constexpr double kDefaultBotThreshold = 0.70;

// dot(a,b) / (|a||b|), clamped to [-1,1] against rounding. Throws
// std::invalid_argument on dimension mismatch or a zero vector.
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b);

// Compares the embedding against every reference; a maximum similarity of
// at least `threshold` yields a positive label carrying the argmax
// reference's type, similarity and id. Ties on the maximum break toward
// the lexicographically smallest reference_id.
MisinfoLabel label_misinformation(const Eigen::Ref<const Eigen::VectorXd>& embedding,
                                  std::span<const ReferenceTweet> references,
                                  double threshold = kDefaultMisinfoThreshold);

// Strictly above the threshold; a probability of exactly 0.70 is human.
bool label_bot(double bot_probability, double threshold = kDefaultBotThreshold);

// Whole days from account creation to the last date of the period.
// Throws std::invalid_argument when the account postdates the period end.
long account_age_days(UtcDate account_created, UtcDate period_end);

struct CorpusLabels {
  std::unordered_map<std::string, MisinfoLabel> misinfo_by_tweet;  // keyed by tweet_id
  std::unordered_map<std::string, bool> bot_by_user;               // keyed by user_id
  // Tweets lacking both an embedding and a precomputed label; these
  // default to not-misinfo.
  std::size_t unlabeled_tweets = 0;
};

// Labels every tweet and user in the corpus. A precomputed label on the
// tweet overrides embedding classification, so corpora without embeddings
// still run. Per-tweet work is order-independent; `threads` caps the
// worker count.
CorpusLabels label_corpus(const Corpus& corpus,
                          std::span<const ReferenceTweet> references,
                          double misinfo_threshold = kDefaultMisinfoThreshold,
                          double bot_threshold = kDefaultBotThreshold,
                          unsigned threads = 1);

struct ReferenceParseResult {
  std::vector<ReferenceTweet> references;
  std::vector<Diagnostic> diagnostics;
};

// references.jsonl: one object per line with reference_id, type, embedding.
ReferenceParseResult parse_references(std::istream& in);

}  // namespace appealscope

#endif  // APPEALSCOPE_CLASSIFY_HPP_
