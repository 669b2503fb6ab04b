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

#include "appealscope/classify.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <stdexcept>

#include <json.hpp>

#include "appealscope/parallel.hpp"

namespace appealscope {

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  if (a.size() == 0) throw std::invalid_argument("cosine_similarity: empty vectors");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cosine_similarity: zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

MisinfoLabel label_misinformation(const Eigen::Ref<const Eigen::VectorXd>& embedding,
                                  std::span<const ReferenceTweet> references,
                                  double threshold) {
  if (references.empty())
    throw std::invalid_argument("label_misinformation: no references");

  const ReferenceTweet* best = nullptr;
  double best_sim = 0.0;
  for (const ReferenceTweet& ref : references) {
    double sim = cosine_similarity(embedding, ref.embedding);
    if (!best || sim > best_sim ||
        (sim == best_sim && ref.reference_id < best->reference_id)) {
      best = &ref;
      best_sim = sim;
    }
  }

  MisinfoLabel label;
  if (best_sim >= threshold) {
    label.is_misinfo = true;
    label.type = best->type;
    label.similarity = best_sim;
    label.matched_reference_id = best->reference_id;
  }
  return label;
}

bool label_bot(double bot_probability, double threshold) {
  if (bot_probability < 0.0 || bot_probability > 1.0)
    throw std::invalid_argument("label_bot: probability outside [0,1]");
  return bot_probability > threshold;
}

long account_age_days(UtcDate account_created, UtcDate period_end) {
  if (account_created > period_end)
    throw std::invalid_argument("account created after period end (" +
                                format_utc_date(account_created) + " > " +
                                format_utc_date(period_end) + ")");
  return days_between(account_created, period_end);
}

CorpusLabels label_corpus(const Corpus& corpus,
                          std::span<const ReferenceTweet> references,
                          double misinfo_threshold, double bot_threshold,
                          unsigned threads) {
  CorpusLabels labels;

  for (const auto& [id, user] : corpus.users)
    labels.bot_by_user.emplace(id, label_bot(user.bot_probability, bot_threshold));

  std::vector<MisinfoLabel> per_tweet(corpus.tweets.size());
  std::atomic<std::size_t> unlabeled{0};
  parallel_for_chunks(corpus.tweets.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Tweet& t = corpus.tweets[i];
      if (t.misinfo) {
        per_tweet[i] = *t.misinfo;  // precomputed label wins
      } else if (t.embedding && !references.empty()) {
        per_tweet[i] = label_misinformation(*t.embedding, references, misinfo_threshold);
      } else {
        unlabeled.fetch_add(1, std::memory_order_relaxed);
      }
    }
  });
  labels.unlabeled_tweets = unlabeled.load();

  labels.misinfo_by_tweet.reserve(corpus.tweets.size());
  for (std::size_t i = 0; i < corpus.tweets.size(); ++i)
    labels.misinfo_by_tweet.emplace(corpus.tweets[i].tweet_id, std::move(per_tweet[i]));
  return labels;
}

ReferenceParseResult parse_references(std::istream& in) {
  if (!in) throw std::runtime_error("reference stream unreadable");
  ReferenceParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ReferenceTweet ref;
      ref.reference_id = j.at("reference_id").get<std::string>();
      auto type = misinfo_type_from_string(j.at("type").get<std::string>());
      if (!type) throw std::runtime_error("unknown misinfo type");
      ref.type = *type;
      auto values = j.at("embedding").get<std::vector<double>>();
      ref.embedding = Eigen::Map<const Eigen::VectorXd>(
          values.data(), static_cast<Eigen::Index>(values.size()));
      if (ref.embedding.size() == 0 || ref.embedding.norm() == 0.0)
        throw std::runtime_error("zero reference embedding");
      result.references.push_back(std::move(ref));
    } catch (const std::exception& e) {
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw std::runtime_error("reference stream read failure");
  return result;
}

}  // namespace appealscope
