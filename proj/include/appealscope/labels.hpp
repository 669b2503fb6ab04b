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

#ifndef APPEALSCOPE_LABELS_HPP_
#define APPEALSCOPE_LABELS_HPP_

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace appealscope {

// Content categories, declared in alphabetical order; the first is the
// reference level in regression designs.
enum class MisinfoType {
  conspiracy,
  fake_cure,
  fake_treatment,
  false_fact_or_prevention,
  false_public_health_response,
};

inline constexpr std::array<MisinfoType, 5> kAllMisinfoTypes = {
    MisinfoType::conspiracy,
    MisinfoType::fake_cure,
    MisinfoType::fake_treatment,
    MisinfoType::false_fact_or_prevention,
    MisinfoType::false_public_health_response,
};

std::string_view to_string(MisinfoType t);
std::optional<MisinfoType> misinfo_type_from_string(std::string_view name);

// Per-tweet content label. For labels produced by the classifier, a
// positive label always carries the matched reference's type, similarity
// and id; ingested precomputed labels may omit the reference id.
struct MisinfoLabel {
  bool is_misinfo = false;
  std::optional<MisinfoType> type;
  std::optional<double> similarity;
  std::optional<std::string> matched_reference_id;

  bool operator==(const MisinfoLabel&) const = default;
};

// Annotated exemplar a tweet embedding is compared against.
struct ReferenceTweet {
  std::string reference_id;
  MisinfoType type = MisinfoType::conspiracy;
  Eigen::VectorXd embedding;
};

}  // namespace appealscope

#endif  // APPEALSCOPE_LABELS_HPP_
