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

#ifndef APPEALSCOPE_TIMEUTIL_HPP_
#define APPEALSCOPE_TIMEUTIL_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace appealscope {

// All instants are UTC. Dates are whole UTC calendar days, timestamps have
// second precision.
using UtcDate = std::chrono::sys_days;
using UtcSeconds = std::chrono::sys_seconds;

// "YYYY-MM-DD"; rejects malformed or non-existent dates.
std::optional<UtcDate> parse_utc_date(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ". A fractional-second part is accepted and
// truncated; "+00:00" is accepted in place of the trailing "Z".
std::optional<UtcSeconds> parse_utc_timestamp(std::string_view text);

std::string format_utc_date(UtcDate d);
std::string format_utc_timestamp(UtcSeconds t);

// The UTC calendar date an instant falls on.
inline UtcDate date_of(UtcSeconds t) {
  return std::chrono::floor<std::chrono::days>(t);
}

// Whole days from `from` to `to`; negative when `to` precedes `from`.
inline long days_between(UtcDate from, UtcDate to) {
  return static_cast<long>((to - from).count());
}

}  // namespace appealscope

#endif  // APPEALSCOPE_TIMEUTIL_HPP_
