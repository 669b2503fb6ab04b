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

#include "appealscope/timeutil.hpp"

#include <cstdio>

namespace appealscope {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

std::optional<std::chrono::year_month_day> parse_ymd(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{to_int(ys)},
                                  std::chrono::month{unsigned(to_int(ms))},
                                  std::chrono::day{unsigned(to_int(ds))}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

}  // namespace

std::optional<UtcDate> parse_utc_date(std::string_view text) {
  auto ymd = parse_ymd(text);
  if (!ymd) return std::nullopt;
  return UtcDate{*ymd};
}

std::optional<UtcSeconds> parse_utc_timestamp(std::string_view text) {
  if (text.size() < 20 || text[10] != 'T') return std::nullopt;
  auto ymd = parse_ymd(text.substr(0, 10));
  if (!ymd) return std::nullopt;

  std::string_view clock = text.substr(11);
  if (clock.size() < 8 || clock[2] != ':' || clock[5] != ':') return std::nullopt;
  auto hs = clock.substr(0, 2), mins = clock.substr(3, 2), ss = clock.substr(6, 2);
  if (!all_digits(hs) || !all_digits(mins) || !all_digits(ss)) return std::nullopt;
  int h = to_int(hs), m = to_int(mins), s = to_int(ss);
  if (h > 23 || m > 59 || s > 59) return std::nullopt;

  std::string_view rest = clock.substr(8);
  if (!rest.empty() && rest[0] == '.') {
    // fractional seconds: truncate
    size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) return std::nullopt;
    rest = rest.substr(i);
  }
  if (rest != "Z" && rest != "+00:00") return std::nullopt;

  return UtcSeconds{std::chrono::sys_days{*ymd} + std::chrono::hours{h} +
                    std::chrono::minutes{m} + std::chrono::seconds{s}};
}

std::string format_utc_date(UtcDate d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

std::string format_utc_timestamp(UtcSeconds t) {
  UtcDate day = date_of(t);
  auto tod = std::chrono::hh_mm_ss{t - day};
  std::chrono::year_month_day ymd{day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                int(tod.hours().count()), int(tod.minutes().count()),
                int(tod.seconds().count()));
  return buf;
}

}  // namespace appealscope
