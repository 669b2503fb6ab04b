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

#ifndef APPEALSCOPE_CSV_HPP_
#define APPEALSCOPE_CSV_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace appealscope::csv {

// RFC 4180: quoted fields may contain commas, doubled quotes and line
// breaks. Accepts both LF and CRLF row terminators.
std::vector<std::vector<std::string>> read_all(std::istream& in);

// Quotes the field only when needed.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace appealscope::csv

#endif  // APPEALSCOPE_CSV_HPP_
