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

#ifndef APPEALSCOPE_PARALLEL_HPP_
#define APPEALSCOPE_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace appealscope {

// Runs fn(begin, end) over contiguous index chunks. Callers write results
// into preallocated slots keyed by index, so output never depends on
// scheduling. The first exception thrown by a worker is rethrown.
template <typename Fn>
void parallel_for_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  unsigned workers = threads;
  if (workers > count) workers = static_cast<unsigned>(count);
  std::size_t chunk = (count + workers - 1) / workers;

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = begin + chunk < count ? begin + chunk : count;
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace appealscope

#endif  // APPEALSCOPE_PARALLEL_HPP_
