//
// Copyright 2026 The stablepac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stablepac {

// Runs fn(first, last) over a static partition of [0, count) into contiguous
// chunks, one thread per chunk. Results must be written to per-index slots
// (or per-chunk accumulators merged by the caller in chunk order), which
// keeps every experiment a pure function of (config, seed) regardless of the
// thread count.
inline void parallel_chunks(int64_t count, int threads,
                            const std::function<void(int chunk, int64_t first,
                                                     int64_t last)>& fn) {
  if (threads < 1) threads = 1;
  if (count <= 0) return;
  if (threads == 1 || count == 1) {
    fn(0, 0, count);
    return;
  }
  const int used = static_cast<int>(std::min<int64_t>(threads, count));
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const int64_t base = count / used, extra = count % used;
  int64_t first = 0;
  for (int c = 0; c < used; ++c) {
    const int64_t len = base + (c < extra ? 1 : 0);
    const int64_t last = first + len;
    pool.emplace_back([&, c, first, last] {
      try {
        fn(c, first, last);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    first = last;
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stablepac
