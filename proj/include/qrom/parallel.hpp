// Copyright 2026 The qrom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qrom {

/// Worker count from QROM_WORKERS (default 1, clamped to [1, 256]).
inline unsigned worker_count() {
    const char* env = std::getenv("QROM_WORKERS");
    if (env == nullptr) return 1;
    try {
        const long v = std::stol(env);
        return static_cast<unsigned>(std::clamp(v, 1L, 256L));
    } catch (const std::exception&) {
        return 1;
    }
}

/// Calls body(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on scheduling. The first exception thrown
/// by any index is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = worker_count()) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(workers, count);
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(run);
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qrom
