// Copyright 2026 The mmidict Authors.
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

#include <cstddef>
#include <functional>

namespace mmidict {

// Worker cap for parallel loops. Defaults to MMIDICT_THREADS when set,
// otherwise the number of hardware threads.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(begin, end) over contiguous chunks of [0, n). Every index is
// visited exactly once; callers write results to per-index slots so the
// outcome does not depend on scheduling.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

template <typename F>
void parallel_for(std::size_t n, F&& f) {
  parallel_chunks(n, [&f](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) f(i);
  });
}

}  // namespace mmidict
