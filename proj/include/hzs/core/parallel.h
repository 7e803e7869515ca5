/*
 * Copyright 2026 The hzs Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HZS_CORE_PARALLEL_H_
#define HZS_CORE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace hzs {

// Process-wide cap on worker threads. 0 means hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Calls fn(begin, end) over disjoint contiguous chunks of [0, n). Chunks run
// on up to max_threads() threads; fn must only write to slots in its chunk.
// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace hzs

#endif  // HZS_CORE_PARALLEL_H_
