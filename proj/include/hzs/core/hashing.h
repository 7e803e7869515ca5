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

#ifndef HZS_CORE_HASHING_H_
#define HZS_CORE_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace hzs {

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// 64-bit FNV-1a. Used to seed deterministic per-string noise; not a
// content hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace hzs

#endif  // HZS_CORE_HASHING_H_
