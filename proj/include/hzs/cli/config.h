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

#ifndef HZS_CLI_CONFIG_H_
#define HZS_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hzs/confidence/confidence.h"
#include "hzs/evalkit/synthetic.h"
#include "hzs/rerank/rerank.h"
#include "json.hpp"

namespace hzs::cli {

// Everything a run depends on. Relative paths in a config file resolve
// against the file's directory; command-line flags override file keys.
struct RunConfig {
  std::filesystem::path images;      // image bundle manifest
  std::filesystem::path bank;        // prompt bank manifest
  std::filesystem::path hierarchy;   // hierarchy JSON
  std::filesystem::path nodes;       // per-node prompt bank, for pruning
  std::filesystem::path candidates;  // phase-2 candidate embeddings (EMB1)
  std::filesystem::path world;       // world.json of a synthetic world
  std::filesystem::path out = ".";

  confidence::Mode mode = confidence::Mode::kBinary;
  double tau_t = 0.62;
  double tau_i = 0.62;
  std::string image_channel = "flip-lr";
  std::size_t k = 5;
  double keep_fraction = 1.0;
  std::string augment_template{rerank::kDefaultAugmentTemplate};
  std::string context_template{rerank::kDefaultContextTemplate};
  rerank::Scope scope = rerank::Scope::kLowConfidence;
  std::optional<std::vector<std::string>> blocked_names;
  std::size_t threads = 0;
  evalkit::WorldParams synth;  // synth.seed doubles as the run seed

  // Resolved form with absolute paths; threads are left out since they never
  // change results.
  nlohmann::ordered_json to_json() const;
  // SHA-256 of to_json().dump().
  std::string hash() const;

  confidence::ReportOptions report_options() const;
  rerank::RerankOptions rerank_options() const;

  // Parameter checks; paths are checked by the commands that need them.
  void validate() const;
};

// Reads a config file. Unknown keys are a format error so typos surface.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

std::string_view to_string(rerank::Scope scope);
rerank::Scope parse_scope(std::string_view text);

// Throws a validation error naming the key when the path does not exist.
void require_path(const std::filesystem::path& path, std::string_view key);

}  // namespace hzs::cli

#endif  // HZS_CLI_CONFIG_H_
