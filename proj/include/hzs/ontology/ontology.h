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

#ifndef HZS_ONTOLOGY_ONTOLOGY_H_
#define HZS_ONTOLOGY_ONTOLOGY_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hzs/embedstore/bundle.h"
#include "json.hpp"

namespace hzs::ontology {

struct Node {
  std::string id;
  std::string name;
  std::vector<std::string> parent_ids;  // manifest order
  std::vector<std::string> child_ids;   // order of appearance in the manifest
};

// Lowercases ASCII and collapses runs of whitespace; used for blocked-name
// matching.
std::string normalize_name(std::string_view name);

const std::vector<std::string>& default_blocked_names();

// Concept DAG. Immutable after construction; prune() returns a new instance.
class Ontology {
 public:
  Ontology() = default;

  // Builds child links from parent_ids and validates: duplicate ids are a
  // format error, unknown parents a reference error, cycles a structure error.
  // blocked_names defaults to default_blocked_names() when unset.
  static Ontology build(std::vector<Node> nodes,
                        std::optional<std::vector<std::string>> blocked_names = std::nullopt,
                        std::set<std::string> pruned = {});

  static Ontology from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  bool contains(std::string_view id) const;
  const Node& node(std::string_view id) const;  // reference error if unknown

  const std::vector<std::string>& blocked_names() const { return blocked_; }
  bool is_blocked_name(std::string_view name) const;
  const std::set<std::string>& pruned() const { return pruned_; }
  bool is_pruned(std::string_view id) const { return pruned_.count(std::string(id)) > 0; }

  Ontology with_pruned(std::set<std::string> pruned) const;
  Ontology with_blocked_names(std::vector<std::string> names) const;

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> blocked_;
  std::set<std::string> blocked_normalized_;
  std::set<std::string> pruned_;
};

Ontology load_ontology(const std::filesystem::path& path);
void save_ontology(const std::filesystem::path& path, const Ontology& onto);

// Reads child_id<TAB>parent_id<TAB>child_name rows. An empty or "-" parent
// marks a root; repeated child rows add parents. Parents that never appear as
// a child become roots named by their id.
Ontology ontology_from_tsv(const std::filesystem::path& path);

// Nearest admissible ancestor: breadth-first over parents in manifest order,
// skipping blocked names and pruned ids.
std::optional<std::string> effective_parent_id(const Ontology& onto,
                                               std::string_view class_id);
std::optional<std::string> effective_parent(const Ontology& onto,
                                            std::string_view class_id);

// Names of unpruned direct children in manifest order.
std::vector<std::string> effective_children(const Ontology& onto,
                                            std::string_view class_id);

// Nodes that can appear as augmentation text for the given classes: every
// ancestor plus direct children, excluding the classes themselves. Sorted.
std::vector<std::string> augmentation_helpers(const Ontology& onto,
                                              std::span<const std::string> class_ids);

// node id -> population variance over non-bare templates of the raw text
// embedding norm.
using NormVarianceTable = std::map<std::string, double>;

// The bank's class_ids are node ids; every requested node must be a row.
NormVarianceTable norm_variance(const embedstore::PromptBank& bank,
                                std::span<const std::string> node_ids);

// Keeps the top ceil(keep_fraction * n) scored nodes by variance (ties by id
// ascending) and marks the rest pruned. Protected ids (the classification
// vocabulary) are neither ranked nor pruned. Replaces any earlier prune set.
Ontology prune(const Ontology& onto, const NormVarianceTable& table, double keep_fraction,
               std::span<const std::string> protected_ids = {});

}  // namespace hzs::ontology

#endif  // HZS_ONTOLOGY_ONTOLOGY_H_
