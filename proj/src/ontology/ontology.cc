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

#include "hzs/ontology/ontology.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hzs/core/error.h"
#include "hzs/core/json_io.h"

namespace hzs::ontology {

std::string normalize_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const std::vector<std::string>& default_blocked_names() {
  static const std::vector<std::string> kNames = {
      "physical entity", "artifact", "matter", "entity", "object", "whole"};
  return kNames;
}

Ontology Ontology::build(std::vector<Node> nodes,
                         std::optional<std::vector<std::string>> blocked_names,
                         std::set<std::string> pruned) {
  Ontology onto;
  onto.index_.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) fail(ErrorKind::kFormat, "node with empty id");
    if (!onto.index_.emplace(nodes[i].id, i).second) {
      fail(ErrorKind::kFormat, "duplicate node id '" + nodes[i].id + "'");
    }
  }
  for (auto& n : nodes) {
    n.child_ids.clear();
    std::vector<std::string> unique_parents;
    for (const auto& p : n.parent_ids) {
      if (std::find(unique_parents.begin(), unique_parents.end(), p) == unique_parents.end()) {
        unique_parents.push_back(p);
      }
    }
    n.parent_ids = std::move(unique_parents);
    for (const auto& p : n.parent_ids) {
      if (!onto.index_.count(p)) {
        fail(ErrorKind::kReference, "node '" + n.id + "' names unknown parent '" + p + "'");
      }
    }
  }
  for (const auto& n : nodes) {
    for (const auto& p : n.parent_ids) nodes[onto.index_.at(p)].child_ids.push_back(n.id);
  }

  // Iterative three-colour DFS along parent edges.
  enum Colour : unsigned char { kWhite, kGrey, kBlack };
  std::vector<Colour> colour(nodes.size(), kWhite);
  for (std::size_t root = 0; root < nodes.size(); ++root) {
    if (colour[root] != kWhite) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack = {{root, 0}};
    colour[root] = kGrey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < nodes[v].parent_ids.size()) {
        const std::size_t u = onto.index_.at(nodes[v].parent_ids[next++]);
        if (colour[u] == kGrey) {
          std::string cycle = nodes[u].id;
          auto it = std::find_if(stack.begin(), stack.end(),
                                 [&](const auto& e) { return e.first == u; });
          for (++it; it != stack.end(); ++it) cycle += " -> " + nodes[it->first].id;
          cycle += " -> " + nodes[u].id;
          fail(ErrorKind::kStructure, "hierarchy cycle: " + cycle);
        }
        if (colour[u] == kWhite) {
          colour[u] = kGrey;
          stack.emplace_back(u, 0);
        }
      } else {
        colour[v] = kBlack;
        stack.pop_back();
      }
    }
  }

  onto.nodes_ = std::move(nodes);
  onto.blocked_ = blocked_names ? std::move(*blocked_names) : default_blocked_names();
  for (const auto& b : onto.blocked_) onto.blocked_normalized_.insert(normalize_name(b));
  for (const auto& id : pruned) {
    if (!onto.index_.count(id)) fail(ErrorKind::kReference, "pruned id '" + id + "' unknown");
  }
  onto.pruned_ = std::move(pruned);
  return onto;
}

Ontology Ontology::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    fail(ErrorKind::kFormat, "hierarchy: missing \"nodes\" array");
  }
  std::vector<Node> nodes;
  std::optional<std::vector<std::string>> blocked;
  std::set<std::string> pruned;
  try {
    for (const auto& e : j["nodes"]) {
      Node n;
      n.id = e.at("id").get<std::string>();
      n.name = e.at("name").get<std::string>();
      if (e.contains("parents") && !e["parents"].is_null()) {
        n.parent_ids = e["parents"].get<std::vector<std::string>>();
      }
      nodes.push_back(std::move(n));
    }
    if (j.contains("blocked_names") && !j["blocked_names"].is_null()) {
      blocked = j["blocked_names"].get<std::vector<std::string>>();
    }
    if (j.contains("pruned") && !j["pruned"].is_null()) {
      pruned = j["pruned"].get<std::set<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("hierarchy: ") + e.what());
  }
  return build(std::move(nodes), std::move(blocked), std::move(pruned));
}

nlohmann::ordered_json Ontology::to_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    nlohmann::ordered_json e;
    e["id"] = n.id;
    e["name"] = n.name;
    e["parents"] = n.parent_ids;
    j["nodes"].push_back(std::move(e));
  }
  j["blocked_names"] = blocked_;
  if (!pruned_.empty()) j["pruned"] = pruned_;
  return j;
}

bool Ontology::contains(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

const Node& Ontology::node(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) fail(ErrorKind::kReference, "unknown node id '" + std::string(id) + "'");
  return nodes_[it->second];
}

bool Ontology::is_blocked_name(std::string_view name) const {
  return blocked_normalized_.count(normalize_name(name)) > 0;
}

Ontology Ontology::with_pruned(std::set<std::string> pruned) const {
  return build(nodes_, blocked_, std::move(pruned));
}

Ontology Ontology::with_blocked_names(std::vector<std::string> names) const {
  return build(nodes_, std::move(names), pruned_);
}

Ontology load_ontology(const std::filesystem::path& path) {
  try {
    return Ontology::from_json(read_json_file(path));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void save_ontology(const std::filesystem::path& path, const Ontology& onto) {
  write_text_file(path, onto.to_json().dump(2) + "\n");
}

Ontology ontology_from_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kFormat, "cannot open " + path.string());
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> mentioned_parents;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 3 || cols[0].empty()) {
      fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": expected child_id<TAB>parent_id<TAB>child_name");
    }
    auto [it, inserted] = index.emplace(cols[0], nodes.size());
    if (inserted) nodes.push_back(Node{cols[0], cols[2], {}, {}});
    Node& n = nodes[it->second];
    if (n.name != cols[2]) {
      fail(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": conflicting names for '" + cols[0] + "'");
    }
    if (!cols[1].empty() && cols[1] != "-") {
      n.parent_ids.push_back(cols[1]);
      mentioned_parents.push_back(cols[1]);
    }
  }
  for (const auto& p : mentioned_parents) {
    if (index.emplace(p, nodes.size()).second) nodes.push_back(Node{p, p, {}, {}});
  }
  return Ontology::build(std::move(nodes));
}

std::optional<std::string> effective_parent_id(const Ontology& onto,
                                               std::string_view class_id) {
  const Node& start = onto.node(class_id);
  std::deque<std::string> frontier(start.parent_ids.begin(), start.parent_ids.end());
  std::unordered_set<std::string> seen(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    const Node& n = onto.node(frontier.front());
    frontier.pop_front();
    if (!onto.is_blocked_name(n.name) && !onto.is_pruned(n.id)) return n.id;
    for (const auto& p : n.parent_ids) {
      if (seen.insert(p).second) frontier.push_back(p);
    }
  }
  return std::nullopt;
}

std::optional<std::string> effective_parent(const Ontology& onto, std::string_view class_id) {
  auto id = effective_parent_id(onto, class_id);
  if (!id) return std::nullopt;
  return onto.node(*id).name;
}

std::vector<std::string> effective_children(const Ontology& onto, std::string_view class_id) {
  std::vector<std::string> out;
  for (const auto& c : onto.node(class_id).child_ids) {
    if (!onto.is_pruned(c)) out.push_back(onto.node(c).name);
  }
  return out;
}

std::vector<std::string> augmentation_helpers(const Ontology& onto,
                                              std::span<const std::string> class_ids) {
  const std::set<std::string> classes(class_ids.begin(), class_ids.end());
  std::set<std::string> helpers;
  for (const auto& id : class_ids) {
    if (!onto.contains(id)) continue;
    const Node& n = onto.node(id);
    for (const auto& c : n.child_ids) helpers.insert(c);
    std::deque<std::string> frontier(n.parent_ids.begin(), n.parent_ids.end());
    while (!frontier.empty()) {
      const std::string p = frontier.front();
      frontier.pop_front();
      if (!helpers.insert(p).second) continue;
      for (const auto& g : onto.node(p).parent_ids) frontier.push_back(g);
    }
  }
  std::vector<std::string> out;
  for (const auto& h : helpers) {
    if (!classes.count(h)) out.push_back(h);
  }
  return out;
}

}  // namespace hzs::ontology
