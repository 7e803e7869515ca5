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

#ifndef HZS_EVALKIT_SYNTHETIC_H_
#define HZS_EVALKIT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hzs/embedstore/bundle.h"
#include "hzs/embedstore/embedding_matrix.h"
#include "hzs/ontology/ontology.h"
#include "json.hpp"

namespace hzs::evalkit {

// Knobs of the planted-hierarchy benchmark. Noise terms are magnitudes of
// isotropic perturbations; the *_spread terms place children around parents.
struct WorldParams {
  std::uint64_t seed = 7;
  std::size_t n_parents = 10;
  std::size_t children_per_parent = 4;
  std::size_t n_images = 2000;
  std::size_t dim = 64;
  std::size_t n_templates = 16;  // excluding the bare name
  double image_noise = 0.6;
  double flip_noise = 0.15;
  double nuisance = 2.0;          // image-only background magnitude
  double text_noise = 0.35;
  double style_noise = 0.35;
  double name_drift = 1.0;        // pull of a drifted name towards its decoy
  double template_resolution = 1.2;
  double context_resolution = 0.5;
  double parent_weight = 0.3;
  double child_spread = 0.8;
  double grandchild_spread = 0.9;
  double absorber_spread = 0.65;
  double coarse_major_share = 0.7;

  // Same layout with every noise and drift term zeroed.
  WorldParams noiseless() const;
  nlohmann::ordered_json to_json() const;
  static WorldParams from_json(const nlohmann::json& j);
};

enum class ClassRole { kClean, kDrifted, kCoarse, kAbsorber };
std::string_view to_string(ClassRole role);

// A generated world. Text is embedded by a deterministic toy encoder that
// recognises node names inside arbitrary strings, so phase-2 candidate prompts
// can be embedded after the fact just like with a real text tower.
class SyntheticWorld {
 public:
  const WorldParams& params() const { return params_; }
  const ontology::Ontology& hierarchy() const { return hierarchy_; }
  const std::vector<std::string>& class_ids() const { return class_ids_; }
  const std::vector<ClassRole>& class_roles() const { return roles_; }
  const std::vector<std::string>& templates() const { return templates_; }
  const embedstore::PromptBank& bank() const { return bank_; }
  // Every hierarchy node under every template; input to pruning.
  const embedstore::PromptBank& node_bank() const { return node_bank_; }
  const embedstore::ImageBundle& images() const { return images_; }
  const std::vector<std::size_t>& labels() const { return *images_.labels; }

  // Embeds the texts; row ids are the texts themselves.
  embedstore::EmbeddingMatrix encode(std::span<const std::string> texts) const;
  // Un-normalized encoder output for one text, row-major dim floats.
  std::vector<float> encode_raw(std::string_view text) const;

  // Writes world.json, hierarchy.json, bank/, nodes/, images/ under dir.
  void write(const std::filesystem::path& dir) const;

  friend SyntheticWorld generate_world(const WorldParams& params);

 private:
  struct Concept {
    std::vector<double> visual;  // image centroid
    std::vector<double> named;   // where the bare name points
    double frequency = 1.0;      // scales the spread of raw text norms
  };
  struct Mention {
    std::size_t node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
  };

  std::vector<Mention> find_mentions(std::string_view text) const;
  bool is_ancestor(std::size_t ancestor, std::size_t node) const;
  embedstore::PromptBank encode_bank(const std::vector<std::string>& ids) const;

  WorldParams params_;
  ontology::Ontology hierarchy_;
  std::vector<std::string> node_ids_;
  std::vector<std::string> node_names_;
  std::vector<std::vector<std::size_t>> node_parents_;
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::size_t> name_index_;
  std::size_t longest_name_words_ = 1;
  std::vector<std::string> class_ids_;
  std::vector<ClassRole> roles_;
  std::vector<std::string> templates_;
  embedstore::PromptBank bank_;
  embedstore::PromptBank node_bank_;
  embedstore::ImageBundle images_;
};

// Deterministic in params (bitwise-identical output for the same seed).
SyntheticWorld generate_world(const WorldParams& params = {});

// Regenerates the world recorded in a world.json written by write().
SyntheticWorld load_world(const std::filesystem::path& world_json);

// CLIP-style prompt templates, bare name first.
std::vector<std::string> default_templates(std::size_t n_templates);

}  // namespace hzs::evalkit

#endif  // HZS_EVALKIT_SYNTHETIC_H_
