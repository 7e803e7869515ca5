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

#ifndef HZS_RERANK_RERANK_H_
#define HZS_RERANK_RERANK_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hzs/confidence/confidence.h"
#include "hzs/embedstore/bundle.h"
#include "hzs/ontology/ontology.h"
#include "hzs/zeroshot/zeroshot.h"

namespace hzs::rerank {

using embedstore::EmbeddingMatrix;
using ontology::Ontology;

inline constexpr std::string_view kDefaultAugmentTemplate =
    "{child} which is a kind of {parent}";
inline constexpr std::string_view kDefaultContextTemplate = "A photo of a {label}";

enum class CandidateKind { kSelfWithParent, kChildWithParent, kSelfPlain, kChildPlain };

std::string_view to_string(CandidateKind kind);

struct AugmentedCandidate {
  std::size_t origin_class = 0;
  std::string surface_name;
  CandidateKind kind = CandidateKind::kSelfPlain;

  bool operator==(const AugmentedCandidate&) const = default;
};

// Top-down and bottom-up label augmentation. For each class: the class name
// joined with its effective parent, then each effective child joined with
// the class's parent (not the child's own). Without an admissible parent the
// names are emitted plain. origin_class indexes class_ids; ids missing from
// the ontology are used verbatim as plain names. Duplicate surface names keep
// the first origin.
std::vector<AugmentedCandidate> augment_names(const Ontology& onto,
                                              std::span<const std::string> class_ids,
                                              std::string_view augment_template =
                                                  kDefaultAugmentTemplate);

// Wraps the surface name in the context template's {label} slot.
std::string render_prompt(std::string_view surface_name, std::string_view context_template);

struct RerankDecision {
  std::string image_id;
  std::size_t original_top1 = 0;
  std::vector<AugmentedCandidate> candidates;
  std::vector<float> scores;
  std::size_t final_prediction = 0;
  std::size_t winning_candidate = 0;
};

// candidate_texts row r embeds candidates[r]. The best-scoring candidate wins
// (earliest on ties) and its origin class is the prediction.
RerankDecision rerank_image(std::span<const float> image_row,
                            const std::vector<AugmentedCandidate>& candidates,
                            const EmbeddingMatrix& candidate_texts);

enum class Scope { kLowConfidence, kAll };

struct RerankOptions {
  std::size_t k = 5;
  std::string augment_template{kDefaultAugmentTemplate};
  std::string context_template{kDefaultContextTemplate};
  Scope scope = Scope::kLowConfidence;
};

// Candidates for one image: the augmented names of its top-k classes in rank
// order, deduplicated by surface name. origin_class indexes class_ids.
std::vector<AugmentedCandidate> image_candidates(const Ontology& onto,
                                                 const std::vector<std::string>& class_ids,
                                                 std::span<const std::size_t> top_classes,
                                                 std::string_view augment_template);

// Phase 1: the prompt texts an encoder must embed before reranking.
struct CandidateEmission {
  struct Entry {
    std::size_t origin_class = 0;
    CandidateKind kind = CandidateKind::kSelfPlain;
    std::string surface_name;
  };
  std::vector<std::string> prompts;  // unique, first-seen order
  std::vector<Entry> entries;        // aligned with prompts
  std::string hash;
};

// Content hash linking phase 1 and phase 2: SHA-256 of the names, each
// terminated by a newline.
std::string names_hash(std::span<const std::string> names);

CandidateEmission emit_candidates(const Ontology& onto,
                                  const std::vector<std::string>& class_ids,
                                  const zeroshot::TopK& topk,
                                  const confidence::ConfidenceReport& report,
                                  const RerankOptions& options);

// Throws kConsistency unless the matrix ids hash to expected_hash.
void check_phase_link(const std::string& expected_hash, const EmbeddingMatrix& candidate_texts);

struct RerankResult {
  std::vector<RerankDecision> decisions;               // images that were reranked
  std::vector<std::size_t> merged;                     // final prediction per image
  std::vector<std::optional<std::size_t>> reranked;    // rerank output where computed
};

// Reranks the low-confidence images (or all, per scope) and merges: flagged
// images take the reranked class, the rest keep base_prediction. Prompt texts
// absent from candidate_texts raise kData listing every missing name.
RerankResult rerank_set(const embedstore::ImageBundle& images,
                        const confidence::ConfidenceReport& report,
                        const zeroshot::TopK& topk, const Ontology& onto,
                        const std::vector<std::string>& class_ids,
                        const EmbeddingMatrix& candidate_texts,
                        const RerankOptions& options = {});

}  // namespace hzs::rerank

#endif  // HZS_RERANK_RERANK_H_
