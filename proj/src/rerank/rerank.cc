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

#include "hzs/rerank/rerank.h"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "hzs/core/error.h"
#include "hzs/core/hashing.h"
#include "hzs/core/parallel.h"

namespace hzs::rerank {
namespace {

constexpr std::string_view kChildSlot = "{child}";
constexpr std::string_view kParentSlot = "{parent}";

std::string replace_all(std::string text, std::string_view slot, std::string_view value) {
  for (std::size_t pos = text.find(slot); pos != std::string::npos;
       pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
  return text;
}

void check_augment_template(std::string_view tmpl) {
  if (tmpl.find(kChildSlot) == std::string_view::npos ||
      tmpl.find(kParentSlot) == std::string_view::npos) {
    fail(ErrorKind::kParameter, "augmentation template \"" + std::string(tmpl) +
                                    "\" needs both {child} and {parent}");
  }
}

void check_context_template(std::string_view tmpl) {
  if (tmpl.find(embedstore::kLabelPlaceholder) == std::string_view::npos) {
    fail(ErrorKind::kParameter,
         "context template \"" + std::string(tmpl) + "\" needs a {label} slot");
  }
}

std::string render(std::string_view tmpl, const std::string& child,
                   const std::optional<std::string>& parent) {
  if (!parent) return child;
  return replace_all(replace_all(std::string(tmpl), kChildSlot, child), kParentSlot, *parent);
}

// Candidates for a single class, not deduplicated.
std::vector<AugmentedCandidate> augment_class(const Ontology& onto, const std::string& id,
                                              std::size_t origin, std::string_view tmpl) {
  if (!onto.contains(id)) return {AugmentedCandidate{origin, id, CandidateKind::kSelfPlain}};
  const auto parent = ontology::effective_parent(onto, id);
  std::vector<AugmentedCandidate> out;
  out.push_back({origin, render(tmpl, onto.node(id).name, parent),
                 parent ? CandidateKind::kSelfWithParent : CandidateKind::kSelfPlain});
  for (const auto& child : ontology::effective_children(onto, id)) {
    out.push_back({origin, render(tmpl, child, parent),
                   parent ? CandidateKind::kChildWithParent : CandidateKind::kChildPlain});
  }
  return out;
}

void dedup_append(std::vector<AugmentedCandidate>& out, std::unordered_set<std::string>& seen,
                  std::vector<AugmentedCandidate> more) {
  for (auto& c : more) {
    if (seen.insert(c.surface_name).second) out.push_back(std::move(c));
  }
}

// Index of the first maximum.
std::size_t first_best(const std::vector<float>& scores) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < scores.size(); ++r) {
    if (scores[r] > scores[best]) best = r;
  }
  return best;
}

}  // namespace

std::string_view to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::kSelfWithParent:
      return "self-with-parent";
    case CandidateKind::kChildWithParent:
      return "child-with-parent";
    case CandidateKind::kSelfPlain:
      return "self-plain";
    case CandidateKind::kChildPlain:
      return "child-plain";
  }
  return "unknown";
}

std::vector<AugmentedCandidate> augment_names(const Ontology& onto,
                                              std::span<const std::string> class_ids,
                                              std::string_view augment_template) {
  check_augment_template(augment_template);
  std::vector<AugmentedCandidate> out;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < class_ids.size(); ++c) {
    dedup_append(out, seen, augment_class(onto, class_ids[c], c, augment_template));
  }
  return out;
}

std::string render_prompt(std::string_view surface_name, std::string_view context_template) {
  check_context_template(context_template);
  return replace_all(std::string(context_template), embedstore::kLabelPlaceholder,
                     surface_name);
}

RerankDecision rerank_image(std::span<const float> image_row,
                            const std::vector<AugmentedCandidate>& candidates,
                            const EmbeddingMatrix& candidate_texts) {
  if (candidates.empty()) fail(ErrorKind::kParameter, "rerank_image: no candidates");
  if (candidate_texts.rows() != candidates.size()) {
    fail(ErrorKind::kShape, "rerank_image: " + std::to_string(candidate_texts.rows()) +
                                " candidate embeddings for " +
                                std::to_string(candidates.size()) + " candidates");
  }
  if (candidate_texts.dim() != image_row.size()) {
    fail(ErrorKind::kShape, "rerank_image: candidate dim differs from image dim");
  }
  RerankDecision d;
  d.candidates = candidates;
  d.scores.reserve(candidates.size());
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    d.scores.push_back(static_cast<float>(zeroshot::dot(image_row, candidate_texts.row(r))));
  }
  d.winning_candidate = first_best(d.scores);
  d.final_prediction = candidates[d.winning_candidate].origin_class;
  return d;
}

std::vector<AugmentedCandidate> image_candidates(const Ontology& onto,
                                                 const std::vector<std::string>& class_ids,
                                                 std::span<const std::size_t> top_classes,
                                                 std::string_view augment_template) {
  check_augment_template(augment_template);
  std::vector<AugmentedCandidate> out;
  std::unordered_set<std::string> seen;
  for (std::size_t c : top_classes) {
    if (c >= class_ids.size()) {
      fail(ErrorKind::kShape, "class index " + std::to_string(c) + " outside vocabulary");
    }
    dedup_append(out, seen, augment_class(onto, class_ids[c], c, augment_template));
  }
  return out;
}

std::string names_hash(std::span<const std::string> names) {
  std::string joined;
  for (const auto& n : names) {
    joined += n;
    joined += '\n';
  }
  return sha256_hex(joined);
}

CandidateEmission emit_candidates(const Ontology& onto,
                                  const std::vector<std::string>& class_ids,
                                  const zeroshot::TopK& topk,
                                  const confidence::ConfidenceReport& report,
                                  const RerankOptions& options) {
  check_context_template(options.context_template);
  if (topk.images() != report.size()) {
    fail(ErrorKind::kShape, "emit_candidates: top-k and report cover different image counts");
  }
  CandidateEmission out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (options.scope == Scope::kLowConfidence && !report.low_confidence[i]) continue;
    for (auto& c : image_candidates(onto, class_ids, topk.indices(i), options.augment_template)) {
      std::string prompt = render_prompt(c.surface_name, options.context_template);
      if (!seen.insert(prompt).second) continue;
      out.prompts.push_back(std::move(prompt));
      out.entries.push_back({c.origin_class, c.kind, std::move(c.surface_name)});
    }
  }
  out.hash = names_hash(out.prompts);
  return out;
}

void check_phase_link(const std::string& expected_hash, const EmbeddingMatrix& candidate_texts) {
  const std::string actual = names_hash(candidate_texts.ids());
  if (actual != expected_hash) {
    fail(ErrorKind::kConsistency, "candidate embeddings hash " + actual +
                                      " does not match emitted candidate hash " +
                                      expected_hash);
  }
}

RerankResult rerank_set(const embedstore::ImageBundle& images,
                        const confidence::ConfidenceReport& report,
                        const zeroshot::TopK& topk, const Ontology& onto,
                        const std::vector<std::string>& class_ids,
                        const EmbeddingMatrix& candidate_texts,
                        const RerankOptions& options) {
  check_context_template(options.context_template);
  const std::size_t n = images.images();
  if (report.size() != n || topk.images() != n) {
    fail(ErrorKind::kShape, "rerank_set: images, report and top-k disagree on image count");
  }
  if (candidate_texts.rows() > 0 && candidate_texts.dim() != images.dim()) {
    fail(ErrorKind::kShape, "rerank_set: candidate dim differs from image dim");
  }

  // Resolve every prompt to a candidate row before scoring so missing names
  // are reported together.
  std::vector<std::vector<AugmentedCandidate>> per_image(n);
  std::vector<std::vector<std::size_t>> rows(n);
  std::set<std::string> missing;
  for (std::size_t i = 0; i < n; ++i) {
    if (options.scope == Scope::kLowConfidence && !report.low_confidence[i]) continue;
    per_image[i] = image_candidates(onto, class_ids, topk.indices(i), options.augment_template);
    for (const auto& c : per_image[i]) {
      const std::string prompt = render_prompt(c.surface_name, options.context_template);
      if (auto r = candidate_texts.find(prompt)) {
        rows[i].push_back(*r);
      } else {
        missing.insert(prompt);
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "\"" : ", \"") + m + "\"";
    fail(ErrorKind::kData, "rerank_set: " + std::to_string(missing.size()) +
                               " candidate prompt(s) have no embedding: " + list);
  }

  RerankResult result;
  result.merged = report.base_prediction;
  result.reranked.assign(n, std::nullopt);
  std::vector<std::optional<RerankDecision>> slots(n);
  const auto& image_rows = images.raw();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (per_image[i].empty()) continue;
      RerankDecision d;
      d.image_id = images.image_ids[i];
      d.original_top1 = topk.indices(i)[0];
      d.candidates = std::move(per_image[i]);
      for (std::size_t r : rows[i]) {
        d.scores.push_back(
            static_cast<float>(zeroshot::dot(image_rows.row(i), candidate_texts.row(r))));
      }
      d.winning_candidate = first_best(d.scores);
      d.final_prediction = d.candidates[d.winning_candidate].origin_class;
      slots[i] = std::move(d);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i]) continue;
    result.reranked[i] = slots[i]->final_prediction;
    if (report.low_confidence[i]) result.merged[i] = slots[i]->final_prediction;
    result.decisions.push_back(std::move(*slots[i]));
  }
  return result;
}

}  // namespace hzs::rerank
