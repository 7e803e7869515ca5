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

#ifndef HZS_EMBEDSTORE_BUNDLE_H_
#define HZS_EMBEDSTORE_BUNDLE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hzs/embedstore/embedding_matrix.h"

namespace hzs::embedstore {

inline constexpr std::string_view kLabelPlaceholder = "{label}";
inline constexpr std::string_view kRawChannel = "raw";

// Class-name text embeddings, one matrix per prompt template. Template 0 is
// the bare class name "{label}".
struct PromptBank {
  std::vector<std::string> templates;
  std::vector<std::string> class_ids;
  std::vector<EmbeddingMatrix> matrices;

  std::size_t classes() const { return class_ids.size(); }
  std::size_t dim() const { return matrices.empty() ? 0 : matrices[0].dim(); }
  const EmbeddingMatrix& bare() const { return matrices.at(0); }
};

// Image embeddings, one matrix per perturbation channel. Channel 0 is "raw".
struct ImageBundle {
  std::vector<std::string> perturbations;
  std::vector<std::string> image_ids;
  std::optional<std::vector<std::size_t>> labels;
  std::vector<EmbeddingMatrix> matrices;

  std::size_t images() const { return image_ids.size(); }
  std::size_t dim() const { return matrices.empty() ? 0 : matrices[0].dim(); }
  const EmbeddingMatrix& raw() const { return matrices.at(0); }
  std::optional<std::size_t> find_channel(std::string_view name) const;
};

struct ValidationSummary {
  std::size_t classes = 0;
  std::size_t templates = 0;
  std::size_t images = 0;
  std::size_t perturbations = 0;
  std::size_t dim = 0;
};

// Invariant checks that return every violation rather than the first.
std::vector<std::string> bank_issues(const PromptBank& bank);
std::vector<std::string> bundle_issues(const ImageBundle& bundle);

// Throws ErrorKind::kValidation listing all failures.
ValidationSummary validate_bundle(const PromptBank& bank,
                                  const ImageBundle& images);

// Manifest paths name the JSON file; "files" entries resolve relative to it.
PromptBank load_prompt_bank(const std::filesystem::path& manifest);
ImageBundle load_image_bundle(const std::filesystem::path& manifest);

void write_prompt_bank_manifest(const std::filesystem::path& manifest,
                                const std::vector<std::string>& templates,
                                const std::vector<std::string>& class_ids,
                                const std::vector<std::string>& files);
void write_image_bundle_manifest(
    const std::filesystem::path& manifest,
    const std::vector<std::string>& perturbations,
    const std::vector<std::string>& image_ids,
    const std::optional<std::vector<std::size_t>>& labels,
    const std::vector<std::string>& files);

}  // namespace hzs::embedstore

#endif  // HZS_EMBEDSTORE_BUNDLE_H_
