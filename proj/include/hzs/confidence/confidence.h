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

#ifndef HZS_CONFIDENCE_CONFIDENCE_H_
#define HZS_CONFIDENCE_CONFIDENCE_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hzs/embedstore/bundle.h"
#include "hzs/zeroshot/zeroshot.h"

namespace hzs::confidence {

using embedstore::EmbeddingMatrix;
using embedstore::ImageBundle;
using embedstore::PromptBank;

// Four template-index sets for the binary prompt criterion. An empty fourth
// set stands for the bare class name {0}.
using PromptSplits = std::array<std::vector<std::size_t>, 4>;

// First half / second half / all of the non-bare templates, then the bare
// name. Requires at least two non-bare templates.
PromptSplits default_splits(const PromptBank& bank);

// Fraction of non-bare templates whose top-1 class equals the bare-name top-1.
std::vector<double> prompt_consistency(const EmbeddingMatrix& images,
                                       const PromptBank& bank);

// Fraction of non-raw channels whose top-1 class equals the raw-channel top-1.
std::vector<double> image_consistency(const ImageBundle& bundle,
                                      const EmbeddingMatrix& class_texts);

// True where the ensemble top-1 predictions of the four splits disagree.
std::vector<bool> binary_prompt_flag(const EmbeddingMatrix& images,
                                     const PromptBank& bank,
                                     const PromptSplits& splits);

// True where the channel's top-1 differs from the raw channel's.
std::vector<bool> binary_image_flag(const ImageBundle& bundle,
                                    const EmbeddingMatrix& class_texts,
                                    std::string_view channel);

enum class Mode { kBinary, kThreshold };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct ReportOptions {
  Mode mode = Mode::kBinary;
  double tau_t = 0.62;
  double tau_i = 0.62;
  std::optional<PromptSplits> splits;  // default_splits() when unset
  std::string image_channel = "flip-lr";
};

struct ConfidenceReport {
  std::vector<std::string> image_ids;
  std::vector<double> s_prompt;
  std::vector<double> s_image;
  std::vector<bool> flag_prompt;
  std::vector<bool> flag_image;
  std::vector<bool> low_confidence;
  std::vector<std::size_t> base_prediction;

  std::size_t size() const { return image_ids.size(); }
  std::size_t low_count() const;

  // Scalar self-consistency confidence: mean of s_prompt and s_image.
  std::vector<double> combined() const;
};

// Threshold flags given precomputed scores; score <= tau is flagged.
std::vector<bool> threshold_flags(const std::vector<double>& scores, double tau);

// Runs the low-confidence detection on the raw channel of the bundle,
// classifying against the bare-name matrix of the bank.
ConfidenceReport build_report(const PromptBank& bank, const ImageBundle& bundle,
                              const ReportOptions& options = {});

// One JSON object per image.
void write_report_jsonl(std::ostream& out, const ConfidenceReport& report);

}  // namespace hzs::confidence

#endif  // HZS_CONFIDENCE_CONFIDENCE_H_
