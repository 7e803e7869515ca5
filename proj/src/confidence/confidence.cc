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

#include "hzs/confidence/confidence.h"

#include <ostream>

#include "hzs/core/error.h"
#include "json.hpp"

namespace hzs::confidence {
namespace {

using zeroshot::argmax;
using zeroshot::logits;

void check_tau(double tau, const char* name) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    fail(ErrorKind::kParameter, std::string(name) + "=" + std::to_string(tau) +
                                    " outside [0, 1]");
  }
}

}  // namespace

PromptSplits default_splits(const PromptBank& bank) {
  const std::size_t voters = bank.matrices.size() > 0 ? bank.matrices.size() - 1 : 0;
  if (voters < 2) {
    fail(ErrorKind::kParameter,
         "default prompt splits need at least two non-bare templates, bank has " +
             std::to_string(voters));
  }
  const std::size_t half = voters / 2;
  PromptSplits splits;
  for (std::size_t t = 1; t <= voters; ++t) {
    (t <= half ? splits[0] : splits[1]).push_back(t);
    splits[2].push_back(t);
  }
  splits[3] = {0};
  return splits;
}

std::vector<double> prompt_consistency(const EmbeddingMatrix& images,
                                       const PromptBank& bank) {
  if (bank.matrices.size() < 2) {
    fail(ErrorKind::kParameter,
         "prompt_consistency: bank needs a template beyond the bare name");
  }
  const auto reference = argmax(logits(images, bank.bare()));
  std::vector<std::size_t> agree(images.rows(), 0);
  for (std::size_t t = 1; t < bank.matrices.size(); ++t) {
    const auto pred = argmax(logits(images, bank.matrices[t]));
    for (std::size_t i = 0; i < pred.size(); ++i) agree[i] += pred[i] == reference[i];
  }
  const double voters = static_cast<double>(bank.matrices.size() - 1);
  std::vector<double> out(images.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = agree[i] / voters;
  return out;
}

std::vector<double> image_consistency(const ImageBundle& bundle,
                                      const EmbeddingMatrix& class_texts) {
  if (bundle.matrices.size() < 2) {
    fail(ErrorKind::kParameter,
         "image_consistency: bundle needs a perturbation channel beyond raw");
  }
  const auto reference = argmax(logits(bundle.raw(), class_texts));
  std::vector<std::size_t> agree(bundle.images(), 0);
  for (std::size_t b = 1; b < bundle.matrices.size(); ++b) {
    const auto pred = argmax(logits(bundle.matrices[b], class_texts));
    for (std::size_t i = 0; i < pred.size(); ++i) agree[i] += pred[i] == reference[i];
  }
  const double voters = static_cast<double>(bundle.matrices.size() - 1);
  std::vector<double> out(bundle.images());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = agree[i] / voters;
  return out;
}

std::vector<bool> binary_prompt_flag(const EmbeddingMatrix& images,
                                     const PromptBank& bank,
                                     const PromptSplits& splits) {
  for (std::size_t s = 0; s < 3; ++s) {
    if (splits[s].empty()) {
      fail(ErrorKind::kParameter, "binary_prompt_flag: split " + std::to_string(s) +
                                      " is empty");
    }
  }
  static const std::vector<std::size_t> kBare = {0};
  std::array<std::vector<std::size_t>, 4> preds;
  for (std::size_t s = 0; s < 4; ++s) {
    const auto& subset = splits[s].empty() ? kBare : splits[s];
    preds[s] = argmax(zeroshot::ensemble_logits(images, bank, subset));
  }
  std::vector<bool> out(images.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = !(preds[0][i] == preds[1][i] && preds[1][i] == preds[2][i] &&
               preds[2][i] == preds[3][i]);
  }
  return out;
}

std::vector<bool> binary_image_flag(const ImageBundle& bundle,
                                    const EmbeddingMatrix& class_texts,
                                    std::string_view channel) {
  const auto index = bundle.find_channel(channel);
  if (!index || *index == 0) {
    fail(ErrorKind::kParameter, "binary_image_flag: no non-raw channel '" +
                                    std::string(channel) + "' in bundle");
  }
  const auto raw = argmax(logits(bundle.raw(), class_texts));
  const auto other = argmax(logits(bundle.matrices[*index], class_texts));
  std::vector<bool> out(raw.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw[i] != other[i];
  return out;
}

std::string_view to_string(Mode mode) {
  return mode == Mode::kBinary ? "binary" : "threshold";
}

Mode parse_mode(std::string_view text) {
  if (text == "binary") return Mode::kBinary;
  if (text == "threshold") return Mode::kThreshold;
  fail(ErrorKind::kParameter, "unknown confidence mode '" + std::string(text) + "'");
}

std::size_t ConfidenceReport::low_count() const {
  std::size_t n = 0;
  for (bool b : low_confidence) n += b;
  return n;
}

std::vector<double> ConfidenceReport::combined() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (s_prompt[i] + s_image[i]);
  return out;
}

std::vector<bool> threshold_flags(const std::vector<double>& scores, double tau) {
  check_tau(tau, "tau");
  std::vector<bool> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] <= tau;
  return out;
}

ConfidenceReport build_report(const PromptBank& bank, const ImageBundle& bundle,
                              const ReportOptions& options) {
  if (options.mode == Mode::kThreshold) {
    check_tau(options.tau_t, "tau_t");
    check_tau(options.tau_i, "tau_i");
  }
  const EmbeddingMatrix& images = bundle.raw();
  const EmbeddingMatrix& names = bank.bare();

  ConfidenceReport report;
  report.image_ids = bundle.image_ids;
  report.base_prediction = argmax(logits(images, names));
  report.s_prompt = prompt_consistency(images, bank);
  report.s_image = image_consistency(bundle, names);

  if (options.mode == Mode::kBinary) {
    const PromptSplits splits = options.splits ? *options.splits : default_splits(bank);
    report.flag_prompt = binary_prompt_flag(images, bank, splits);
    report.flag_image = binary_image_flag(bundle, names, options.image_channel);
  } else {
    report.flag_prompt = threshold_flags(report.s_prompt, options.tau_t);
    report.flag_image = threshold_flags(report.s_image, options.tau_i);
  }
  report.low_confidence.resize(report.size());
  for (std::size_t i = 0; i < report.size(); ++i) {
    report.low_confidence[i] = report.flag_prompt[i] || report.flag_image[i];
  }
  return report;
}

void write_report_jsonl(std::ostream& out, const ConfidenceReport& report) {
  for (std::size_t i = 0; i < report.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = report.image_ids[i];
    j["s_prompt"] = report.s_prompt[i];
    j["s_image"] = report.s_image[i];
    j["flag_prompt"] = static_cast<bool>(report.flag_prompt[i]);
    j["flag_image"] = static_cast<bool>(report.flag_image[i]);
    j["low_confidence"] = static_cast<bool>(report.low_confidence[i]);
    j["base_prediction"] = report.base_prediction[i];
    out << j.dump() << '\n';
  }
}

}  // namespace hzs::confidence
