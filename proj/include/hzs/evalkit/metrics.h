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

#ifndef HZS_EVALKIT_METRICS_H_
#define HZS_EVALKIT_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hzs::evalkit {

// Exact-match accuracies. acc_low / acc_high are nullopt when the subset is
// empty.
struct AccuracySplit {
  std::optional<double> acc_low;
  std::optional<double> acc_high;
  double acc_full = 0.0;
  std::size_t n_low = 0;
  std::size_t n_high = 0;
};

AccuracySplit accuracy_split(std::span<const std::size_t> predictions,
                             std::span<const std::size_t> labels,
                             const std::vector<bool>& low_mask);

std::vector<bool> correctness(std::span<const std::size_t> predictions,
                              std::span<const std::size_t> labels);

// P(score_correct > score_incorrect) + 0.5 P(tie), computed exactly from tie
// groups. Needs at least one correct and one incorrect item.
double auc(std::span<const double> confidences, const std::vector<bool>& correct);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Correct predictions are the positive class. One point per distinct
// confidence value, from (0,0) to (1,1).
std::vector<RocPoint> roc_curve(std::span<const double> confidences,
                                const std::vector<bool>& correct);

struct SelectivePoint {
  double rate = 0.0;
  double accuracy = 0.0;
};

// For each rate, abstains on the floor(rate * n) least confident items (ties
// in input order) and reports accuracy on the rest. Rates must lie in [0, 1).
std::vector<SelectivePoint> selective_curve(std::span<const double> confidences,
                                            const std::vector<bool>& correct,
                                            std::span<const double> rates);

// IoU between the low-confidence images each method fixes (base wrong,
// method right). nullopt when neither fixes anything.
std::optional<double> corrected_iou(std::span<const std::size_t> base_predictions,
                                    std::span<const std::size_t> method_a_predictions,
                                    std::span<const std::size_t> method_b_predictions,
                                    std::span<const std::size_t> labels,
                                    const std::vector<bool>& low_mask);

// 0, 0.1, ..., 0.9
std::vector<double> default_abstention_rates();

}  // namespace hzs::evalkit

#endif  // HZS_EVALKIT_METRICS_H_
