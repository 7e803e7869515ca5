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

#ifndef HZS_EVALKIT_REPORT_H_
#define HZS_EVALKIT_REPORT_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hzs/evalkit/metrics.h"
#include "json.hpp"

namespace hzs::evalkit {

// One row of a confidence-threshold sweep. Accuracies use the merged
// predictions (reranked where flagged).
struct SweepRow {
  double tau = 0.0;
  std::size_t n_low = 0;
  std::optional<double> acc_low;
  double acc_full = 0.0;
};

struct SweepInputs {
  std::vector<double> s_prompt;
  std::vector<double> s_image;
  std::vector<std::size_t> base_predictions;
  std::vector<std::size_t> reranked_predictions;  // rerank output for every image
  std::vector<std::size_t> labels;
};

// Flags score <= tau on either channel (tau_t = tau_i = tau). Rows follow the
// order of taus.
std::vector<SweepRow> sweep_threshold(const SweepInputs& inputs, std::span<const double> taus);

// The taus of the threshold ablation.
std::vector<double> default_sweep_taus();

// auc is nullopt and roc_points empty when every base prediction is correct
// (or every one wrong).
struct ConfidenceBlock {
  std::optional<double> auc;
  std::vector<RocPoint> roc_points;
  std::vector<SelectivePoint> selective_curve;
};

struct EvalReport {
  std::size_t n = 0;
  std::size_t n_low = 0;
  // Merged predictions (after reranking the low-confidence set).
  std::optional<double> acc_low;
  std::optional<double> acc_high;
  double acc_full = 0.0;
  // Base zero-shot predictions.
  std::optional<double> base_acc_low;
  std::optional<double> base_acc_high;
  double base_acc_full = 0.0;
  ConfidenceBlock self_consistency;
  ConfidenceBlock max_logit;
  std::vector<SweepRow> sweep;
};

struct EvalInputs {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> base_predictions;
  std::vector<std::size_t> final_predictions;
  std::vector<bool> low_mask;
  std::vector<double> confidence;           // self-consistency score
  std::vector<double> baseline_confidence;  // max logit
  std::vector<double> rates = default_abstention_rates();
};

// ROC/AUC and selective curves score the correctness of the base predictions.
EvalReport evaluate(const EvalInputs& inputs);

nlohmann::ordered_json to_json(const EvalReport& report);
std::string to_text_table(const EvalReport& report);
std::string roc_csv(const std::vector<RocPoint>& points);
std::string selective_csv(const std::vector<SelectivePoint>& method,
                          const std::vector<SelectivePoint>& baseline);

}  // namespace hzs::evalkit

#endif  // HZS_EVALKIT_REPORT_H_
