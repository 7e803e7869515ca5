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

#include "hzs/evalkit/report.h"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <sstream>

#include "hzs/confidence/confidence.h"
#include "hzs/core/error.h"

namespace hzs::evalkit {
namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * *v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits) {
  return v ? fixed(*v, digits) : "n/a";
}

ConfidenceBlock score_block(const std::vector<double>& confidence,
                            const std::vector<bool>& correct,
                            const std::vector<double>& rates) {
  ConfidenceBlock block;
  const auto hits = std::count(correct.begin(), correct.end(), true);
  if (hits > 0 && hits < static_cast<std::ptrdiff_t>(correct.size())) {
    block.auc = auc(confidence, correct);
    block.roc_points = roc_curve(confidence, correct);
  }
  block.selective_curve = selective_curve(confidence, correct, rates);
  return block;
}

nlohmann::ordered_json block_json(const ConfidenceBlock& b) {
  nlohmann::ordered_json j;
  j["auc"] = optional_json(b.auc);
  j["roc_points"] = nlohmann::ordered_json::array();
  for (const auto& p : b.roc_points) j["roc_points"].push_back({p.fpr, p.tpr});
  j["selective_curve"] = nlohmann::ordered_json::array();
  for (const auto& p : b.selective_curve) j["selective_curve"].push_back({p.rate, p.accuracy});
  return j;
}

}  // namespace

std::vector<double> default_sweep_taus() { return {0.47, 0.52, 0.57, 0.62, 0.66, 0.70}; }

std::vector<SweepRow> sweep_threshold(const SweepInputs& inputs, std::span<const double> taus) {
  if (taus.empty()) fail(ErrorKind::kParameter, "sweep_threshold: no taus");
  const std::size_t n = inputs.labels.size();
  if (inputs.s_prompt.size() != n || inputs.s_image.size() != n ||
      inputs.base_predictions.size() != n || inputs.reranked_predictions.size() != n) {
    fail(ErrorKind::kShape, "sweep_threshold: inputs cover different image counts");
  }
  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    const auto flag_prompt = confidence::threshold_flags(inputs.s_prompt, tau);
    const auto flag_image = confidence::threshold_flags(inputs.s_image, tau);
    std::vector<bool> low(n);
    std::vector<std::size_t> merged = inputs.base_predictions;
    for (std::size_t i = 0; i < n; ++i) {
      low[i] = flag_prompt[i] || flag_image[i];
      if (low[i]) merged[i] = inputs.reranked_predictions[i];
    }
    const auto split = accuracy_split(merged, inputs.labels, low);
    rows.push_back({tau, split.n_low, split.acc_low, split.acc_full});
  }
  return rows;
}

EvalReport evaluate(const EvalInputs& in) {
  const std::size_t n = in.labels.size();
  if (in.base_predictions.size() != n || in.final_predictions.size() != n ||
      in.low_mask.size() != n || in.confidence.size() != n ||
      in.baseline_confidence.size() != n) {
    fail(ErrorKind::kShape, "evaluate: inputs cover different image counts");
  }
  EvalReport r;
  r.n = n;
  const auto merged = accuracy_split(in.final_predictions, in.labels, in.low_mask);
  const auto base = accuracy_split(in.base_predictions, in.labels, in.low_mask);
  r.n_low = merged.n_low;
  r.acc_low = merged.acc_low;
  r.acc_high = merged.acc_high;
  r.acc_full = merged.acc_full;
  r.base_acc_low = base.acc_low;
  r.base_acc_high = base.acc_high;
  r.base_acc_full = base.acc_full;
  const auto correct = correctness(in.base_predictions, in.labels);
  r.self_consistency = score_block(in.confidence, correct, in.rates);
  r.max_logit = score_block(in.baseline_confidence, correct, in.rates);
  return r;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["n_low"] = r.n_low;
  j["acc_full"] = r.acc_full;
  j["acc_low"] = optional_json(r.acc_low);
  j["acc_high"] = optional_json(r.acc_high);
  j["base"] = {{"acc_full", r.base_acc_full},
               {"acc_low", optional_json(r.base_acc_low)},
               {"acc_high", optional_json(r.base_acc_high)}};
  j["self_consistency"] = block_json(r.self_consistency);
  j["max_logit"] = block_json(r.max_logit);
  j["sweep"] = nlohmann::ordered_json::array();
  for (const auto& row : r.sweep) {
    j["sweep"].push_back({{"tau", row.tau},
                          {"n_low", row.n_low},
                          {"acc_low", optional_json(row.acc_low)},
                          {"acc_full", row.acc_full}});
  }
  return j;
}

std::string to_text_table(const EvalReport& r) {
  std::ostringstream out;
  out << "images            " << r.n << "\n";
  out << "low-confidence    " << r.n_low << "\n\n";
  out << "subset      base        reranked\n";
  out << "low         " << percent(r.base_acc_low) << "      " << percent(r.acc_low) << "\n";
  out << "high        " << percent(r.base_acc_high) << "      " << percent(r.acc_high) << "\n";
  out << "full        " << percent(r.base_acc_full) << "      " << percent(r.acc_full) << "\n\n";
  out << "AUC self-consistency  " << fixed(r.self_consistency.auc, 4) << "\n";
  out << "AUC max-logit         " << fixed(r.max_logit.auc, 4) << "\n";
  if (!r.sweep.empty()) {
    out << "\ntau    n_low   acc_low   acc_full\n";
    for (const auto& row : r.sweep) {
      out << fixed(row.tau, 2) << "   " << row.n_low << "   " << percent(row.acc_low) << "   "
          << percent(row.acc_full) << "\n";
    }
  }
  return out.str();
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::ostringstream out;
  out << "fpr,tpr\n";
  for (const auto& p : points) out << fixed(p.fpr, 8) << "," << fixed(p.tpr, 8) << "\n";
  return out.str();
}

std::string selective_csv(const std::vector<SelectivePoint>& method,
                          const std::vector<SelectivePoint>& baseline) {
  if (method.size() != baseline.size()) {
    fail(ErrorKind::kShape, "selective_csv: curves have different lengths");
  }
  std::ostringstream out;
  out << "rate,accuracy,baseline_accuracy\n";
  for (std::size_t i = 0; i < method.size(); ++i) {
    out << fixed(method[i].rate, 4) << "," << fixed(method[i].accuracy, 8) << ","
        << fixed(baseline[i].accuracy, 8) << "\n";
  }
  return out.str();
}

}  // namespace hzs::evalkit
