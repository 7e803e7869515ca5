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

#include "hzs/evalkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "hzs/core/error.h"

namespace hzs::evalkit {
namespace {

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::kShape, std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::kParameter, std::string(what) + ": non-finite score");
  }
}

// Indices sorted by descending confidence; equal scores keep input order.
std::vector<std::size_t> descending_order(std::span<const double> confidences) {
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] > confidences[b];
  });
  return order;
}

}  // namespace

std::vector<bool> correctness(std::span<const std::size_t> predictions,
                              std::span<const std::size_t> labels) {
  check_same_length(predictions.size(), labels.size(), "correctness");
  std::vector<bool> out(predictions.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predictions[i] == labels[i];
  return out;
}

AccuracySplit accuracy_split(std::span<const std::size_t> predictions,
                             std::span<const std::size_t> labels,
                             const std::vector<bool>& low_mask) {
  check_same_length(predictions.size(), labels.size(), "accuracy_split");
  check_same_length(predictions.size(), low_mask.size(), "accuracy_split");
  if (predictions.empty()) fail(ErrorKind::kParameter, "accuracy_split: no predictions");
  std::size_t hit_low = 0;
  std::size_t hit_high = 0;
  AccuracySplit out;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool hit = predictions[i] == labels[i];
    if (low_mask[i]) {
      ++out.n_low;
      hit_low += hit;
    } else {
      ++out.n_high;
      hit_high += hit;
    }
  }
  if (out.n_low) out.acc_low = static_cast<double>(hit_low) / out.n_low;
  if (out.n_high) out.acc_high = static_cast<double>(hit_high) / out.n_high;
  out.acc_full = static_cast<double>(hit_low + hit_high) / predictions.size();
  return out;
}

double auc(std::span<const double> confidences, const std::vector<bool>& correct) {
  check_same_length(confidences.size(), correct.size(), "auc");
  check_finite(confidences, "auc");
  const auto positives =
      static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
  const std::size_t negatives = correct.size() - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::kUndefinedMetric, "auc: needs both correct and incorrect predictions");
  }
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidences[a] < confidences[b]; });
  // Walk tie groups in ascending order. Counts stay integral (wins are
  // doubled) so the result is exact up to the final division.
  std::uint64_t doubled_wins = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (end < order.size() && confidences[order[end]] == confidences[order[g]]) {
      correct[order[end]] ? ++pos : ++neg;
      ++end;
    }
    doubled_wins += 2 * pos * negatives_below + pos * neg;
    negatives_below += neg;
    g = end;
  }
  return static_cast<double>(doubled_wins) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::vector<RocPoint> roc_curve(std::span<const double> confidences,
                                const std::vector<bool>& correct) {
  check_same_length(confidences.size(), correct.size(), "roc_curve");
  check_finite(confidences, "roc_curve");
  const auto positives =
      static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
  const std::size_t negatives = correct.size() - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::kUndefinedMetric, "roc_curve: needs both correct and incorrect predictions");
  }
  const auto order = descending_order(confidences);
  std::vector<RocPoint> points = {{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    while (end < order.size() && confidences[order[end]] == confidences[order[g]]) {
      correct[order[end]] ? ++tp : ++fp;
      ++end;
    }
    points.push_back({static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
    g = end;
  }
  return points;
}

std::vector<SelectivePoint> selective_curve(std::span<const double> confidences,
                                            const std::vector<bool>& correct,
                                            std::span<const double> rates) {
  check_same_length(confidences.size(), correct.size(), "selective_curve");
  check_finite(confidences, "selective_curve");
  if (confidences.empty()) fail(ErrorKind::kParameter, "selective_curve: no items");
  for (double r : rates) {
    if (!(r >= 0.0 && r < 1.0)) {
      fail(ErrorKind::kParameter, "selective_curve: rate " + std::to_string(r) +
                                      " outside [0, 1)");
    }
  }
  std::vector<std::size_t> ascending(confidences.size());
  std::iota(ascending.begin(), ascending.end(), std::size_t{0});
  std::stable_sort(ascending.begin(), ascending.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] < confidences[b];
  });
  // suffix_hits[j] = correct items among ascending[j..n)
  const std::size_t n = ascending.size();
  std::vector<std::size_t> suffix_hits(n + 1, 0);
  for (std::size_t j = n; j-- > 0;) suffix_hits[j] = suffix_hits[j + 1] + correct[ascending[j]];

  std::vector<SelectivePoint> out;
  out.reserve(rates.size());
  for (double r : rates) {
    // The slack keeps nominal products such as 0.3 * 20 from rounding down a
    // whole item; at least one item always remains.
    const auto abstained = std::min(
        n - 1, static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9)));
    out.push_back({r, static_cast<double>(suffix_hits[abstained]) / (n - abstained)});
  }
  return out;
}

std::optional<double> corrected_iou(std::span<const std::size_t> base_predictions,
                                    std::span<const std::size_t> method_a_predictions,
                                    std::span<const std::size_t> method_b_predictions,
                                    std::span<const std::size_t> labels,
                                    const std::vector<bool>& low_mask) {
  const std::size_t n = labels.size();
  check_same_length(base_predictions.size(), n, "corrected_iou");
  check_same_length(method_a_predictions.size(), n, "corrected_iou");
  check_same_length(method_b_predictions.size(), n, "corrected_iou");
  check_same_length(low_mask.size(), n, "corrected_iou");
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!low_mask[i] || base_predictions[i] == labels[i]) continue;
    const bool a = method_a_predictions[i] == labels[i];
    const bool b = method_b_predictions[i] == labels[i];
    both += a && b;
    either += a || b;
  }
  if (either == 0) return std::nullopt;
  return static_cast<double>(both) / static_cast<double>(either);
}

std::vector<double> default_abstention_rates() {
  std::vector<double> rates;
  for (int k = 0; k < 10; ++k) rates.push_back(k / 10.0);
  return rates;
}

}  // namespace hzs::evalkit
