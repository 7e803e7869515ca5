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

#include "hzs/zeroshot/zeroshot.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "hzs/core/error.h"
#include "hzs/core/parallel.h"

namespace hzs::zeroshot {

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    acc += static_cast<double>(a[d]) * static_cast<double>(b[d]);
  }
  return acc;
}

LogitMatrix logits(const EmbeddingMatrix& images, const EmbeddingMatrix& texts) {
  if (images.dim() != texts.dim()) {
    fail(ErrorKind::kShape, "logits: image dim " + std::to_string(images.dim()) +
                                " != text dim " + std::to_string(texts.dim()));
  }
  LogitMatrix out{images.rows(), texts.rows(),
                  std::vector<float>(images.rows() * texts.rows())};
  parallel_for(images.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = images.row(i);
      for (std::size_t c = 0; c < texts.rows(); ++c) {
        out.values[i * out.classes + c] = static_cast<float>(dot(x, texts.row(c)));
      }
    }
  });
  return out;
}

TopK top_k(const LogitMatrix& logits, std::size_t k) {
  if (k < 1 || k > logits.classes) {
    fail(ErrorKind::kParameter, "top_k: k=" + std::to_string(k) + " outside [1, " +
                                    std::to_string(logits.classes) + "]");
  }
  TopK out;
  out.k = k;
  out.class_indices.resize(logits.images * k);
  out.scores.resize(logits.images * k);
  parallel_for(logits.images, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> order(logits.classes);
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = logits.row(i);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::partial_sort(order.begin(), order.begin() + k, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return row[a] > row[b] || (row[a] == row[b] && a < b);
                        });
      for (std::size_t r = 0; r < k; ++r) {
        out.class_indices[i * k + r] = order[r];
        out.scores[i * k + r] = row[order[r]];
      }
    }
  });
  return out;
}

std::vector<std::size_t> argmax(const LogitMatrix& logits) {
  std::vector<std::size_t> out(logits.images, 0);
  for (std::size_t i = 0; i < logits.images; ++i) {
    const auto row = logits.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[i] = best;
  }
  return out;
}

std::vector<double> max_logit(const LogitMatrix& logits) {
  std::vector<double> out(logits.images, 0.0);
  for (std::size_t i = 0; i < logits.images; ++i) {
    const auto row = logits.row(i);
    out[i] = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
  }
  return out;
}

LogitMatrix ensemble_logits(const EmbeddingMatrix& images, const PromptBank& bank,
                            std::span<const std::size_t> template_subset) {
  if (template_subset.empty()) {
    fail(ErrorKind::kParameter, "ensemble_logits: empty template subset");
  }
  for (std::size_t t : template_subset) {
    if (t >= bank.matrices.size()) {
      fail(ErrorKind::kParameter, "ensemble_logits: template index " + std::to_string(t) +
                                      " outside bank of " +
                                      std::to_string(bank.matrices.size()));
    }
    if (bank.matrices[t].dim() != images.dim()) {
      fail(ErrorKind::kShape, "ensemble_logits: template " + std::to_string(t) +
                                  " dim differs from image dim");
    }
  }
  const std::size_t classes = bank.classes();
  const double count = static_cast<double>(template_subset.size());
  LogitMatrix out{images.rows(), classes, std::vector<float>(images.rows() * classes)};
  parallel_for(images.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = images.row(i);
      for (std::size_t c = 0; c < classes; ++c) {
        double sum = 0.0;
        for (std::size_t t : template_subset) sum += dot(x, bank.matrices[t].row(c));
        out.values[i * classes + c] = static_cast<float>(sum / count);
      }
    }
  });
  return out;
}

}  // namespace hzs::zeroshot
