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

#ifndef HZS_ZEROSHOT_ZEROSHOT_H_
#define HZS_ZEROSHOT_ZEROSHOT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "hzs/embedstore/bundle.h"
#include "hzs/embedstore/embedding_matrix.h"

namespace hzs::zeroshot {

using embedstore::EmbeddingMatrix;
using embedstore::PromptBank;

// images x classes cosine logits, row-major.
struct LogitMatrix {
  std::size_t images = 0;
  std::size_t classes = 0;
  std::vector<float> values;

  float at(std::size_t i, std::size_t c) const { return values[i * classes + c]; }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * classes, classes};
  }
};

// Per-image best k classes, best first. Flattened images x k.
struct TopK {
  std::size_t k = 0;
  std::vector<std::size_t> class_indices;
  std::vector<float> scores;

  std::size_t images() const { return k == 0 ? 0 : class_indices.size() / k; }
  std::span<const std::size_t> indices(std::size_t i) const {
    return {class_indices.data() + i * k, k};
  }
  std::span<const float> row_scores(std::size_t i) const {
    return {scores.data() + i * k, k};
  }
};

// Dot product accumulated in double.
double dot(std::span<const float> a, std::span<const float> b);

LogitMatrix logits(const EmbeddingMatrix& images, const EmbeddingMatrix& texts);

// Ties go to the lower class index.
TopK top_k(const LogitMatrix& logits, std::size_t k);

// Index of the best class per row, lowest index on ties.
std::vector<std::size_t> argmax(const LogitMatrix& logits);

// Row-wise maximum logit (the max-logit confidence baseline).
std::vector<double> max_logit(const LogitMatrix& logits);

// Mean over the template subset of the per-template logits, accumulated in
// double. A singleton subset reproduces logits() bitwise.
LogitMatrix ensemble_logits(const EmbeddingMatrix& images, const PromptBank& bank,
                            std::span<const std::size_t> template_subset);

}  // namespace hzs::zeroshot

#endif  // HZS_ZEROSHOT_ZEROSHOT_H_
