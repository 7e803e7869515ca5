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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <set>

#include "hzs/core/error.h"
#include "hzs/zeroshot/zeroshot.h"
#include "support.h"

namespace hzs::zeroshot {
namespace {

using hzs::testing::Gen;

EmbeddingMatrix rows(std::vector<std::vector<float>> r) {
  std::vector<float> data;
  for (const auto& v : r) data.insert(data.end(), v.begin(), v.end());
  return EmbeddingMatrix::from_rows(hzs::testing::make_ids("r", r.size()), r[0].size(), data);
}

LogitMatrix literal(std::size_t images, std::vector<float> values) {
  LogitMatrix l;
  l.images = images;
  l.classes = values.size() / images;
  l.values = std::move(values);
  return l;
}

TEST(Logits, CosineOfUnitRows) {
  const auto img = rows({{1, 0, 0}});
  const auto txt = rows({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}});
  const auto l = logits(img, txt);
  EXPECT_FLOAT_EQ(l.at(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(l.at(0, 1), 0.0f);
  EXPECT_FLOAT_EQ(l.at(0, 2), -1.0f);
}

TEST(Logits, DimMismatchIsShapeError) {
  try {
    logits(rows({{1, 0, 0}}), rows({{1, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Logits, SymmetricAndBounded) {
  Gen g(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = g.index(1, 12);
    const auto a = hzs::testing::random_matrix(g, g.index(1, 9), dim);
    const auto b = hzs::testing::random_matrix(g, g.index(1, 9), dim);
    const auto ab = logits(a, b);
    const auto ba = logits(b, a);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < b.rows(); ++j) {
        EXPECT_EQ(ab.at(i, j), ba.at(j, i));
        EXPECT_LE(std::abs(ab.at(i, j)), 1.0f + 1e-5f);
      }
    }
  }
}

TEST(TopK, TieGoesToLowerIndex) {
  const auto t = top_k(literal(1, {0.2f, 0.9f, 0.9f}), 1);
  EXPECT_EQ(t.indices(0)[0], 1u);
}

TEST(TopK, OrdersBestFirst) {
  const auto t = top_k(literal(1, {0.1f, 0.5f, 0.3f}), 2);
  EXPECT_EQ(t.indices(0)[0], 1u);
  EXPECT_EQ(t.indices(0)[1], 2u);
  EXPECT_FLOAT_EQ(t.row_scores(0)[0], 0.5f);
  EXPECT_FLOAT_EQ(t.row_scores(0)[1], 0.3f);
}

TEST(TopK, OutOfRangeIsParameterError) {
  const auto l = literal(1, {0.1f, 0.5f, 0.3f});
  for (std::size_t k : {std::size_t{0}, std::size_t{4}}) {
    try {
      top_k(l, k);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParameter);
    }
  }
}

TEST(TopK, PropertiesOnRandomLogits) {
  Gen g(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t images = g.index(1, 6);
    const std::size_t classes = g.index(1, 12);
    std::vector<float> v(images * classes);
    // Coarse grid so ties are common.
    for (float& x : v) x = static_cast<float>(g.index(0, 4)) / 4.0f;
    const auto l = literal(images, v);
    const std::size_t k = g.index(1, classes);
    const auto t = top_k(l, k);
    const auto full = top_k(l, classes);
    for (std::size_t i = 0; i < images; ++i) {
      // Oracle: stable sort of indices by descending score.
      std::vector<std::size_t> order(classes);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return l.at(i, a) > l.at(i, b); });
      for (std::size_t r = 0; r < k; ++r) EXPECT_EQ(t.indices(i)[r], order[r]);
      for (std::size_t r = 0; r + 1 < k; ++r) EXPECT_GE(t.row_scores(i)[r], t.row_scores(i)[r + 1]);
      const std::set<std::size_t> all(full.indices(i).begin(), full.indices(i).end());
      EXPECT_EQ(all.size(), classes);
      EXPECT_EQ(argmax(l)[i], order[0]);
      EXPECT_DOUBLE_EQ(max_logit(l)[i], static_cast<double>(l.at(i, order[0])));
    }
  }
}

PromptBank bank_of(std::vector<EmbeddingMatrix> m) {
  PromptBank b;
  b.class_ids = m[0].ids();
  for (std::size_t t = 0; t < m.size(); ++t) {
    b.templates.push_back(t == 0 ? "{label}" : "t" + std::to_string(t) + " {label}");
  }
  b.matrices = std::move(m);
  return b;
}

TEST(Ensemble, SingletonReproducesLogitsBitwise) {
  Gen g(4);
  const auto bank = hzs::testing::random_bank(g, 4, 5, 7);
  const auto img = hzs::testing::random_matrix(g, 9, 7, "img");
  const std::vector<std::size_t> subset = {0};
  const auto e = ensemble_logits(img, bank, subset);
  const auto l = logits(img, bank.bare());
  ASSERT_EQ(e.values.size(), l.values.size());
  EXPECT_EQ(std::memcmp(e.values.data(), l.values.data(), l.values.size() * 4), 0);
}

TEST(Ensemble, MeanOfTwo) {
  // Class row directions chosen so the two templates give 0.2 and 0.4.
  const auto img = rows({{1, 0}});
  const auto t0 = rows({{0.2f, std::sqrt(1 - 0.04f)}});
  const auto t1 = rows({{0.4f, std::sqrt(1 - 0.16f)}});
  const auto bank = bank_of({t0, t1});
  const std::vector<std::size_t> subset = {0, 1};
  EXPECT_NEAR(ensemble_logits(img, bank, subset).at(0, 0), 0.3f, 1e-6);
}

TEST(Ensemble, MatchesBruteForceMean) {
  Gen g(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bank = hzs::testing::random_bank(g, 6, 3, 5);
    const auto img = hzs::testing::random_matrix(g, 4, 5, "img");
    const std::vector<std::size_t> subset = {1, 2, 4, 5};
    const auto e = ensemble_logits(img, bank, subset);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t t : subset) {
          for (std::size_t d = 0; d < 5; ++d) {
            sum += static_cast<double>(img.row(i)[d]) * bank.matrices[t].row(c)[d];
          }
        }
        EXPECT_NEAR(e.at(i, c), sum / 4.0, 1e-6);
      }
    }
  }
}

TEST(Ensemble, PartitionWeightedMeanMatchesFullSet) {
  Gen g(17);
  const auto bank = hzs::testing::random_bank(g, 9, 4, 6);
  const auto img = hzs::testing::random_matrix(g, 5, 6, "img");
  const std::vector<std::size_t> all = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<std::size_t> a = {0, 3, 5};
  const std::vector<std::size_t> b = {1, 2, 4, 6, 7, 8};
  const auto full = ensemble_logits(img, bank, all);
  const auto ea = ensemble_logits(img, bank, a);
  const auto eb = ensemble_logits(img, bank, b);
  for (std::size_t i = 0; i < full.values.size(); ++i) {
    EXPECT_NEAR(full.values[i], (3.0 * ea.values[i] + 6.0 * eb.values[i]) / 9.0, 1e-6);
  }
}

TEST(Ensemble, EmptySubsetIsParameterError) {
  Gen g(1);
  const auto bank = hzs::testing::random_bank(g, 2, 2, 3);
  const auto img = hzs::testing::random_matrix(g, 1, 3);
  try {
    ensemble_logits(img, bank, std::vector<std::size_t>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParameter);
  }
}

}  // namespace
}  // namespace hzs::zeroshot
