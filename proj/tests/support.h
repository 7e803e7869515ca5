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

// Shared fixtures for the unit tests: a seeded generator for hand-rolled
// property tests, scratch directories, random embedding fixtures and naive
// recount oracles that deliberately share no code with the library.

#ifndef HZS_TESTS_SUPPORT_H_
#define HZS_TESTS_SUPPORT_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hzs/embedstore/bundle.h"
#include "hzs/embedstore/embedding_matrix.h"

namespace hzs::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool coin(double p = 0.5) { return uniform() < p; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Unique directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hzs-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> make_ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

inline std::vector<float> gaussian_rows(Gen& g, std::size_t rows, std::size_t dim) {
  std::vector<float> data(rows * dim);
  for (float& v : data) v = static_cast<float>(g.normal());
  return data;
}

inline embedstore::EmbeddingMatrix random_matrix(Gen& g, std::size_t rows, std::size_t dim,
                                                 const std::string& prefix = "r") {
  return embedstore::EmbeddingMatrix::from_rows(make_ids(prefix, rows), dim,
                                                gaussian_rows(g, rows, dim));
}

// Copy of base with gaussian jitter on every coordinate. Moderate jitter makes
// argmax outcomes differ between copies on a minority of rows.
inline embedstore::EmbeddingMatrix jittered_matrix(Gen& g, const embedstore::EmbeddingMatrix& base,
                                                   double jitter) {
  std::vector<float> data(base.rows() * base.dim());
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (std::size_t d = 0; d < base.dim(); ++d) {
      data[r * base.dim() + d] = static_cast<float>(base.row(r)[d] + jitter * g.normal());
    }
  }
  return embedstore::EmbeddingMatrix::from_rows(base.ids(), base.dim(), std::move(data));
}

// Bank with n_templates entries including the bare name at index 0.
inline embedstore::PromptBank random_bank(Gen& g, std::size_t n_templates, std::size_t classes,
                                          std::size_t dim, double jitter = 0.4) {
  embedstore::PromptBank bank;
  bank.class_ids = make_ids("c", classes);
  const auto bare = random_matrix(g, classes, dim, "c");
  bank.templates.push_back("{label}");
  bank.matrices.push_back(bare);
  for (std::size_t t = 1; t < n_templates; ++t) {
    bank.templates.push_back("template " + std::to_string(t) + " {label}");
    bank.matrices.push_back(jittered_matrix(g, bare, jitter / std::sqrt(dim)));
  }
  return bank;
}

// Images sit near class rows of the bank's bare matrix; extra channels are
// jittered copies of the raw channel.
inline embedstore::ImageBundle random_bundle(Gen& g, const embedstore::PromptBank& bank,
                                             std::size_t images, std::size_t channels,
                                             double noise = 0.8, double jitter = 0.3) {
  embedstore::ImageBundle b;
  b.image_ids = make_ids("img", images);
  const std::size_t dim = bank.dim();
  std::vector<std::size_t> labels(images);
  std::vector<float> data(images * dim);
  for (std::size_t i = 0; i < images; ++i) {
    labels[i] = g.index(0, bank.classes() - 1);
    for (std::size_t d = 0; d < dim; ++d) {
      data[i * dim + d] =
          static_cast<float>(bank.bare().row(labels[i])[d] + noise * g.normal() / std::sqrt(dim));
    }
  }
  b.labels = labels;
  b.perturbations.push_back("raw");
  b.matrices.push_back(embedstore::EmbeddingMatrix::from_rows(b.image_ids, dim, data));
  for (std::size_t c = 1; c < channels; ++c) {
    b.perturbations.push_back(c == 1 ? "flip-lr" : "aug" + std::to_string(c));
    b.matrices.push_back(jittered_matrix(g, b.matrices[0], jitter / std::sqrt(dim)));
  }
  return b;
}

// Oracle: per-image best class by double-precision cosine, first index wins
// ties. Independent of the library's logit and top-k code.
inline std::vector<std::size_t> naive_argmax(const embedstore::EmbeddingMatrix& images,
                                             const embedstore::EmbeddingMatrix& texts) {
  std::vector<std::size_t> out(images.rows());
  for (std::size_t i = 0; i < images.rows(); ++i) {
    float best = 0.0f;
    for (std::size_t c = 0; c < texts.rows(); ++c) {
      double s = 0.0;
      for (std::size_t d = 0; d < images.dim(); ++d) {
        s += static_cast<double>(images.row(i)[d]) * static_cast<double>(texts.row(c)[d]);
      }
      const float f = static_cast<float>(s);
      if (c == 0 || f > best) {
        best = f;
        out[i] = c;
      }
    }
  }
  return out;
}

}  // namespace hzs::testing

#endif  // HZS_TESTS_SUPPORT_H_
