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

#ifndef HZS_EMBEDSTORE_EMBEDDING_MATRIX_H_
#define HZS_EMBEDSTORE_EMBEDDING_MATRIX_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace hzs::embedstore {

// Rows already within this distance of unit norm are left untouched by
// normalization, which makes normalize(normalize(x)) == normalize(x) bitwise.
inline constexpr double kUnitSlack = 1e-6;

// Row-indexed store of unit vectors. Immutable once constructed; every
// constructor path validates and normalizes.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  // Validates and L2-normalizes raw row-major data. raw_norms are the
  // pre-normalization norms as recorded by an exporter; leave empty when
  // they were not recorded.
  static EmbeddingMatrix from_rows(std::vector<std::string> ids,
                                   std::size_t dim, std::vector<float> data,
                                   std::vector<double> raw_norms = {},
                                   nlohmann::json meta = nlohmann::json::object());

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const float> data() const { return data_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& raw_norms() const { return raw_norms_; }
  bool has_raw_norms() const { return !raw_norms_.empty(); }
  const nlohmann::json& meta() const { return meta_; }

  std::optional<std::size_t> find(std::string_view id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<std::string> ids_;
  std::vector<double> raw_norms_;
  nlohmann::json meta_ = nlohmann::json::object();
  std::unordered_map<std::string, std::size_t> index_;
};

// Scales the row to unit L2 norm (norm accumulated in double). Returns the
// norm before scaling; the row is untouched when that norm is zero or already
// within kUnitSlack of 1.
double normalize_in_place(std::span<float> row);

double l2_norm(std::span<const float> row);

std::filesystem::path manifest_path(const std::filesystem::path& matrix_path);

// Reads an EMB1 container and its sidecar manifest.
EmbeddingMatrix load_matrix(const std::filesystem::path& path);

// Writes the rows exactly as given (no normalization) plus the manifest.
// When raw_norms is empty the norms of the written rows are recorded.
void write_matrix(const std::filesystem::path& path,
                  const std::vector<std::string>& ids, std::size_t dim,
                  std::span<const float> data,
                  std::vector<double> raw_norms = {},
                  const nlohmann::json& meta = nlohmann::json::object());

// Writes a loaded matrix back out, carrying its recorded raw norms.
void write_matrix(const std::filesystem::path& path, const EmbeddingMatrix& m);

}  // namespace hzs::embedstore

#endif  // HZS_EMBEDSTORE_EMBEDDING_MATRIX_H_
