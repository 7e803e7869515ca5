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

#include "hzs/embedstore/embedding_matrix.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hzs/core/error.h"
#include "hzs/core/json_io.h"

namespace hzs::embedstore {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 12;

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

float read_f32_le(const unsigned char* p) {
  return std::bit_cast<float>(read_u32_le(p));
}

void put_f32_le(std::string& out, float v) {
  put_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

}  // namespace

double l2_norm(std::span<const float> row) {
  double sq = 0.0;
  for (float v : row) sq += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(sq);
}

double normalize_in_place(std::span<float> row) {
  const double norm = l2_norm(row);
  if (norm == 0.0 || std::abs(norm - 1.0) <= kUnitSlack) return norm;
  for (float& v : row) v = static_cast<float>(static_cast<double>(v) / norm);
  return norm;
}

EmbeddingMatrix EmbeddingMatrix::from_rows(std::vector<std::string> ids,
                                           std::size_t dim,
                                           std::vector<float> data,
                                           std::vector<double> raw_norms,
                                           nlohmann::json meta) {
  if (dim == 0) fail(ErrorKind::kFormat, "embedding dim must be positive");
  if (data.size() != ids.size() * dim) {
    fail(ErrorKind::kShape, "payload holds " + std::to_string(data.size()) +
                                " floats, expected " + std::to_string(ids.size()) +
                                " rows x " + std::to_string(dim));
  }
  if (!raw_norms.empty() && raw_norms.size() != ids.size()) {
    fail(ErrorKind::kFormat, "raw_norms has " + std::to_string(raw_norms.size()) +
                                 " entries for " + std::to_string(ids.size()) + " rows");
  }

  EmbeddingMatrix m;
  m.dim_ = dim;
  m.index_.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!m.index_.emplace(ids[i], i).second) {
      fail(ErrorKind::kFormat, "duplicate row id '" + ids[i] + "'");
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::span<float> row(data.data() + i * dim, dim);
    for (float v : row) {
      if (!std::isfinite(v)) {
        fail(ErrorKind::kData, "non-finite value in row '" + ids[i] + "'");
      }
    }
    if (normalize_in_place(row) == 0.0) {
      fail(ErrorKind::kData, "zero-norm row '" + ids[i] + "'");
    }
  }
  m.data_ = std::move(data);
  m.ids_ = std::move(ids);
  m.raw_norms_ = std::move(raw_norms);
  m.meta_ = std::move(meta);
  return m;
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::filesystem::path manifest_path(const std::filesystem::path& matrix_path) {
  return std::filesystem::path(matrix_path.string() + ".manifest.json");
}

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kFormat, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorKind::kFormat, path.string() + ": missing EMB1 magic");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = read_u32_le(p + 4);
  const std::uint64_t dim = read_u32_le(p + 8);
  const std::uint64_t expected = kHeaderBytes + rows * dim * 4;
  if (bytes.size() != expected) {
    fail(ErrorKind::kTruncation,
         path.string() + ": payload is " + std::to_string(bytes.size() - kHeaderBytes) +
             " bytes, header promises " + std::to_string(rows * dim * 4));
  }

  const nlohmann::json manifest = read_json_file(manifest_path(path));
  if (!manifest.is_object() || !manifest.contains("ids") || !manifest["ids"].is_array()) {
    fail(ErrorKind::kFormat, manifest_path(path).string() + ": missing \"ids\" array");
  }
  std::vector<std::string> ids;
  std::vector<double> raw_norms;
  nlohmann::json meta = nlohmann::json::object();
  try {
    ids = manifest["ids"].get<std::vector<std::string>>();
    if (manifest.contains("raw_norms") && !manifest["raw_norms"].is_null()) {
      raw_norms = manifest["raw_norms"].get<std::vector<double>>();
    }
    if (manifest.contains("meta") && manifest["meta"].is_object()) meta = manifest["meta"];
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, manifest_path(path).string() + ": " + e.what());
  }
  if (ids.size() != rows) {
    fail(ErrorKind::kFormat, manifest_path(path).string() + ": " +
                                 std::to_string(ids.size()) + " ids for " +
                                 std::to_string(rows) + " rows");
  }

  std::vector<float> data(rows * dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = read_f32_le(p + kHeaderBytes + 4 * i);
  }
  try {
    return EmbeddingMatrix::from_rows(std::move(ids), dim, std::move(data),
                                      std::move(raw_norms), std::move(meta));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path,
                  const std::vector<std::string>& ids, std::size_t dim,
                  std::span<const float> data, std::vector<double> raw_norms,
                  const nlohmann::json& meta) {
  if (data.size() != ids.size() * dim) {
    fail(ErrorKind::kShape, "write_matrix: data size does not match ids x dim");
  }
  if (raw_norms.empty()) {
    raw_norms.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      raw_norms.push_back(l2_norm(data.subspan(i * dim, dim)));
    }
  }
  std::string out;
  out.reserve(kHeaderBytes + data.size() * 4);
  out.append(kMagic, 4);
  put_u32_le(out, static_cast<std::uint32_t>(ids.size()));
  put_u32_le(out, static_cast<std::uint32_t>(dim));
  for (float v : data) put_f32_le(out, v);
  write_text_file(path, out);

  nlohmann::json manifest;
  manifest["ids"] = ids;
  manifest["raw_norms"] = raw_norms;
  manifest["meta"] = meta;
  write_json_file(manifest_path(path), manifest);
}

void write_matrix(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  write_matrix(path, m.ids(), m.dim(), m.data(), m.raw_norms(), m.meta());
}

}  // namespace hzs::embedstore
