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

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "hzs/core/error.h"
#include "hzs/core/json_io.h"
#include "hzs/embedstore/bundle.h"
#include "hzs/embedstore/embedding_matrix.h"
#include "support.h"

namespace hzs::embedstore {
namespace {

using hzs::testing::Gen;
using hzs::testing::ScratchDir;

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an hzs::Error";
  return ErrorKind::kFormat;
}

// Little-endian EMB1 bytes built by hand, independent of write_matrix.
std::string emb1_bytes(std::uint32_t rows, std::uint32_t dim, const std::vector<float>& data) {
  std::string out = "EMB1";
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  u32(rows);
  u32(dim);
  for (float f : data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    u32(bits);
  }
  return out;
}

void put_file(const std::filesystem::path& p, const std::string& bytes,
              const std::vector<std::string>& ids) {
  std::ofstream(p, std::ios::binary) << bytes;
  nlohmann::json m;
  m["ids"] = ids;
  m["raw_norms"] = nullptr;
  m["meta"] = nlohmann::json::object();
  write_json_file(manifest_path(p), m);
}

TEST(LoadMatrix, NormalizesRowsAtLoad) {
  ScratchDir dir;
  put_file(dir / "m.emb", emb1_bytes(2, 3, {1, 0, 0, 0, 2, 0}), {"a", "b"});
  const auto m = load_matrix(dir / "m.emb");
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.dim(), 3u);
  EXPECT_EQ(std::vector<float>(m.row(0).begin(), m.row(0).end()), (std::vector<float>{1, 0, 0}));
  EXPECT_EQ(std::vector<float>(m.row(1).begin(), m.row(1).end()), (std::vector<float>{0, 1, 0}));
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"a", "b"}));
}

TEST(LoadMatrix, ShortPayloadIsTruncation) {
  ScratchDir dir;
  std::string bytes = emb1_bytes(2, 3, {1, 0, 0, 0, 2, 0});
  bytes.resize(bytes.size() - 4);
  put_file(dir / "m.emb", bytes, {"a", "b"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.emb"); }), ErrorKind::kTruncation);
}

TEST(LoadMatrix, BadMagicIsFormatError) {
  ScratchDir dir;
  std::string bytes = emb1_bytes(1, 2, {1, 0});
  bytes[3] = '2';
  put_file(dir / "m.emb", bytes, {"a"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.emb"); }), ErrorKind::kFormat);
}

TEST(LoadMatrix, ZeroRowIsDataErrorNamingRow) {
  ScratchDir dir;
  put_file(dir / "m.emb", emb1_bytes(2, 2, {1, 0, 0, 0}), {"keep", "hollow"});
  try {
    load_matrix(dir / "m.emb");
    FAIL() << "zero row accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find("hollow"), std::string::npos);
  }
}

TEST(LoadMatrix, NonFiniteIsDataError) {
  ScratchDir dir;
  put_file(dir / "m.emb", emb1_bytes(1, 2, {std::numeric_limits<float>::quiet_NaN(), 1}), {"a"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.emb"); }), ErrorKind::kData);
  put_file(dir / "n.emb", emb1_bytes(1, 2, {std::numeric_limits<float>::infinity(), 1}), {"a"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "n.emb"); }), ErrorKind::kData);
}

TEST(LoadMatrix, IdCountMismatchAndDuplicatesAreFormatErrors) {
  ScratchDir dir;
  put_file(dir / "m.emb", emb1_bytes(2, 2, {1, 0, 0, 1}), {"a"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.emb"); }), ErrorKind::kFormat);
  put_file(dir / "n.emb", emb1_bytes(2, 2, {1, 0, 0, 1}), {"a", "a"});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "n.emb"); }), ErrorKind::kFormat);
}

TEST(LoadMatrix, MissingManifestIsFormatError) {
  ScratchDir dir;
  std::ofstream(dir / "m.emb", std::ios::binary) << emb1_bytes(1, 2, {1, 0});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "m.emb"); }), ErrorKind::kFormat);
}

TEST(WriteMatrix, HeaderIsBitExact) {
  ScratchDir dir;
  const std::vector<float> data = {0.6f, 0.8f, 1.0f, 0.0f};
  write_matrix(dir / "m.emb", {"x", "y"}, 2, data);
  std::ifstream in(dir / "m.emb", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes, emb1_bytes(2, 2, data));
}

TEST(WriteMatrix, RecordsRawNormsOfGivenRows) {
  ScratchDir dir;
  write_matrix(dir / "m.emb", {"x", "y"}, 2, std::vector<float>{3, 4, 0, 2});
  const auto m = load_matrix(dir / "m.emb");
  ASSERT_TRUE(m.has_raw_norms());
  EXPECT_DOUBLE_EQ(m.raw_norms()[0], 5.0);
  EXPECT_DOUBLE_EQ(m.raw_norms()[1], 2.0);
}

TEST(Normalize, IdempotentBitwise) {
  Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = g.index(1, 40);
    std::vector<float> row(dim);
    for (float& v : row) v = static_cast<float>(g.normal() * g.uniform(0.01, 50.0));
    normalize_in_place(row);
    const std::vector<float> once = row;
    normalize_in_place(row);
    EXPECT_EQ(row, once);
    EXPECT_NEAR(l2_norm(row), 1.0, 1e-4);
  }
}

TEST(RoundTrip, RandomMatricesPreserveIdsAndUnitRows) {
  Gen g(5);
  ScratchDir dir;
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = hzs::testing::random_matrix(g, g.index(1, 20), g.index(1, 16), "id");
    write_matrix(dir / "m.emb", m);
    const auto back = load_matrix(dir / "m.emb");
    EXPECT_EQ(back.ids(), m.ids());
    ASSERT_EQ(back.data().size(), m.data().size());
    EXPECT_EQ(std::memcmp(back.data().data(), m.data().data(), m.data().size() * 4), 0);
  }
}

TEST(RoundTrip, ScaledRowsGiveSameTopDirection) {
  // Positive scaling before export leaves the loaded row unchanged up to
  // rounding, so downstream argmax cannot move.
  ScratchDir dir;
  const std::vector<float> base = {0.3f, -1.2f, 2.5f};
  std::vector<float> scaled;
  for (float v : base) scaled.push_back(v * 7.0f);
  write_matrix(dir / "a.emb", {"r"}, 3, base);
  write_matrix(dir / "b.emb", {"r"}, 3, scaled);
  const auto a = load_matrix(dir / "a.emb");
  const auto b = load_matrix(dir / "b.emb");
  for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(a.row(0)[d], b.row(0)[d], 1e-6);
}

TEST(LoadMatrix, DeterministicAcrossLoads) {
  Gen g(3);
  ScratchDir dir;
  write_matrix(dir / "m.emb", {"a", "b", "c"}, 5, hzs::testing::gaussian_rows(g, 3, 5));
  const auto a = load_matrix(dir / "m.emb");
  const auto b = load_matrix(dir / "m.emb");
  EXPECT_EQ(std::memcmp(a.data().data(), b.data().data(), a.data().size() * 4), 0);
}

PromptBank tiny_bank(std::size_t dim) {
  PromptBank bank;
  bank.templates = {"{label}", "a photo of a {label}"};
  bank.class_ids = {"cat", "dog"};
  Gen g(1);
  for (int t = 0; t < 2; ++t) {
    bank.matrices.push_back(EmbeddingMatrix::from_rows(bank.class_ids, dim,
                                                       hzs::testing::gaussian_rows(g, 2, dim)));
  }
  return bank;
}

ImageBundle tiny_bundle(std::size_t dim) {
  ImageBundle b;
  b.perturbations = {"raw", "flip-lr"};
  b.image_ids = {"i0", "i1", "i2"};
  b.labels = std::vector<std::size_t>{0, 1, 1};
  Gen g(2);
  for (int c = 0; c < 2; ++c) {
    b.matrices.push_back(EmbeddingMatrix::from_rows(b.image_ids, dim,
                                                    hzs::testing::gaussian_rows(g, 3, dim)));
  }
  return b;
}

TEST(ValidateBundle, MatchingDimsGiveSummary) {
  const auto s = validate_bundle(tiny_bank(512), tiny_bundle(512));
  EXPECT_EQ(s.classes, 2u);
  EXPECT_EQ(s.templates, 2u);
  EXPECT_EQ(s.images, 3u);
  EXPECT_EQ(s.perturbations, 2u);
  EXPECT_EQ(s.dim, 512u);
}

TEST(ValidateBundle, DimMismatchIsValidationError) {
  try {
    validate_bundle(tiny_bank(512), tiny_bundle(768));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("dim"), std::string::npos);
  }
}

TEST(ValidateBundle, MissingRawChannelIsConventionError) {
  auto b = tiny_bundle(8);
  b.perturbations = {"flip-lr", "blur"};
  try {
    validate_bundle(tiny_bank(8), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("raw"), std::string::npos);
  }
}

TEST(ValidateBundle, ReportsEveryViolation) {
  auto bank = tiny_bank(8);
  bank.templates[0] = "a {label}";
  auto b = tiny_bundle(16);
  b.perturbations[0] = "blur";
  b.labels = std::vector<std::size_t>{0, 1, 9};
  try {
    validate_bundle(bank, b);
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("template 0"), std::string::npos);
    EXPECT_NE(what.find("perturbation 0"), std::string::npos);
    EXPECT_NE(what.find("dim mismatch"), std::string::npos);
  }
  EXPECT_GE(bank_issues(bank).size(), 1u);
  EXPECT_GE(bundle_issues(b).size(), 1u);
}

TEST(ValidateBundle, RowOrderMustMatchVocabulary) {
  auto bank = tiny_bank(4);
  Gen g(9);
  bank.matrices[1] =
      EmbeddingMatrix::from_rows({"dog", "cat"}, 4, hzs::testing::gaussian_rows(g, 2, 4));
  EXPECT_FALSE(bank_issues(bank).empty());
}

TEST(Manifests, BankAndBundleRoundTripThroughFiles) {
  ScratchDir dir;
  const auto bank = tiny_bank(6);
  const auto b = tiny_bundle(6);
  write_matrix(dir / "bank" / "t0.emb", bank.matrices[0]);
  write_matrix(dir / "bank" / "t1.emb", bank.matrices[1]);
  write_prompt_bank_manifest(dir / "bank" / "manifest.json", bank.templates, bank.class_ids,
                             {"t0.emb", "t1.emb"});
  write_matrix(dir / "img" / "raw.emb", b.matrices[0]);
  write_matrix(dir / "img" / "flip.emb", b.matrices[1]);
  write_image_bundle_manifest(dir / "img" / "manifest.json", b.perturbations, b.image_ids,
                              b.labels, {"raw.emb", "flip.emb"});

  const auto bank2 = load_prompt_bank(dir / "bank" / "manifest.json");
  const auto b2 = load_image_bundle(dir / "img" / "manifest.json");
  EXPECT_EQ(bank2.templates, bank.templates);
  EXPECT_EQ(bank2.class_ids, bank.class_ids);
  EXPECT_EQ(b2.image_ids, b.image_ids);
  EXPECT_EQ(b2.labels, b.labels);
  EXPECT_EQ(b2.find_channel("flip-lr"), std::optional<std::size_t>(1));
  EXPECT_NO_THROW(validate_bundle(bank2, b2));
}

TEST(Manifests, NullLabelsLoadAsAbsent) {
  ScratchDir dir;
  const auto b = tiny_bundle(4);
  write_matrix(dir / "raw.emb", b.matrices[0]);
  write_image_bundle_manifest(dir / "manifest.json", {"raw"}, b.image_ids, std::nullopt,
                              {"raw.emb"});
  EXPECT_FALSE(load_image_bundle(dir / "manifest.json").labels.has_value());
}

}  // namespace
}  // namespace hzs::embedstore
