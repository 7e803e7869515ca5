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

#include <fstream>
#include <iterator>
#include <sstream>

#include "hzs/cli/commands.h"
#include "hzs/embedstore/bundle.h"
#include "json.hpp"
#include "support.h"

namespace hzs::cli {
namespace {

namespace fs = std::filesystem;
using hzs::testing::ScratchDir;
using nlohmann::json;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome hzs(std::vector<std::string> args) {
  args.insert(args.begin(), "hzs");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// A small world written by `synth`; returns the config it emits.
fs::path make_world(const ScratchDir& dir, std::uint64_t seed = 3) {
  const auto seed_config = dir / "synth.json";
  write_text(seed_config, json{{"synth",
                                {{"seed", seed},
                                 {"n_parents", 5},
                                 {"children_per_parent", 3},
                                 {"n_images", 300},
                                 {"dim", 32},
                                 {"n_templates", 8}}}}
                              .dump());
  const auto r = hzs({"synth", "--config", seed_config.string(), "--out", (dir / "world").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir / "world" / "config.json";
}

// confidence, emit-candidates, embedding, rerank, eval into out. extra goes to
// the two hierarchy-aware steps.
void run_all(const fs::path& config, const fs::path& out, const std::string& scope = "all",
             const std::vector<std::string>& extra = {}) {
  auto step = [&](std::vector<std::string> args) {
    args.insert(args.end(), {"--config", config.string()});
    if (args[0] != "synth") args.insert(args.end(), {"--out", out.string()});
    if (args[0] == "emit-candidates" || args[0] == "rerank") {
      args.insert(args.end(), extra.begin(), extra.end());
    }
    const auto r = hzs(args);
    ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
  };
  const std::string emb = (out / kCandidateEmbeddings).string();
  step({"confidence"});
  step({"emit-candidates", "--scope", scope});
  step({"synth", "--embed-candidates", (out / kCandidatesText).string(), "--candidates", emb});
  step({"rerank", "--scope", scope, "--candidates", emb});
  step({"eval"});
}

TEST(Cli, EndToEnd) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto out = dir / "run";
  run_all(config, out);
  for (const char* f : {kConfidenceFile, kCandidatesText, kCandidatesRecord, kRerankFile,
                        kEvalJson, kEvalText, kRocCsv, kRocBaselineCsv, kSelectiveCsv}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_TRUE(fs::exists(provenance_path(out / kRerankFile)));
  const auto prov = json::parse(slurp(provenance_path(out / kRerankFile)));
  EXPECT_EQ(prov["command"], "rerank");
  EXPECT_EQ(prov["config_hash"].get<std::string>().size(), 64u);

  EXPECT_EQ(lines_of(out / kRerankFile).size(), 300u);
  const auto eval = json::parse(slurp(out / kEvalJson));
  EXPECT_EQ(eval["n"], 300);
  EXPECT_FALSE(eval["sweep"].empty());
}

TEST(Cli, RerankWithoutEmitIsConsistencyError) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto r = hzs({"rerank", "--config", config.string(), "--out", (dir / "run").string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("consistency"), std::string::npos);
}

TEST(Cli, StaleEmbeddingsAreRejected) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto out = dir / "run";
  run_all(config, out, "low");
  // A different candidate set changes the hash; old embeddings no longer fit.
  const auto r = hzs({"emit-candidates", "--config", config.string(), "--out", out.string(),
                      "--scope", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rr = hzs({"rerank", "--config", config.string(), "--out", out.string()});
  EXPECT_EQ(rr.code, 4) << rr.err;
}

TEST(Cli, RerunIsByteIdentical) {
  ScratchDir dir;
  const auto config = make_world(dir);
  run_all(config, dir / "a");
  run_all(config, dir / "b");
  for (const char* f : {kConfidenceFile, kCandidatesText, kCandidatesRecord, kCandidateEmbeddings,
                        kRerankFile, kEvalJson, kSelectiveCsv}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Cli, ClassifyTopOneIsPrefixAndMatchesRecount) {
  ScratchDir dir;
  const auto config = make_world(dir);
  for (const char* k : {"1", "5"}) {
    const auto r = hzs({"classify", "--config", config.string(), "--out",
                        (dir / ("k" + std::string(k))).string(), "--k", k});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto one = lines_of(dir / "k1" / kClassifyFile);
  const auto five = lines_of(dir / "k5" / kClassifyFile);
  ASSERT_EQ(one.size(), 300u);
  ASSERT_EQ(five.size(), 300u);

  const auto bank = embedstore::load_prompt_bank(dir / "world" / "bank" / "manifest.json");
  const auto images = embedstore::load_image_bundle(dir / "world" / "images" / "manifest.json");
  const auto expected = hzs::testing::naive_argmax(images.raw(), bank.bare());
  for (std::size_t i = 0; i < one.size(); ++i) {
    const auto a = json::parse(one[i]);
    const auto b = json::parse(five[i]);
    ASSERT_EQ(a["top_k"].size(), 1u);
    ASSERT_EQ(b["top_k"].size(), 5u);
    EXPECT_EQ(a["top_k"][0], b["top_k"][0]);
    EXPECT_EQ(a["class_indices"][0].get<std::size_t>(), expected[i]);
  }
}

TEST(Cli, FullKeepPruneLeavesPredictionsUnchanged) {
  ScratchDir dir;
  const auto config = make_world(dir);
  run_all(config, dir / "base");
  const auto p = hzs({"prune", "--config", config.string(), "--out", (dir / "pruned").string(),
                      "--keep-fraction", "1.0"});
  ASSERT_EQ(p.code, 0) << p.err;
  run_all(config, dir / "after", "all",
          {"--hierarchy", (dir / "pruned" / kPrunedHierarchy).string()});
  EXPECT_EQ(slurp(dir / "base" / kCandidatesText), slurp(dir / "after" / kCandidatesText));
  EXPECT_EQ(slurp(dir / "base" / kRerankFile), slurp(dir / "after" / kRerankFile));
}

TEST(Cli, PruneShrinksCandidateSet) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto p = hzs({"prune", "--config", config.string(), "--out", (dir / "pruned").string(),
                      "--keep-fraction", "0.3"});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto variances = json::parse(slurp(dir / "pruned" / kNormVariance));
  EXPECT_FALSE(variances.empty());
  for (const char* h : {"", "pruned"}) {
    std::vector<std::string> args{"emit-candidates", "--config", config.string(), "--out",
                                  (dir / ("emit" + std::string(h))).string(), "--scope", "all"};
    if (*h) args.insert(args.end(), {"--hierarchy", (dir / "pruned" / kPrunedHierarchy).string()});
    ASSERT_EQ(hzs(args).code, 0);
  }
  EXPECT_LT(lines_of(dir / "emitpruned" / kCandidatesText).size(),
            lines_of(dir / "emit" / kCandidatesText).size());
}

TEST(Cli, ThresholdAtOneFlagsEverything) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto r = hzs({"confidence", "--config", config.string(), "--out", (dir / "run").string(),
                      "--mode", "threshold", "--tau", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& line : lines_of(dir / "run" / kConfidenceFile)) {
    EXPECT_TRUE(json::parse(line)["low_confidence"].get<bool>());
  }
}

TEST(Cli, RawOnlyBundleIsRejectedInBinaryMode) {
  ScratchDir dir;
  const auto config = make_world(dir);
  const auto manifest = dir / "world" / "images" / "manifest.json";
  auto j = json::parse(slurp(manifest));
  j["files"] = json::array({j["files"][0]});
  j["perturbations"] = json::array({"raw"});
  write_text(manifest, j.dump());
  const auto r = hzs({"confidence", "--config", config.string(), "--out", (dir / "run").string()});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, ConfigErrors) {
  ScratchDir dir;
  write_text(dir / "bad.json", R"({"tau": 0.5})");
  EXPECT_EQ(hzs({"confidence", "--config", (dir / "bad.json").string()}).code, 3);
  const auto config = make_world(dir);
  EXPECT_EQ(hzs({"confidence", "--config", config.string(), "--tau", "1.5"}).code, 2);
  EXPECT_EQ(hzs({"confidence", "--config", config.string(), "--mode", "vote"}).code, 2);
  EXPECT_EQ(hzs({"confidence", "--no-such-flag"}).code, 2);
  EXPECT_EQ(hzs({"confidence", "--out", (dir / "x").string()}).code, 2);
}

}  // namespace
}  // namespace hzs::cli
