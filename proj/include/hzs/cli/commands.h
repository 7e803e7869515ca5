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

#ifndef HZS_CLI_COMMANDS_H_
#define HZS_CLI_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hzs/cli/config.h"
#include "hzs/evalkit/report.h"

namespace hzs::cli {

// Output file names inside RunConfig::out.
inline constexpr const char* kClassifyFile = "classify.jsonl";
inline constexpr const char* kConfidenceFile = "confidence.jsonl";
inline constexpr const char* kCandidatesText = "candidates.txt";
inline constexpr const char* kCandidatesRecord = "candidates.json";
inline constexpr const char* kCandidateEmbeddings = "candidates.emb";
inline constexpr const char* kRerankFile = "rerank.jsonl";
inline constexpr const char* kEvalJson = "eval.json";
inline constexpr const char* kEvalText = "eval.txt";
inline constexpr const char* kRocCsv = "roc.csv";
inline constexpr const char* kRocBaselineCsv = "roc_max_logit.csv";
inline constexpr const char* kSelectiveCsv = "selective.csv";
inline constexpr const char* kPrunedHierarchy = "hierarchy.pruned.json";
inline constexpr const char* kNormVariance = "norm_variance.json";

// Sidecar written next to every output: tool version, command, config hash.
std::filesystem::path provenance_path(const std::filesystem::path& output);

// Each command returns the path of its main output.
std::filesystem::path cmd_classify(const RunConfig& config);
std::filesystem::path cmd_confidence(const RunConfig& config);
std::filesystem::path cmd_emit_candidates(const RunConfig& config);
std::filesystem::path cmd_rerank(const RunConfig& config);
evalkit::EvalReport cmd_eval(const RunConfig& config);
std::filesystem::path cmd_prune(const RunConfig& config);
// Writes a synthetic world into config.out, plus a config.json pointing at it.
std::filesystem::path cmd_synth(const RunConfig& config);
// Embeds a phase-1 names file with the encoder of config.world, standing in
// for the exporter on synthetic worlds.
std::filesystem::path cmd_embed_candidates(const RunConfig& config,
                                           const std::filesystem::path& names_file);

// Entry point of the hzs binary. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hzs::cli

#endif  // HZS_CLI_COMMANDS_H_
