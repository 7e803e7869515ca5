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

#ifndef HZS_EVALKIT_PIPELINE_H_
#define HZS_EVALKIT_PIPELINE_H_

#include <optional>
#include <vector>

#include "hzs/confidence/confidence.h"
#include "hzs/evalkit/report.h"
#include "hzs/evalkit/synthetic.h"
#include "hzs/ontology/ontology.h"
#include "hzs/rerank/rerank.h"
#include "hzs/zeroshot/zeroshot.h"

namespace hzs::evalkit {

struct PipelineOptions {
  confidence::ReportOptions report;
  rerank::RerankOptions rerank;
  std::vector<double> sweep_taus = default_sweep_taus();
  std::optional<double> keep_fraction;  // prune the hierarchy first when set
};

struct PipelineResult {
  confidence::ConfidenceReport report;
  zeroshot::TopK topk;
  ontology::Ontology hierarchy;  // as used for augmentation
  rerank::CandidateEmission emission;
  rerank::RerankResult rerank;
  EvalReport eval;
};

// The full post-hoc pipeline in process: confidence report, top-k, candidate
// emission, candidate embedding by the world's encoder, rerank, evaluation.
// Every image is reranked so the threshold sweep can reuse the outputs; the
// merge still follows the report's low-confidence set.
PipelineResult run_pipeline(const SyntheticWorld& world, const PipelineOptions& options = {});

}  // namespace hzs::evalkit

#endif  // HZS_EVALKIT_PIPELINE_H_
