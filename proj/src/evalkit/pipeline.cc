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

#include "hzs/evalkit/pipeline.h"

#include "hzs/core/error.h"

namespace hzs::evalkit {

PipelineResult run_pipeline(const SyntheticWorld& world, const PipelineOptions& options) {
  PipelineResult out;
  const auto& bank = world.bank();
  const auto& images = world.images();
  out.report = confidence::build_report(bank, images, options.report);

  const auto logits = zeroshot::logits(images.raw(), bank.bare());
  out.topk = zeroshot::top_k(logits, options.rerank.k);

  out.hierarchy = world.hierarchy();
  if (options.keep_fraction) {
    const auto helpers = ontology::augmentation_helpers(world.hierarchy(), world.class_ids());
    const auto table = ontology::norm_variance(world.node_bank(), helpers);
    out.hierarchy = ontology::prune(world.hierarchy(), table, *options.keep_fraction,
                                    world.class_ids());
  }

  rerank::RerankOptions rerank_options = options.rerank;
  rerank_options.scope = rerank::Scope::kAll;
  out.emission =
      rerank::emit_candidates(out.hierarchy, bank.class_ids, out.topk, out.report, rerank_options);
  const auto candidates = world.encode(out.emission.prompts);
  rerank::check_phase_link(out.emission.hash, candidates);
  out.rerank = rerank::rerank_set(images, out.report, out.topk, out.hierarchy, bank.class_ids,
                                  candidates, rerank_options);

  const std::size_t n = out.report.size();
  std::vector<std::size_t> reranked(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.rerank.reranked[i]) fail(ErrorKind::kData, "run_pipeline: image left unreranked");
    reranked[i] = *out.rerank.reranked[i];
  }

  EvalInputs in;
  in.labels = world.labels();
  in.base_predictions = out.report.base_prediction;
  in.final_predictions = out.rerank.merged;
  in.low_mask = out.report.low_confidence;
  in.confidence = out.report.combined();
  in.baseline_confidence = zeroshot::max_logit(logits);
  out.eval = evaluate(in);

  if (!options.sweep_taus.empty()) {
    SweepInputs sweep{out.report.s_prompt, out.report.s_image, out.report.base_prediction,
                      reranked, world.labels()};
    out.eval.sweep = sweep_threshold(sweep, options.sweep_taus);
  }
  return out;
}

}  // namespace hzs::evalkit
