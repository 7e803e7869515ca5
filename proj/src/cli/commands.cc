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

#include "hzs/cli/commands.h"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hzs/confidence/confidence.h"
#include "hzs/core/error.h"
#include "hzs/core/json_io.h"
#include "hzs/core/parallel.h"
#include "hzs/embedstore/bundle.h"
#include "hzs/evalkit/metrics.h"
#include "hzs/evalkit/synthetic.h"
#include "hzs/ontology/ontology.h"
#include "hzs/rerank/rerank.h"
#include "hzs/zeroshot/zeroshot.h"

#ifndef HZS_VERSION
#define HZS_VERSION "0.0.0"
#endif

namespace hzs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Inputs {
  embedstore::PromptBank bank;
  embedstore::ImageBundle images;
};

Inputs load_inputs(const RunConfig& c) {
  require_path(c.bank, "bank");
  require_path(c.images, "images");
  Inputs in{embedstore::load_prompt_bank(c.bank), embedstore::load_image_bundle(c.images)};
  embedstore::validate_bundle(in.bank, in.images);
  return in;
}

ontology::Ontology load_hierarchy(const RunConfig& c) {
  require_path(c.hierarchy, "hierarchy");
  auto onto = ontology::load_ontology(c.hierarchy);
  if (c.blocked_names) onto = onto.with_blocked_names(*c.blocked_names);
  return onto;
}

void write_provenance(const fs::path& output, const RunConfig& c, std::string_view command) {
  ordered_json j;
  j["tool"] = "hzs";
  j["version"] = HZS_VERSION;
  j["command"] = std::string(command);
  j["config_hash"] = c.hash();
  j["config"] = c.to_json();
  write_text_file(provenance_path(output), j.dump(2) + "\n");
}

fs::path emit_output(const RunConfig& c, std::string_view command, const char* name,
                     const std::string& text) {
  const fs::path path = c.out / name;
  write_text_file(path, text);
  write_provenance(path, c, command);
  return path;
}

fs::path candidate_embeddings_path(const RunConfig& c) {
  return c.candidates.empty() ? c.out / kCandidateEmbeddings : c.candidates;
}

struct Phase1 {
  confidence::ConfidenceReport report;
  zeroshot::TopK topk;
};

Phase1 phase1(const RunConfig& c, const Inputs& in) {
  Phase1 p;
  p.report = confidence::build_report(in.bank, in.images, c.report_options());
  p.topk = zeroshot::top_k(zeroshot::logits(in.images.raw(), in.bank.bare()), c.k);
  return p;
}

}  // namespace

fs::path provenance_path(const fs::path& output) {
  return fs::path(output.string() + ".provenance.json");
}

fs::path cmd_classify(const RunConfig& c) {
  c.validate();
  const Inputs in = load_inputs(c);
  const auto topk = zeroshot::top_k(zeroshot::logits(in.images.raw(), in.bank.bare()), c.k);
  std::ostringstream out;
  for (std::size_t i = 0; i < in.images.images(); ++i) {
    ordered_json j;
    j["id"] = in.images.image_ids[i];
    j["top_k"] = ordered_json::array();
    j["class_indices"] = ordered_json::array();
    j["scores"] = ordered_json::array();
    for (std::size_t r = 0; r < c.k; ++r) {
      const std::size_t cls = topk.indices(i)[r];
      j["top_k"].push_back(in.bank.class_ids[cls]);
      j["class_indices"].push_back(cls);
      j["scores"].push_back(topk.row_scores(i)[r]);
    }
    out << j.dump() << '\n';
  }
  return emit_output(c, "classify", kClassifyFile, out.str());
}

fs::path cmd_confidence(const RunConfig& c) {
  c.validate();
  const Inputs in = load_inputs(c);
  const auto report = confidence::build_report(in.bank, in.images, c.report_options());
  std::ostringstream out;
  confidence::write_report_jsonl(out, report);
  return emit_output(c, "confidence", kConfidenceFile, out.str());
}

fs::path cmd_emit_candidates(const RunConfig& c) {
  c.validate();
  const Inputs in = load_inputs(c);
  const auto onto = load_hierarchy(c);
  const Phase1 p = phase1(c, in);
  const auto emission =
      rerank::emit_candidates(onto, in.bank.class_ids, p.topk, p.report, c.rerank_options());

  std::string names;
  for (const auto& prompt : emission.prompts) names += prompt + "\n";
  ordered_json record;
  record["hash"] = emission.hash;
  record["count"] = emission.prompts.size();
  record["scope"] = std::string(to_string(c.scope));
  record["k"] = c.k;
  record["entries"] = ordered_json::array();
  for (std::size_t r = 0; r < emission.prompts.size(); ++r) {
    const auto& e = emission.entries[r];
    record["entries"].push_back({{"prompt", emission.prompts[r]},
                                 {"class_id", in.bank.class_ids[e.origin_class]},
                                 {"origin_class", e.origin_class},
                                 {"kind", std::string(rerank::to_string(e.kind))},
                                 {"surface_name", e.surface_name}});
  }
  emit_output(c, "emit-candidates", kCandidatesRecord, record.dump(2) + "\n");
  return emit_output(c, "emit-candidates", kCandidatesText, names);
}

fs::path cmd_rerank(const RunConfig& c) {
  c.validate();
  const fs::path record_path = c.out / kCandidatesRecord;
  if (!fs::exists(record_path)) {
    fail(ErrorKind::kConsistency,
         "no candidate emission at " + record_path.string() + "; run emit-candidates first");
  }
  const fs::path embeddings_path = candidate_embeddings_path(c);
  if (!fs::exists(embeddings_path)) {
    fail(ErrorKind::kConsistency, "no candidate embeddings at " + embeddings_path.string() +
                                      "; embed " + (c.out / kCandidatesText).string() + " first");
  }
  const auto record = read_json_file(record_path);
  if (!record.contains("hash") || !record["hash"].is_string()) {
    fail(ErrorKind::kFormat, record_path.string() + ": missing \"hash\"");
  }
  const std::string recorded = record["hash"].get<std::string>();

  const Inputs in = load_inputs(c);
  const auto onto = load_hierarchy(c);
  const Phase1 p = phase1(c, in);
  const auto emission =
      rerank::emit_candidates(onto, in.bank.class_ids, p.topk, p.report, c.rerank_options());
  if (emission.hash != recorded) {
    fail(ErrorKind::kConsistency,
         "inputs changed since emit-candidates: candidate hash " + emission.hash +
             " differs from recorded " + recorded);
  }
  const auto candidates = embedstore::load_matrix(embeddings_path);
  rerank::check_phase_link(recorded, candidates);
  const auto result = rerank::rerank_set(in.images, p.report, p.topk, onto, in.bank.class_ids,
                                         candidates, c.rerank_options());

  std::vector<const rerank::RerankDecision*> decision(in.images.images(), nullptr);
  for (const auto& d : result.decisions) decision[*in.images.raw().find(d.image_id)] = &d;
  std::ostringstream out;
  for (std::size_t i = 0; i < in.images.images(); ++i) {
    ordered_json j;
    j["id"] = in.images.image_ids[i];
    j["base_prediction"] = p.report.base_prediction[i];
    j["low_confidence"] = static_cast<bool>(p.report.low_confidence[i]);
    j["reranked"] = result.reranked[i] ? ordered_json(*result.reranked[i]) : ordered_json(nullptr);
    j["winner"] = decision[i]
                      ? ordered_json(decision[i]->candidates[decision[i]->winning_candidate].surface_name)
                      : ordered_json(nullptr);
    j["final_prediction"] = result.merged[i];
    j["final_class"] = in.bank.class_ids[result.merged[i]];
    out << j.dump() << '\n';
  }
  return emit_output(c, "rerank", kRerankFile, out.str());
}

evalkit::EvalReport cmd_eval(const RunConfig& c) {
  c.validate();
  const fs::path rerank_path = c.out / kRerankFile;
  if (!fs::exists(rerank_path)) {
    fail(ErrorKind::kConsistency, "no rerank output at " + rerank_path.string() + "; run rerank first");
  }
  const Inputs in = load_inputs(c);
  if (!in.images.labels) fail(ErrorKind::kData, "eval: the image bundle carries no labels");
  const std::size_t n = in.images.images();

  std::vector<std::size_t> merged(n);
  std::vector<std::optional<std::size_t>> reranked(n);
  {
    std::istringstream lines(read_text_file(rerank_path));
    std::string line;
    std::size_t i = 0;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      if (i >= n) fail(ErrorKind::kConsistency, rerank_path.string() + ": more rows than images");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        if (j.at("id").get<std::string>() != in.images.image_ids[i]) {
          fail(ErrorKind::kConsistency, rerank_path.string() + ": row " + std::to_string(i) +
                                            " does not match image " + in.images.image_ids[i]);
        }
        merged[i] = j.at("final_prediction").get<std::size_t>();
        if (!j.at("reranked").is_null()) reranked[i] = j["reranked"].get<std::size_t>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::kFormat, rerank_path.string() + ": " + e.what());
      }
      if (merged[i] >= in.bank.classes()) {
        fail(ErrorKind::kData, rerank_path.string() + ": prediction outside the vocabulary");
      }
      ++i;
    }
    if (i != n) fail(ErrorKind::kConsistency, rerank_path.string() + ": fewer rows than images");
  }

  const auto report = confidence::build_report(in.bank, in.images, c.report_options());
  const auto logits = zeroshot::logits(in.images.raw(), in.bank.bare());
  evalkit::EvalInputs inputs;
  inputs.labels = *in.images.labels;
  inputs.base_predictions = report.base_prediction;
  inputs.final_predictions = merged;
  inputs.low_mask = report.low_confidence;
  inputs.confidence = report.combined();
  inputs.baseline_confidence = zeroshot::max_logit(logits);
  auto eval = evalkit::evaluate(inputs);

  // The sweep needs a rerank output for every image (scope "all").
  bool complete = true;
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) {
    complete = complete && reranked[i].has_value();
    if (reranked[i]) all[i] = *reranked[i];
  }
  if (complete) {
    evalkit::SweepInputs sweep{report.s_prompt, report.s_image, report.base_prediction, all,
                               *in.images.labels};
    const auto taus = evalkit::default_sweep_taus();
    eval.sweep = evalkit::sweep_threshold(sweep, taus);
  }

  emit_output(c, "eval", kEvalJson, evalkit::to_json(eval).dump(2) + "\n");
  emit_output(c, "eval", kEvalText, evalkit::to_text_table(eval));
  emit_output(c, "eval", kRocCsv, evalkit::roc_csv(eval.self_consistency.roc_points));
  emit_output(c, "eval", kRocBaselineCsv, evalkit::roc_csv(eval.max_logit.roc_points));
  emit_output(c, "eval", kSelectiveCsv,
              evalkit::selective_csv(eval.self_consistency.selective_curve,
                                     eval.max_logit.selective_curve));
  return eval;
}

fs::path cmd_prune(const RunConfig& c) {
  c.validate();
  const auto onto = load_hierarchy(c);
  require_path(c.nodes, "nodes");
  const auto node_bank = embedstore::load_prompt_bank(c.nodes);
  std::vector<std::string> vocabulary;
  if (!c.bank.empty()) {
    require_path(c.bank, "bank");
    vocabulary = embedstore::load_prompt_bank(c.bank).class_ids;
  }
  // With a vocabulary only the nodes that can surface as augmentation text
  // are scored; without one every node is.
  std::vector<std::string> scored;
  if (vocabulary.empty()) {
    for (const auto& n : onto.nodes()) scored.push_back(n.id);
  } else {
    scored = ontology::augmentation_helpers(onto, vocabulary);
  }
  const auto table = ontology::norm_variance(node_bank, scored);
  const auto pruned = ontology::prune(onto, table, c.keep_fraction, vocabulary);

  ordered_json variances = ordered_json::object();
  for (const auto& [id, v] : table) variances[id] = v;
  emit_output(c, "prune", kNormVariance, variances.dump(2) + "\n");
  return emit_output(c, "prune", kPrunedHierarchy, pruned.to_json().dump(2) + "\n");
}

fs::path cmd_synth(const RunConfig& c) {
  const auto world = evalkit::generate_world(c.synth);
  world.write(c.out);
  ordered_json config;
  config["images"] = "images/manifest.json";
  config["bank"] = "bank/manifest.json";
  config["hierarchy"] = "hierarchy.json";
  config["nodes"] = "nodes/manifest.json";
  config["world"] = "world.json";
  config["synth"] = c.synth.to_json();
  return emit_output(c, "synth", "config.json", config.dump(2) + "\n");
}

fs::path cmd_embed_candidates(const RunConfig& c, const fs::path& names_file) {
  require_path(c.world, "world");
  if (!fs::exists(names_file)) {
    fail(ErrorKind::kConsistency, "no candidate names at " + names_file.string() +
                                      "; run emit-candidates first");
  }
  const auto world = evalkit::load_world(c.world);
  std::vector<std::string> names;
  std::istringstream lines(read_text_file(names_file));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) names.push_back(line);
  }
  const auto matrix = world.encode(names);
  const fs::path path = candidate_embeddings_path(c);
  embedstore::write_matrix(path, matrix);
  write_provenance(path, c, "synth --embed-candidates");
  return path;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hzs: post-hoc confidence, hierarchy-aware reranking and evaluation for "
               "zero-shot classifiers"};
  app.set_version_flag("--version", HZS_VERSION);
  app.require_subcommand(1);

  // Flag values land here and override the config file afterwards.
  struct Flags {
    std::string config, out, images, bank, hierarchy, nodes, candidates, world;
    std::string mode, scope, augment_template, context_template, image_channel;
    std::optional<double> tau, tau_t, tau_i, keep_fraction;
    std::optional<std::size_t> k, threads;
    std::optional<std::uint64_t> seed;
    std::string embed_candidates;
  } f;

  auto shared = [&](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "Run config (JSON)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--threads", f.threads, "Worker thread cap (0 = all cores)");
    cmd->add_option("--seed", f.seed, "Seed for synthetic worlds");
  };
  auto inputs = [&](CLI::App* cmd) {
    cmd->add_option("--images", f.images, "Image bundle manifest");
    cmd->add_option("--bank", f.bank, "Prompt bank manifest");
    cmd->add_option("--k", f.k, "Top-k size");
  };
  auto confidence_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", f.mode, "binary or threshold");
    cmd->add_option("--tau", f.tau, "Sets both tau_t and tau_i");
    cmd->add_option("--tau-t", f.tau_t, "Prompt-consistency threshold");
    cmd->add_option("--tau-i", f.tau_i, "Image-consistency threshold");
    cmd->add_option("--image-channel", f.image_channel, "Perturbation channel for the binary rule");
  };
  auto rerank_flags = [&](CLI::App* cmd) {
    cmd->add_option("--hierarchy", f.hierarchy, "Hierarchy JSON");
    cmd->add_option("--scope", f.scope, "low or all");
    cmd->add_option("--augment-template", f.augment_template, "Template with {child} and {parent}");
    cmd->add_option("--context-template", f.context_template, "Template with {label}");
  };

  auto* classify = app.add_subcommand("classify", "Top-k zero-shot predictions");
  shared(classify);
  inputs(classify);
  auto* conf = app.add_subcommand("confidence", "Self-consistency confidence report");
  shared(conf);
  inputs(conf);
  confidence_flags(conf);
  auto* emit = app.add_subcommand("emit-candidates", "Write augmented candidate prompts");
  shared(emit);
  inputs(emit);
  confidence_flags(emit);
  rerank_flags(emit);
  auto* rr = app.add_subcommand("rerank", "Rerank low-confidence images");
  shared(rr);
  inputs(rr);
  confidence_flags(rr);
  rerank_flags(rr);
  rr->add_option("--candidates", f.candidates, "Embedded candidate prompts (EMB1)");
  auto* ev = app.add_subcommand("eval", "Accuracy, ROC/AUC, selective prediction, sweep");
  shared(ev);
  inputs(ev);
  confidence_flags(ev);
  auto* pr = app.add_subcommand("prune", "Sparsify the hierarchy by text-norm variance");
  shared(pr);
  pr->add_option("--hierarchy", f.hierarchy, "Hierarchy JSON");
  pr->add_option("--nodes", f.nodes, "Prompt bank covering the hierarchy nodes");
  pr->add_option("--bank", f.bank, "Class prompt bank; its classes are never pruned");
  pr->add_option("--keep-fraction", f.keep_fraction, "Fraction of scored nodes to keep");
  auto* sy = app.add_subcommand("synth", "Generate a synthetic world or embed candidate names");
  shared(sy);
  sy->add_option("--world", f.world, "world.json of an existing world");
  sy->add_option("--embed-candidates", f.embed_candidates,
                 "Embed this names file with the world's encoder");
  sy->add_option("--candidates", f.candidates, "Where to write the embeddings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    RunConfig c;
    if (!f.config.empty()) c = load_config(f.config);
    auto set_path = [](const std::string& v, fs::path& field) {
      if (!v.empty()) field = v;
    };
    set_path(f.out, c.out);
    set_path(f.images, c.images);
    set_path(f.bank, c.bank);
    set_path(f.hierarchy, c.hierarchy);
    set_path(f.nodes, c.nodes);
    set_path(f.candidates, c.candidates);
    set_path(f.world, c.world);
    if (!f.mode.empty()) c.mode = confidence::parse_mode(f.mode);
    if (!f.scope.empty()) c.scope = parse_scope(f.scope);
    if (!f.augment_template.empty()) c.augment_template = f.augment_template;
    if (!f.context_template.empty()) c.context_template = f.context_template;
    if (!f.image_channel.empty()) c.image_channel = f.image_channel;
    if (f.tau) c.tau_t = c.tau_i = *f.tau;
    if (f.tau_t) c.tau_t = *f.tau_t;
    if (f.tau_i) c.tau_i = *f.tau_i;
    if (f.keep_fraction) c.keep_fraction = *f.keep_fraction;
    if (f.k) c.k = *f.k;
    if (f.threads) c.threads = *f.threads;
    if (f.seed) c.synth.seed = *f.seed;
    set_max_threads(c.threads);

    const std::string name = cmd->get_name();
    if (name == "classify") {
      out << "wrote " << cmd_classify(c).string() << "\n";
    } else if (name == "confidence") {
      out << "wrote " << cmd_confidence(c).string() << "\n";
    } else if (name == "emit-candidates") {
      out << "wrote " << cmd_emit_candidates(c).string() << "\n";
    } else if (name == "rerank") {
      out << "wrote " << cmd_rerank(c).string() << "\n";
    } else if (name == "eval") {
      out << evalkit::to_text_table(cmd_eval(c));
    } else if (name == "prune") {
      out << "wrote " << cmd_prune(c).string() << "\n";
    } else if (name == "synth") {
      if (!f.embed_candidates.empty()) {
        out << "wrote " << cmd_embed_candidates(c, f.embed_candidates).string() << "\n";
      } else {
        out << "wrote " << cmd_synth(c).string() << "\n";
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "hzs " << cmd->get_name() << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "hzs " << cmd->get_name() << ": " << e.what() << "\n";
    return exit_code(ErrorKind::kData);
  }
}

}  // namespace hzs::cli
