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

#include "hzs/cli/config.h"

#include <cmath>
#include <set>

#include "hzs/core/error.h"
#include "hzs/core/hashing.h"
#include "hzs/core/json_io.h"

namespace hzs::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "images", "bank", "hierarchy", "nodes", "candidates", "world", "out",
      "mode", "tau_t", "tau_i", "image_channel", "k", "keep_fraction",
      "augment_template", "context_template", "scope", "blocked_names", "threads", "synth"};
  return keys;
}

std::string path_string(const std::filesystem::path& p) {
  return p.empty() ? std::string() : std::filesystem::absolute(p).lexically_normal().string();
}

}  // namespace

std::string_view to_string(rerank::Scope scope) {
  return scope == rerank::Scope::kAll ? "all" : "low";
}

rerank::Scope parse_scope(std::string_view text) {
  if (text == "low") return rerank::Scope::kLowConfidence;
  if (text == "all") return rerank::Scope::kAll;
  fail(ErrorKind::kParameter, "scope must be \"low\" or \"all\", got \"" + std::string(text) + "\"");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["images"] = path_string(images);
  j["bank"] = path_string(bank);
  j["hierarchy"] = path_string(hierarchy);
  j["nodes"] = path_string(nodes);
  j["candidates"] = path_string(candidates);
  j["world"] = path_string(world);
  j["out"] = path_string(out);
  j["mode"] = std::string(confidence::to_string(mode));
  j["tau_t"] = tau_t;
  j["tau_i"] = tau_i;
  j["image_channel"] = image_channel;
  j["k"] = k;
  j["keep_fraction"] = keep_fraction;
  j["augment_template"] = augment_template;
  j["context_template"] = context_template;
  j["scope"] = std::string(to_string(scope));
  j["blocked_names"] = blocked_names ? nlohmann::ordered_json(*blocked_names)
                                     : nlohmann::ordered_json(nullptr);
  j["synth"] = synth.to_json();
  return j;
}

std::string RunConfig::hash() const { return sha256_hex(to_json().dump()); }

confidence::ReportOptions RunConfig::report_options() const {
  confidence::ReportOptions o;
  o.mode = mode;
  o.tau_t = tau_t;
  o.tau_i = tau_i;
  o.image_channel = image_channel;
  return o;
}

rerank::RerankOptions RunConfig::rerank_options() const {
  rerank::RerankOptions o;
  o.k = k;
  o.augment_template = augment_template;
  o.context_template = context_template;
  o.scope = scope;
  return o;
}

void RunConfig::validate() const {
  auto unit = [](double v, const char* key) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      fail(ErrorKind::kParameter, std::string(key) + " must lie in [0, 1], got " + std::to_string(v));
    }
  };
  unit(tau_t, "tau_t");
  unit(tau_i, "tau_i");
  if (k < 1) fail(ErrorKind::kParameter, "k must be at least 1");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    fail(ErrorKind::kParameter, "keep_fraction must lie in (0, 1], got " + std::to_string(keep_fraction));
  }
}

void require_path(const std::filesystem::path& path, std::string_view key) {
  if (path.empty()) {
    fail(ErrorKind::kValidation, "config: \"" + std::string(key) + "\" is not set");
  }
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::kValidation,
         "config: \"" + std::string(key) + "\" path does not exist: " + path.string());
  }
}

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(ErrorKind::kFormat, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) fail(ErrorKind::kFormat, "config: unknown key \"" + key + "\"");
  }
  RunConfig c;
  auto path = [&](const char* key, std::filesystem::path& field) {
    if (!j.contains(key) || j[key].is_null()) return;
    const std::filesystem::path p(j[key].get<std::string>());
    if (p.empty()) return;
    field = p.is_absolute() ? p : base_dir / p;
  };
  try {
    path("images", c.images);
    path("bank", c.bank);
    path("hierarchy", c.hierarchy);
    path("nodes", c.nodes);
    path("candidates", c.candidates);
    path("world", c.world);
    path("out", c.out);
    if (j.contains("mode")) c.mode = confidence::parse_mode(j["mode"].get<std::string>());
    if (j.contains("tau_t")) c.tau_t = j["tau_t"].get<double>();
    if (j.contains("tau_i")) c.tau_i = j["tau_i"].get<double>();
    if (j.contains("image_channel")) c.image_channel = j["image_channel"].get<std::string>();
    if (j.contains("k")) c.k = j["k"].get<std::size_t>();
    if (j.contains("keep_fraction")) c.keep_fraction = j["keep_fraction"].get<double>();
    if (j.contains("augment_template")) c.augment_template = j["augment_template"].get<std::string>();
    if (j.contains("context_template")) c.context_template = j["context_template"].get<std::string>();
    if (j.contains("scope")) c.scope = parse_scope(j["scope"].get<std::string>());
    if (j.contains("blocked_names") && !j["blocked_names"].is_null()) {
      c.blocked_names = j["blocked_names"].get<std::vector<std::string>>();
    }
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
    if (j.contains("synth")) c.synth = evalkit::WorldParams::from_json(j["synth"]);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_json_file(path), path.parent_path());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace hzs::cli
