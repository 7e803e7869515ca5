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

#include "hzs/embedstore/bundle.h"

#include <set>

#include "hzs/core/error.h"
#include "hzs/core/json_io.h"

namespace hzs::embedstore {
namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::filesystem::path& where) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kFormat, where.string() + ": missing \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, where.string() + ": bad \"" + key + "\": " + e.what());
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void check_unique(const std::vector<std::string>& values, const std::string& what,
                  std::vector<std::string>& issues) {
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) issues.push_back("duplicate " + what + " '" + v + "'");
  }
}

void check_rows(const EmbeddingMatrix& m, const std::vector<std::string>& expected,
                const std::string& what, std::vector<std::string>& issues) {
  if (m.rows() != expected.size()) {
    issues.push_back(what + " has " + std::to_string(m.rows()) + " rows, expected " +
                     std::to_string(expected.size()));
  } else if (m.ids() != expected) {
    issues.push_back(what + " row ids differ from the declared ordering");
  }
}

std::vector<EmbeddingMatrix> load_files(const std::vector<std::string>& files,
                                        const std::filesystem::path& manifest) {
  std::vector<EmbeddingMatrix> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    std::filesystem::path p(f);
    if (p.is_relative()) p = manifest.parent_path() / p;
    out.push_back(load_matrix(p));
  }
  return out;
}

}  // namespace

std::optional<std::size_t> ImageBundle::find_channel(std::string_view name) const {
  for (std::size_t i = 0; i < perturbations.size(); ++i) {
    if (perturbations[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> bank_issues(const PromptBank& bank) {
  std::vector<std::string> issues;
  if (bank.templates.empty()) {
    issues.push_back("prompt bank has no templates");
  } else if (bank.templates[0] != kLabelPlaceholder) {
    issues.push_back("convention: template 0 must be \"{label}\", found \"" +
                     bank.templates[0] + "\"");
  }
  for (const auto& t : bank.templates) {
    if (t.find(kLabelPlaceholder) == std::string::npos) {
      issues.push_back("template \"" + t + "\" lacks the {label} placeholder");
    }
  }
  check_unique(bank.class_ids, "class id", issues);
  if (bank.matrices.size() != bank.templates.size()) {
    issues.push_back("prompt bank has " + std::to_string(bank.matrices.size()) +
                     " matrices for " + std::to_string(bank.templates.size()) +
                     " templates");
  }
  for (std::size_t t = 0; t < bank.matrices.size(); ++t) {
    check_rows(bank.matrices[t], bank.class_ids, "template " + std::to_string(t) + " matrix",
               issues);
  }
  return issues;
}

std::vector<std::string> bundle_issues(const ImageBundle& bundle) {
  std::vector<std::string> issues;
  if (bundle.perturbations.empty()) {
    issues.push_back("image bundle has no perturbation channels");
  } else if (bundle.perturbations[0] != kRawChannel) {
    issues.push_back("convention: perturbation 0 must be \"raw\", found \"" +
                     bundle.perturbations[0] + "\"");
  }
  check_unique(bundle.perturbations, "perturbation id", issues);
  check_unique(bundle.image_ids, "image id", issues);
  if (bundle.matrices.size() != bundle.perturbations.size()) {
    issues.push_back("image bundle has " + std::to_string(bundle.matrices.size()) +
                     " matrices for " + std::to_string(bundle.perturbations.size()) +
                     " perturbations");
  }
  for (std::size_t b = 0; b < bundle.matrices.size(); ++b) {
    const std::string name =
        b < bundle.perturbations.size() ? bundle.perturbations[b] : std::to_string(b);
    check_rows(bundle.matrices[b], bundle.image_ids, "channel '" + name + "' matrix", issues);
  }
  if (bundle.labels && bundle.labels->size() != bundle.image_ids.size()) {
    issues.push_back("labels has " + std::to_string(bundle.labels->size()) +
                     " entries for " + std::to_string(bundle.image_ids.size()) + " images");
  }
  return issues;
}

ValidationSummary validate_bundle(const PromptBank& bank, const ImageBundle& images) {
  std::vector<std::string> issues = bank_issues(bank);
  for (auto& s : bundle_issues(images)) issues.push_back(std::move(s));

  std::set<std::size_t> dims;
  for (const auto& m : bank.matrices) dims.insert(m.dim());
  for (const auto& m : images.matrices) dims.insert(m.dim());
  if (dims.size() > 1) {
    issues.push_back("dim mismatch: prompt bank dim " + std::to_string(bank.dim()) +
                     ", image dim " + std::to_string(images.dim()));
  }
  if (images.labels) {
    for (std::size_t i = 0; i < images.labels->size(); ++i) {
      if ((*images.labels)[i] >= bank.classes()) {
        issues.push_back("label " + std::to_string((*images.labels)[i]) + " of image " +
                         std::to_string(i) + " is outside the class vocabulary");
        break;
      }
    }
  }
  if (!issues.empty()) {
    fail(ErrorKind::kValidation,
         std::to_string(issues.size()) + " validation failure(s): " + join(issues, "; "));
  }
  return ValidationSummary{bank.classes(), bank.templates.size(), images.images(),
                           images.perturbations.size(), bank.dim()};
}

PromptBank load_prompt_bank(const std::filesystem::path& manifest) {
  const nlohmann::json j = read_json_file(manifest);
  PromptBank bank;
  bank.templates = field<std::vector<std::string>>(j, "templates", manifest);
  bank.class_ids = field<std::vector<std::string>>(j, "class_ids", manifest);
  const auto files = field<std::vector<std::string>>(j, "files", manifest);
  bank.matrices = load_files(files, manifest);
  if (auto issues = bank_issues(bank); !issues.empty()) {
    fail(ErrorKind::kValidation, manifest.string() + ": " + join(issues, "; "));
  }
  return bank;
}

ImageBundle load_image_bundle(const std::filesystem::path& manifest) {
  const nlohmann::json j = read_json_file(manifest);
  ImageBundle bundle;
  bundle.perturbations = field<std::vector<std::string>>(j, "perturbations", manifest);
  bundle.image_ids = field<std::vector<std::string>>(j, "image_ids", manifest);
  if (j.contains("labels") && !j["labels"].is_null()) {
    bundle.labels = field<std::vector<std::size_t>>(j, "labels", manifest);
  }
  const auto files = field<std::vector<std::string>>(j, "files", manifest);
  bundle.matrices = load_files(files, manifest);
  if (auto issues = bundle_issues(bundle); !issues.empty()) {
    fail(ErrorKind::kValidation, manifest.string() + ": " + join(issues, "; "));
  }
  return bundle;
}

void write_prompt_bank_manifest(const std::filesystem::path& manifest,
                                const std::vector<std::string>& templates,
                                const std::vector<std::string>& class_ids,
                                const std::vector<std::string>& files) {
  nlohmann::json j;
  j["templates"] = templates;
  j["class_ids"] = class_ids;
  j["files"] = files;
  write_json_file(manifest, j);
}

void write_image_bundle_manifest(const std::filesystem::path& manifest,
                                 const std::vector<std::string>& perturbations,
                                 const std::vector<std::string>& image_ids,
                                 const std::optional<std::vector<std::size_t>>& labels,
                                 const std::vector<std::string>& files) {
  nlohmann::json j;
  j["perturbations"] = perturbations;
  j["image_ids"] = image_ids;
  j["labels"] = labels ? nlohmann::json(*labels) : nlohmann::json(nullptr);
  j["files"] = files;
  write_json_file(manifest, j);
}

}  // namespace hzs::embedstore
