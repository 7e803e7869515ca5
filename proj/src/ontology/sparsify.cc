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

// Word-frequency proxy: rare names show little variation of the raw text
// embedding norm across prompt templates.

#include <algorithm>
#include <cmath>
#include <set>

#include "hzs/core/error.h"
#include "hzs/ontology/ontology.h"

namespace hzs::ontology {

NormVarianceTable norm_variance(const embedstore::PromptBank& bank,
                                std::span<const std::string> node_ids) {
  if (bank.matrices.size() < 2) {
    fail(ErrorKind::kParameter, "norm_variance: bank needs non-bare templates");
  }
  for (std::size_t t = 1; t < bank.matrices.size(); ++t) {
    if (!bank.matrices[t].has_raw_norms()) {
      fail(ErrorKind::kData, "norm_variance: template " + std::to_string(t) +
                                 " has no recorded raw norms; re-export with norm recording");
    }
  }
  const auto& reference = bank.matrices[1];
  std::vector<std::string> missing;
  NormVarianceTable table;
  for (const auto& id : node_ids) {
    const auto row = reference.find(id);
    if (!row) {
      missing.push_back(id);
      continue;
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    const double n = static_cast<double>(bank.matrices.size() - 1);
    for (std::size_t t = 1; t < bank.matrices.size(); ++t) {
      const double v = bank.matrices[t].raw_norms()[*row];
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    table[id] = std::max(0.0, sum_sq / n - mean * mean);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorKind::kData, "norm_variance: bank has no rows for " + list);
  }
  return table;
}

Ontology prune(const Ontology& onto, const NormVarianceTable& table, double keep_fraction,
               std::span<const std::string> protected_ids) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    fail(ErrorKind::kParameter,
         "prune: keep_fraction=" + std::to_string(keep_fraction) + " outside (0, 1]");
  }
  const std::set<std::string> keep_always(protected_ids.begin(), protected_ids.end());
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [id, variance] : table) {
    if (!onto.contains(id)) fail(ErrorKind::kReference, "prune: unknown node '" + id + "'");
    if (!keep_always.count(id)) scored.emplace_back(id, variance);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  });
  const auto survivors = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(scored.size()) - 1e-9));
  std::set<std::string> pruned;
  for (std::size_t i = survivors; i < scored.size(); ++i) pruned.insert(scored[i].first);
  return onto.with_pruned(std::move(pruned));
}

}  // namespace hzs::ontology
