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

#include "hzs/evalkit/synthetic.h"

#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <random>
#include <set>

#include "hzs/core/error.h"
#include "hzs/core/hashing.h"
#include "hzs/core/json_io.h"

namespace hzs::evalkit {
namespace {

constexpr std::size_t kNuisanceDims = 8;
constexpr const char* kBareSkeleton = "{}";

// Explicit transforms keep the stream identical across standard libraries;
// std::normal_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng keyed_rng(std::uint64_t seed, std::string_view key) {
  return Rng(mix(fnv1a64(key) ^ mix(seed)));
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> normalized(std::vector<double> v) {
  const double n = norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
  return v;
}

// a + scale * b
std::vector<double> axpy(const std::vector<double>& a, double scale, const std::vector<double>& b) {
  std::vector<double> out(a);
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += scale * b[d];
  return out;
}

std::size_t concept_dims(std::size_t dim) {
  return dim >= 2 * kNuisanceDims ? dim - kNuisanceDims : dim;
}

// Unit gaussian direction over the leading active coordinates.
std::vector<double> unit_direction(Rng& rng, std::size_t dim, std::size_t active) {
  std::vector<double> v(dim, 0.0);
  for (std::size_t d = 0; d < active; ++d) v[d] = rng.normal();
  return normalized(std::move(v));
}

std::string pseudo_word(Rng& rng) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                            "r", "s", "t", "v", "z", "br", "dr", "kr", "st"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  return w;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void check_params(const WorldParams& p) {
  if (p.n_parents == 0 || p.children_per_parent == 0 || p.n_images == 0 || p.dim == 0) {
    fail(ErrorKind::kParameter, "generate_world: counts and dim must be positive");
  }
  if (p.n_templates < 2) {
    fail(ErrorKind::kParameter, "generate_world: need at least two prompt templates");
  }
  const double terms[] = {p.image_noise,   p.flip_noise,         p.nuisance,
                          p.text_noise,    p.style_noise,        p.name_drift,
                          p.template_resolution, p.context_resolution, p.parent_weight,
                          p.child_spread,  p.grandchild_spread,  p.absorber_spread};
  for (double t : terms) {
    if (!std::isfinite(t) || t < 0.0) {
      fail(ErrorKind::kParameter, "generate_world: noise terms must be finite and >= 0");
    }
  }
  if (!(p.coarse_major_share >= 0.0 && p.coarse_major_share <= 1.0)) {
    fail(ErrorKind::kParameter, "generate_world: coarse_major_share must lie in [0, 1]");
  }
}

}  // namespace

WorldParams WorldParams::noiseless() const {
  WorldParams p = *this;
  p.image_noise = 0.0;
  p.flip_noise = 0.0;
  p.nuisance = 0.0;
  p.text_noise = 0.0;
  p.style_noise = 0.0;
  p.name_drift = 0.0;
  p.template_resolution = 0.0;
  return p;
}

nlohmann::ordered_json WorldParams::to_json() const {
  return {{"seed", seed},
          {"n_parents", n_parents},
          {"children_per_parent", children_per_parent},
          {"n_images", n_images},
          {"dim", dim},
          {"n_templates", n_templates},
          {"image_noise", image_noise},
          {"flip_noise", flip_noise},
          {"nuisance", nuisance},
          {"text_noise", text_noise},
          {"style_noise", style_noise},
          {"name_drift", name_drift},
          {"template_resolution", template_resolution},
          {"context_resolution", context_resolution},
          {"parent_weight", parent_weight},
          {"child_spread", child_spread},
          {"grandchild_spread", grandchild_spread},
          {"absorber_spread", absorber_spread},
          {"coarse_major_share", coarse_major_share}};
}

WorldParams WorldParams::from_json(const nlohmann::json& j) {
  WorldParams p;
  if (!j.is_object()) fail(ErrorKind::kFormat, "world params must be a JSON object");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("seed", p.seed);
    get("n_parents", p.n_parents);
    get("children_per_parent", p.children_per_parent);
    get("n_images", p.n_images);
    get("dim", p.dim);
    get("n_templates", p.n_templates);
    get("image_noise", p.image_noise);
    get("flip_noise", p.flip_noise);
    get("nuisance", p.nuisance);
    get("text_noise", p.text_noise);
    get("style_noise", p.style_noise);
    get("name_drift", p.name_drift);
    get("template_resolution", p.template_resolution);
    get("context_resolution", p.context_resolution);
    get("parent_weight", p.parent_weight);
    get("child_spread", p.child_spread);
    get("grandchild_spread", p.grandchild_spread);
    get("absorber_spread", p.absorber_spread);
    get("coarse_major_share", p.coarse_major_share);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("world params: ") + e.what());
  }
  return p;
}

std::string_view to_string(ClassRole role) {
  switch (role) {
    case ClassRole::kClean:
      return "clean";
    case ClassRole::kDrifted:
      return "drifted";
    case ClassRole::kCoarse:
      return "coarse";
    case ClassRole::kAbsorber:
      return "absorber";
  }
  return "clean";
}

std::vector<std::string> default_templates(std::size_t n_templates) {
  static const std::vector<std::string> kBase = {
      "a photo of a {label}.",          "a blurry photo of a {label}.",
      "a photo of the large {label}.",  "a photo of the small {label}.",
      "a bright photo of a {label}.",   "a cropped photo of the {label}.",
      "a close-up photo of a {label}.", "a black and white photo of the {label}.",
      "a low resolution photo of a {label}.", "a rendering of a {label}.",
      "a sculpture of a {label}.",      "a drawing of a {label}.",
      "art of the {label}.",            "a good photo of the {label}.",
      "a jpeg corrupted photo of a {label}.", "itap of a {label}."};
  std::vector<std::string> out{std::string(embedstore::kLabelPlaceholder)};
  for (std::size_t t = 0; t < n_templates; ++t) {
    if (t < kBase.size()) {
      out.push_back(kBase[t]);
    } else {
      out.push_back("a photo of a {label}, take " + std::to_string(t - kBase.size() + 2) + ".");
    }
  }
  return out;
}

std::vector<SyntheticWorld::Mention> SyntheticWorld::find_mentions(std::string_view text) const {
  struct Token {
    std::size_t begin, end;
  };
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < text.size();) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    tokens.push_back({i, j});
    i = j;
  }
  // Longest match first, left to right.
  std::vector<Mention> out;
  for (std::size_t t = 0; t < tokens.size();) {
    bool matched = false;
    for (std::size_t len = std::min(longest_name_words_, tokens.size() - t); len >= 1; --len) {
      const std::size_t b = tokens[t].begin;
      const std::size_t e = tokens[t + len - 1].end;
      auto it = name_index_.find(std::string(text.substr(b, e - b)));
      if (it != name_index_.end()) {
        out.push_back({it->second, b, e});
        t += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++t;
  }
  return out;
}

bool SyntheticWorld::is_ancestor(std::size_t ancestor, std::size_t node) const {
  std::deque<std::size_t> queue(node_parents_[node].begin(), node_parents_[node].end());
  std::set<std::size_t> seen;
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    if (n == ancestor) return true;
    if (!seen.insert(n).second) continue;
    queue.insert(queue.end(), node_parents_[n].begin(), node_parents_[n].end());
  }
  return false;
}

std::vector<float> SyntheticWorld::encode_raw(std::string_view text) const {
  const std::size_t dim = params_.dim;
  const std::size_t active = concept_dims(dim);
  const auto mentions = find_mentions(text);
  std::vector<float> out(dim, 0.0f);

  auto fallback = [&] {
    Rng rng = keyed_rng(params_.seed, "unknown|" + std::string(text));
    const auto v = unit_direction(rng, dim, active);
    for (std::size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(2.0 * v[d]);
    return out;
  };
  if (mentions.empty()) return fallback();

  std::string skeleton;
  std::size_t cursor = 0;
  for (const auto& m : mentions) {
    skeleton.append(text.substr(cursor, m.begin - cursor));
    skeleton += kBareSkeleton;
    cursor = m.end;
  }
  skeleton.append(text.substr(cursor));
  const bool bare = skeleton == kBareSkeleton;

  // How far the text moves from what the name alone suggests towards what
  // the concept looks like. Naming a true ancestor disambiguates.
  const std::size_t head = mentions[0].node;
  double resolution = 0.0;
  if (mentions.size() >= 2 && is_ancestor(mentions[1].node, head)) {
    resolution = params_.context_resolution;
  } else if (!bare) {
    Rng rng = keyed_rng(params_.seed, "resolution|" + skeleton);
    resolution = rng.uniform() * params_.template_resolution;
  }

  const Concept& c = concepts_[head];
  std::vector<double> v = axpy(c.named, resolution, axpy(c.visual, -1.0, c.named));
  for (std::size_t i = 1; i < mentions.size(); ++i) {
    v = axpy(v, params_.parent_weight, concepts_[mentions[i].node].named);
  }
  const double per_dim = 1.0 / std::sqrt(static_cast<double>(dim));
  if (!bare && params_.style_noise > 0.0) {
    Rng rng = keyed_rng(params_.seed, "style|" + skeleton);
    for (std::size_t d = 0; d < active; ++d) v[d] += params_.style_noise * per_dim * rng.normal();
  }
  if (params_.text_noise > 0.0) {
    Rng rng = keyed_rng(params_.seed, "text|" + std::string(text));
    for (std::size_t d = 0; d < active; ++d) v[d] += params_.text_noise * per_dim * rng.normal();
  }
  const double n = norm(v);
  if (!(n > 0.0)) return fallback();

  // Raw norms wander with the template more for frequent concepts.
  Rng rng = keyed_rng(params_.seed, "norm|" + skeleton + "|" + node_names_[head]);
  const double magnitude = 2.0 + c.frequency * 1.5 * (2.0 * rng.uniform() - 1.0);
  for (std::size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(magnitude * v[d] / n);
  return out;
}

embedstore::EmbeddingMatrix SyntheticWorld::encode(std::span<const std::string> texts) const {
  const std::size_t dim = params_.dim;
  std::vector<float> data(texts.size() * dim);
  std::vector<double> raw_norms(texts.size());
  for (std::size_t r = 0; r < texts.size(); ++r) {
    const auto row = encode_raw(texts[r]);
    std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(r * dim));
    raw_norms[r] = embedstore::l2_norm(row);
  }
  return embedstore::EmbeddingMatrix::from_rows({texts.begin(), texts.end()}, dim,
                                                std::move(data), std::move(raw_norms));
}

embedstore::PromptBank SyntheticWorld::encode_bank(const std::vector<std::string>& ids) const {
  embedstore::PromptBank bank;
  bank.templates = templates_;
  bank.class_ids = ids;
  const std::size_t dim = params_.dim;
  for (const auto& tmpl : templates_) {
    std::vector<float> data(ids.size() * dim);
    std::vector<double> raw_norms(ids.size());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const std::string& name = hierarchy_.node(ids[r]).name;
      std::string text = tmpl;
      text.replace(text.find(embedstore::kLabelPlaceholder), embedstore::kLabelPlaceholder.size(),
                   name);
      const auto row = encode_raw(text);
      std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(r * dim));
      raw_norms[r] = embedstore::l2_norm(row);
    }
    bank.matrices.push_back(
        embedstore::EmbeddingMatrix::from_rows(ids, dim, std::move(data), std::move(raw_norms)));
  }
  return bank;
}

SyntheticWorld generate_world(const WorldParams& params) {
  check_params(params);
  SyntheticWorld w;
  w.params_ = params;
  w.templates_ = default_templates(params.n_templates);
  const std::size_t dim = params.dim;
  const std::size_t active = concept_dims(dim);
  Rng rng(mix(params.seed));

  std::set<std::string> reserved;
  for (const auto& t : w.templates_) {
    for (std::size_t i = 0; i < t.size();) {
      std::size_t j = i;
      while (j < t.size() && is_word_char(t[j])) ++j;
      if (j > i) reserved.insert(t.substr(i, j - i));
      i = j + 1;
    }
  }
  auto fresh_word = [&] {
    for (;;) {
      std::string word = pseudo_word(rng);
      if (reserved.insert(word).second) return word;
    }
  };

  std::vector<ontology::Node> nodes;
  auto add_node = [&](std::string id, std::string name, std::vector<std::size_t> parents,
                      SyntheticWorld::Concept centroid) {
    ontology::Node n;
    n.id = std::move(id);
    n.name = std::move(name);
    for (std::size_t p : parents) n.parent_ids.push_back(w.node_ids_[p]);
    w.node_ids_.push_back(n.id);
    w.node_names_.push_back(n.name);
    w.node_parents_.push_back(std::move(parents));
    w.concepts_.push_back(std::move(centroid));
    nodes.push_back(std::move(n));
    return w.node_ids_.size() - 1;
  };
  auto same = [](std::vector<double> v) {
    SyntheticWorld::Concept c;
    c.visual = v;
    c.named = std::move(v);
    return c;
  };

  const std::size_t root = add_node("root", "entity", {}, same(unit_direction(rng, dim, active)));
  std::vector<std::size_t> class_nodes;
  std::vector<std::size_t> class_group;
  // Images of a coarse class are drawn from its first two grandchildren.
  std::vector<std::vector<std::size_t>> sources;
  for (std::size_t p = 0; p < params.n_parents; ++p) {
    char id[32];
    std::snprintf(id, sizeof(id), "g%02zu", p);
    const std::size_t group = add_node(id, fresh_word(), {root}, same(unit_direction(rng, dim, active)));
    const bool odd = p % 2 == 1;
    std::vector<std::size_t> first_grandchildren;
    for (std::size_t j = 0; j < params.children_per_parent; ++j) {
      std::snprintf(id, sizeof(id), "c%02zu_%zu", p, j);
      ClassRole role = ClassRole::kClean;
      if (j == 0) role = odd ? ClassRole::kCoarse : ClassRole::kDrifted;
      if (j == 1 && odd) role = ClassRole::kAbsorber;

      std::vector<double> visual = normalized(axpy(
          w.concepts_[group].visual, params.child_spread, unit_direction(rng, dim, active)));
      if (role == ClassRole::kAbsorber) {
        visual = normalized(axpy(w.concepts_[first_grandchildren[0]].visual,
                                 params.absorber_spread, unit_direction(rng, dim, active)));
      }
      SyntheticWorld::Concept centroid = same(visual);
      centroid.frequency = 0.5 + 0.5 * rng.uniform();
      const std::string name = fresh_word();
      const std::size_t cls = add_node(id, name, {group}, std::move(centroid));
      w.class_ids_.push_back(id);
      w.roles_.push_back(role);
      class_nodes.push_back(cls);
      class_group.push_back(p);
      sources.push_back({cls});

      if (role == ClassRole::kCoarse) {
        sources.back().clear();
        for (std::size_t q = 0; q < 2; ++q) {
          char kid[32];
          std::snprintf(kid, sizeof(kid), "k%02zu_%zu", p, q);
          SyntheticWorld::Concept gc = same(normalized(axpy(
              w.concepts_[cls].visual, params.grandchild_spread, unit_direction(rng, dim, active))));
          gc.frequency = 0.05 + 0.95 * rng.uniform();
          const std::size_t k = add_node(kid, fresh_word() + " " + name, {cls}, std::move(gc));
          first_grandchildren.push_back(k);
          sources.back().push_back(k);
        }
      }
    }
  }

  // A drifted name points part of the way at an unrelated class.
  const std::size_t n_classes = class_nodes.size();
  for (std::size_t idx = 0; idx < n_classes; ++idx) {
    if (w.roles_[idx] != ClassRole::kDrifted) continue;
    for (std::size_t step = 0; step < n_classes; ++step) {
      const std::size_t decoy = (idx + 3 * params.children_per_parent + 1 + step) % n_classes;
      if (class_group[decoy] == class_group[idx]) continue;
      auto& c = w.concepts_[class_nodes[idx]];
      c.named = normalized(axpy(c.visual, params.name_drift, w.concepts_[class_nodes[decoy]].visual));
      break;
    }
  }

  for (std::size_t n = 0; n < w.node_names_.size(); ++n) {
    w.name_index_[w.node_names_[n]] = n;
    std::size_t words = 1;
    for (char ch : w.node_names_[n]) words += ch == ' ';
    w.longest_name_words_ = std::max(w.longest_name_words_, words);
  }
  w.hierarchy_ = ontology::Ontology::build(std::move(nodes));
  w.bank_ = w.encode_bank(w.class_ids_);
  w.node_bank_ = w.encode_bank(w.node_ids_);

  // Images: class centroid (or a grandchild centroid for coarse classes),
  // concept noise, and a background component the text side never sees.
  std::vector<std::string> image_ids(params.n_images);
  std::vector<std::size_t> labels(params.n_images);
  std::vector<float> raw(params.n_images * dim);
  std::vector<float> flipped(params.n_images * dim);
  for (std::size_t i = 0; i < params.n_images; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%05zu", i);
    image_ids[i] = id;
    const std::size_t y = rng.below(n_classes);
    labels[i] = y;
    std::size_t source = sources[y][0];
    if (sources[y].size() > 1 && rng.uniform() >= params.coarse_major_share) source = sources[y][1];

    std::vector<double> x =
        axpy(w.concepts_[source].visual, params.image_noise, unit_direction(rng, dim, active));
    if (active < dim) {
      std::vector<double> bg(dim, 0.0);
      for (std::size_t d = active; d < dim; ++d) bg[d] = rng.normal();
      x = axpy(x, params.nuisance * rng.uniform(), normalized(std::move(bg)));
    }
    x = normalized(std::move(x));
    const std::vector<double> f =
        normalized(axpy(x, params.flip_noise, unit_direction(rng, dim, active)));
    for (std::size_t d = 0; d < dim; ++d) {
      raw[i * dim + d] = static_cast<float>(x[d]);
      flipped[i * dim + d] = static_cast<float>(f[d]);
    }
  }
  w.images_.perturbations = {std::string(embedstore::kRawChannel), "flip-lr"};
  w.images_.image_ids = image_ids;
  w.images_.labels = labels;
  w.images_.matrices.push_back(embedstore::EmbeddingMatrix::from_rows(image_ids, dim, std::move(raw)));
  w.images_.matrices.push_back(
      embedstore::EmbeddingMatrix::from_rows(image_ids, dim, std::move(flipped)));
  return w;
}

void SyntheticWorld::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json world;
  world["params"] = params_.to_json();
  world["class_ids"] = class_ids_;
  world["roles"] = nlohmann::ordered_json::array();
  for (ClassRole r : roles_) world["roles"].push_back(std::string(to_string(r)));
  write_text_file(dir / "world.json", world.dump(2) + "\n");
  ontology::save_ontology(dir / "hierarchy.json", hierarchy_);

  auto write_bank = [&](const embedstore::PromptBank& bank, const std::filesystem::path& sub) {
    std::vector<std::string> files;
    for (std::size_t t = 0; t < bank.matrices.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "t%02zu.emb", t);
      embedstore::write_matrix(dir / sub / name, bank.matrices[t]);
      files.push_back(name);
    }
    embedstore::write_prompt_bank_manifest(dir / sub / "manifest.json", bank.templates,
                                           bank.class_ids, files);
  };
  write_bank(bank_, "bank");
  write_bank(node_bank_, "nodes");

  std::vector<std::string> files;
  for (std::size_t c = 0; c < images_.perturbations.size(); ++c) {
    const std::string name = images_.perturbations[c] + ".emb";
    embedstore::write_matrix(dir / "images" / name, images_.matrices[c]);
    files.push_back(name);
  }
  embedstore::write_image_bundle_manifest(dir / "images" / "manifest.json", images_.perturbations,
                                          images_.image_ids, images_.labels, files);
}

SyntheticWorld load_world(const std::filesystem::path& world_json) {
  const auto j = read_json_file(world_json);
  if (!j.is_object() || !j.contains("params")) {
    fail(ErrorKind::kFormat, world_json.string() + ": missing \"params\"");
  }
  return generate_world(WorldParams::from_json(j.at("params")));
}

}  // namespace hzs::evalkit
