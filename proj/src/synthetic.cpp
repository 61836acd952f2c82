// Copyright 2026 The crowdjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crowdjoin/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "crowdjoin/random.hpp"

namespace crowdjoin {

namespace {

std::size_t draw_cluster_size(Rng& rng, const SyntheticOptions& o) {
  // Inverse-CDF over the truncated power law p(k) ~ k^-exponent.
  double norm = 0.0;
  for (std::size_t k = 1; k <= o.max_cluster; ++k) norm += std::pow(static_cast<double>(k), -o.size_exponent);
  double u = uniform_double(rng) * norm;
  for (std::size_t k = 1; k <= o.max_cluster; ++k) {
    u -= std::pow(static_cast<double>(k), -o.size_exponent);
    if (u <= 0.0) return k;
  }
  return o.max_cluster;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SyntheticInstance make_synthetic(std::uint64_t seed, const SyntheticOptions& options) {
  Rng rng(splitmix64(seed));
  SyntheticInstance inst;
  std::size_t object = 0;
  std::size_t entity = 0;
  while (object < options.objects) {
    const std::size_t size = std::min(draw_cluster_size(rng, options), options.objects - object);
    const std::size_t family = entity / std::max<std::size_t>(1, options.family_size);
    for (std::size_t m = 0; m < size; ++m) {
      ObjectRecord rec;
      rec.id = "o" + std::to_string(++object);
      std::string title;
      std::string detail;
      for (std::size_t t = 0; t < options.family_tokens; ++t) {
        if (uniform_double(rng) < options.keep_probability) title += "f" + std::to_string(family) + "t" + std::to_string(t) + " ";
      }
      for (std::size_t t = 0; t < options.entity_tokens; ++t) {
        if (uniform_double(rng) < options.keep_probability) detail += "e" + std::to_string(entity) + "t" + std::to_string(t) + " ";
      }
      for (std::size_t t = 0; t < options.noise_tokens; ++t) {
        detail += "w" + std::to_string(uniform_below(rng, options.vocabulary)) + " ";
      }
      if (!title.empty()) title.pop_back();
      if (!detail.empty()) detail.pop_back();
      rec.attributes = {{"title", title}, {"detail", detail}};
      inst.truth.cluster_of.emplace(rec.id, "e" + std::to_string(entity));
      inst.dataset.records.push_back(std::move(rec));
    }
    ++entity;
  }
  return inst;
}

ClusterFixture within_cluster_pairs(const std::vector<std::size_t>& sizes) {
  ClusterFixture fx;
  std::size_t object = 0;
  std::size_t pair = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const std::size_t first = object + 1;
    for (std::size_t m = 0; m < sizes[c]; ++m) {
      fx.truth.cluster_of.emplace("o" + std::to_string(++object), "c" + std::to_string(c + 1));
    }
    for (std::size_t i = first; i <= object; ++i) {
      for (std::size_t j = i + 1; j <= object; ++j) {
        fx.pairs.push_back(make_pair("p" + std::to_string(++pair), "o" + std::to_string(i), "o" + std::to_string(j), 1.0));
      }
    }
  }
  return fx;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  const auto& records = dataset.records;
  out << "id";
  if (!records.empty()) {
    for (const auto& [name, value] : records.front().attributes) out << ',' << csv_field(name);
  }
  out << '\n';
  for (const auto& r : records) {
    out << csv_field(r.id);
    for (const auto& [name, value] : r.attributes) out << ',' << csv_field(value);
    out << '\n';
  }
}

void write_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  std::vector<std::pair<ObjectId, std::string>> rows(truth.cluster_of.begin(), truth.cluster_of.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return natural_less(a.first, b.first); });
  out << "object_id,cluster_id\n";
  for (const auto& [id, cluster] : rows) out << csv_field(id) << ',' << csv_field(cluster) << '\n';
}

}  // namespace crowdjoin
