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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "crowdjoin/ingestion.hpp"
#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Generator for entity-resolution style test data.
///
/// Entity sizes follow a truncated power law, so a few large duplicate
/// clusters sit next to many singletons. Entities are grouped into families
/// that share vocabulary (think one brand or one venue), which is where the
/// plausible-but-wrong candidate pairs come from. Each record keeps a random
/// subset of its entity's and family's tokens plus a little global noise.
struct SyntheticOptions {
  std::size_t objects = 200;
  double size_exponent = 1.6;
  std::size_t max_cluster = 40;
  std::size_t family_size = 3;
  std::size_t family_tokens = 4;
  std::size_t entity_tokens = 5;
  double keep_probability = 0.75;
  std::size_t noise_tokens = 2;
  std::size_t vocabulary = 400;
};

struct SyntheticInstance {
  Dataset dataset;
  GroundTruth truth;
};

SyntheticInstance make_synthetic(std::uint64_t seed, const SyntheticOptions& options = {});

/// Truth with one cluster per entry of `sizes` (objects "o1", "o2", ... in
/// cluster order) and every within-cluster pair as a candidate of
/// likelihood 1.
struct ClusterFixture {
  GroundTruth truth;
  std::vector<Pair> pairs;
};
ClusterFixture within_cluster_pairs(const std::vector<std::size_t>& sizes);

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
void write_truth_csv(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace crowdjoin
