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
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Comparator for pair-id keyed containers.
struct NaturalLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept { return natural_less(a, b); }
};

using PairIdSet = std::set<PairId, NaturalLess>;

/// A permutation of the candidate list, stored as positions into it.
struct LabelingOrder {
  std::vector<std::size_t> sequence;

  std::size_t size() const noexcept { return sequence.size(); }
  friend bool operator==(const LabelingOrder&, const LabelingOrder&) = default;
};

/// Throws std::invalid_argument unless `order` is a permutation of [0, n).
void check_permutation(const LabelingOrder& order, std::size_t n);

/// Resolves pair ids to positions; throws std::invalid_argument on unknown or
/// missing ids.
LabelingOrder order_from_ids(std::span<const Pair> pairs, std::span<const PairId> ids);
std::vector<PairId> order_ids(std::span<const Pair> pairs, const LabelingOrder& order);
/// Candidate-list order, i.e. the identity permutation.
LabelingOrder given_order(std::span<const Pair> pairs);

/// All truly matching pairs first, then the rest; pair-id ascending within
/// each block. Needs ground truth, so only usable as a baseline.
LabelingOrder oracle_optimal_order(std::span<const Pair> pairs, const GroundTruth& truth);
/// Non-matching block first. The mirror image of oracle_optimal_order.
LabelingOrder oracle_worst_order(std::span<const Pair> pairs, const GroundTruth& truth);
/// Likelihood descending, ties by pair id ascending.
LabelingOrder heuristic_order(std::span<const Pair> pairs);
LabelingOrder random_order(std::span<const Pair> pairs, std::uint64_t seed);

struct CrowdsourcedCount {
  std::size_t count = 0;
  PairIdSet crowdsourced_ids;
  PairIdSet deduced_ids;
};

/// Labels the pairs one by one in `order` with truthful answers and counts
/// how many could not be deduced from the pairs before them.
CrowdsourcedCount crowdsourced_count(const LabelingOrder& order, std::span<const Pair> pairs,
                                     const GroundTruth& truth);

/// Same simulation driven by an explicit label per candidate position.
/// Returns one flag per position: true if that pair had to be crowdsourced.
std::vector<bool> simulate_sequential(const LabelingOrder& order, std::span<const Pair> pairs,
                                      std::span<const Label> labels);

inline constexpr std::size_t kWorldEnumerationCap = 20;

/// One full label assignment (by candidate position) and its probability
/// after conditioning on transitive consistency.
struct World {
  std::vector<Label> assignment;
  double probability = 0.0;
};

/// Whether the labels admit no cycle with exactly one non-matching edge.
bool is_consistent(std::span<const Pair> pairs, std::span<const Label> labels);

/// Every transitively consistent assignment, in mask order (bit i set means
/// position i is non-matching). Probabilities are the product of likelihood
/// (matching) or 1 - likelihood (non-matching), renormalized over the
/// consistent worlds. Throws CapExceeded above `cap` pairs and Error when no
/// consistent world has positive weight.
std::vector<World> enumerate_consistent_worlds(std::span<const Pair> pairs,
                                               std::size_t cap = kWorldEnumerationCap);

/// P(pair is crowdsourced) per candidate position under `order`.
std::vector<double> crowdsourced_probabilities(const LabelingOrder& order, std::span<const Pair> pairs,
                                               std::size_t cap = kWorldEnumerationCap);

/// Expected number of crowdsourced pairs: the sum of
/// crowdsourced_probabilities.
double expected_crowdsourced_count(const LabelingOrder& order, std::span<const Pair> pairs,
                                   std::size_t cap = kWorldEnumerationCap);

}  // namespace crowdjoin
