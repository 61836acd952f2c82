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

#include "crowdjoin/ordering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "crowdjoin/cluster_graph.hpp"
#include "crowdjoin/random.hpp"

namespace crowdjoin {

namespace {

using Index = ClusterGraph::Index;
using Ends = std::vector<std::pair<Index, Index>>;

Ends intern_all(ClusterGraph& graph, std::span<const Pair> pairs) {
  Ends ends;
  ends.reserve(pairs.size());
  for (const auto& p : pairs) ends.emplace_back(graph.intern(p.left), graph.intern(p.right));
  return ends;
}

// Runs the one-pair-at-a-time labeling on an already interned, freshly reset
// graph and writes the crowdsourced flags.
void run_sequential(ClusterGraph& graph, const Ends& ends, const LabelingOrder& order,
                    std::span<const Label> labels, std::vector<bool>& crowdsourced) {
  for (std::size_t pos : order.sequence) {
    const auto [a, b] = ends[pos];
    crowdsourced[pos] = graph.deduce(a, b) == DeduceResult::Undeduced;
    graph.insert(a, b, labels[pos]);
  }
}

bool consistent_on(ClusterGraph& graph, const Ends& ends, std::span<const Label> labels) {
  graph.reset();
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (labels[i] == Label::Matching) graph.insert(ends[i].first, ends[i].second, Label::Matching);
  }
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (labels[i] == Label::NonMatching &&
        graph.insert(ends[i].first, ends[i].second, Label::NonMatching) == InsertOutcome::Conflict) {
      return false;
    }
  }
  return true;
}

LabelingOrder block_order(std::span<const Pair> pairs, const GroundTruth& truth, Label first) {
  std::vector<std::size_t> head;
  std::vector<std::size_t> tail;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (truth.label(pairs[i]) == first ? head : tail).push_back(i);
  }
  const auto by_id = [&](std::size_t x, std::size_t y) { return natural_less(pairs[x].id, pairs[y].id); };
  std::stable_sort(head.begin(), head.end(), by_id);
  std::stable_sort(tail.begin(), tail.end(), by_id);
  head.insert(head.end(), tail.begin(), tail.end());
  return LabelingOrder{std::move(head)};
}

}  // namespace

void check_permutation(const LabelingOrder& order, std::size_t n) {
  if (order.size() != n) {
    throw std::invalid_argument("labeling order has " + std::to_string(order.size()) + " entries for " +
                                std::to_string(n) + " pairs");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t pos : order.sequence) {
    if (pos >= n || seen[pos]) throw std::invalid_argument("labeling order is not a permutation");
    seen[pos] = true;
  }
}

LabelingOrder order_from_ids(std::span<const Pair> pairs, std::span<const PairId> ids) {
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < pairs.size(); ++i) position.emplace(pairs[i].id, i);
  LabelingOrder order;
  order.sequence.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = position.find(id);
    if (it == position.end()) throw std::invalid_argument("unknown pair id '" + id + "' in order");
    order.sequence.push_back(it->second);
  }
  check_permutation(order, pairs.size());
  return order;
}

std::vector<PairId> order_ids(std::span<const Pair> pairs, const LabelingOrder& order) {
  std::vector<PairId> ids;
  ids.reserve(order.size());
  for (std::size_t pos : order.sequence) ids.push_back(pairs[pos].id);
  return ids;
}

LabelingOrder given_order(std::span<const Pair> pairs) {
  LabelingOrder order;
  order.sequence.resize(pairs.size());
  std::iota(order.sequence.begin(), order.sequence.end(), std::size_t{0});
  return order;
}

LabelingOrder oracle_optimal_order(std::span<const Pair> pairs, const GroundTruth& truth) {
  return block_order(pairs, truth, Label::Matching);
}

LabelingOrder oracle_worst_order(std::span<const Pair> pairs, const GroundTruth& truth) {
  return block_order(pairs, truth, Label::NonMatching);
}

LabelingOrder heuristic_order(std::span<const Pair> pairs) {
  LabelingOrder order = given_order(pairs);
  std::stable_sort(order.sequence.begin(), order.sequence.end(), [&](std::size_t x, std::size_t y) {
    if (pairs[x].likelihood != pairs[y].likelihood) return pairs[x].likelihood > pairs[y].likelihood;
    return natural_less(pairs[x].id, pairs[y].id);
  });
  return order;
}

LabelingOrder random_order(std::span<const Pair> pairs, std::uint64_t seed) {
  LabelingOrder order = given_order(pairs);
  Rng rng(seed);
  shuffle(order.sequence.begin(), order.sequence.end(), rng);
  return order;
}

std::vector<bool> simulate_sequential(const LabelingOrder& order, std::span<const Pair> pairs,
                                      std::span<const Label> labels) {
  check_permutation(order, pairs.size());
  if (labels.size() != pairs.size()) throw std::invalid_argument("one label per pair required");
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);
  std::vector<bool> crowdsourced(pairs.size(), false);
  run_sequential(graph, ends, order, labels, crowdsourced);
  return crowdsourced;
}

CrowdsourcedCount crowdsourced_count(const LabelingOrder& order, std::span<const Pair> pairs,
                                     const GroundTruth& truth) {
  std::vector<Label> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(truth.label(p));
  const auto flags = simulate_sequential(order, pairs, labels);
  CrowdsourcedCount out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (flags[i]) {
      out.crowdsourced_ids.insert(pairs[i].id);
    } else {
      out.deduced_ids.insert(pairs[i].id);
    }
  }
  out.count = out.crowdsourced_ids.size();
  return out;
}

bool is_consistent(std::span<const Pair> pairs, std::span<const Label> labels) {
  if (labels.size() != pairs.size()) throw std::invalid_argument("one label per pair required");
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);
  return consistent_on(graph, ends, labels);
}

std::vector<World> enumerate_consistent_worlds(std::span<const Pair> pairs, std::size_t cap) {
  const std::size_t n = pairs.size();
  if (n > cap) {
    throw CapExceeded("world enumeration is limited to " + std::to_string(cap) + " pairs, got " +
                      std::to_string(n));
  }
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);

  std::vector<World> worlds;
  std::vector<Label> labels(n);
  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double weight = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool non_matching = (mask >> i) & 1U;
      labels[i] = non_matching ? Label::NonMatching : Label::Matching;
      weight *= non_matching ? 1.0 - pairs[i].likelihood : pairs[i].likelihood;
    }
    if (!consistent_on(graph, ends, labels)) continue;
    total += weight;
    worlds.push_back(World{labels, weight});
  }
  if (!(total > 0.0)) throw Error("no transitively consistent world has positive probability");
  for (auto& w : worlds) w.probability /= total;
  return worlds;
}

std::vector<double> crowdsourced_probabilities(const LabelingOrder& order, std::span<const Pair> pairs,
                                               std::size_t cap) {
  check_permutation(order, pairs.size());
  const auto worlds = enumerate_consistent_worlds(pairs, cap);
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);
  std::vector<double> probability(pairs.size(), 0.0);
  std::vector<bool> flags(pairs.size(), false);
  for (const auto& w : worlds) {
    graph.reset();
    run_sequential(graph, ends, order, w.assignment, flags);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (flags[i]) probability[i] += w.probability;
    }
  }
  return probability;
}

double expected_crowdsourced_count(const LabelingOrder& order, std::span<const Pair> pairs,
                                   std::size_t cap) {
  const auto p = crowdsourced_probabilities(order, pairs, cap);
  return std::accumulate(p.begin(), p.end(), 0.0);
}

}  // namespace crowdjoin
