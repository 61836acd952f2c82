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

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Union-find over objects where each cluster is a group of objects known
/// to match, plus symmetric non-matching edges between cluster roots.
///
/// Deduction is a constant number of finds: the same cluster means
/// matching, an edge between the two clusters means non-matching, anything
/// else is undeduced.
///
/// Objects are interned to dense indices. Engines that touch the same
/// objects repeatedly intern once and use the index overloads; the
/// ObjectId overloads register unknown objects lazily.
///
/// Not thread-safe. find() compresses paths and therefore counts as a
/// mutation; concurrent readers must use the const root()/deduce() calls and
/// only while no writer is active.
class ClusterGraph {
 public:
  using Index = std::uint32_t;

  ClusterGraph() = default;
  explicit ClusterGraph(std::span<const ObjectId> objects);

  /// Registers `id` as a singleton cluster if unseen; returns its index.
  Index intern(std::string_view id);
  /// Back to all-singleton clusters without edges; keeps interned objects.
  void reset();

  std::optional<Index> index_of(std::string_view id) const;
  const ObjectId& id_of(Index i) const { return ids_[i]; }

  Index find(Index i);
  ObjectId find(std::string_view id);
  /// Same as find() but without path compression.
  Index root(Index i) const;

  InsertOutcome insert(Index a, Index b, Label label);
  InsertOutcome insert_labeled(const Pair& pair, Label label);

  /// Unions the clusters of `a` and `b` even if a non-matching edge joins
  /// them; that edge is dropped. Returns false if they were already joined.
  /// Only for hypothetical scans where unlabeled pairs are assumed matching.
  bool force_union(Index a, Index b);

  DeduceResult deduce(Index a, Index b) const;
  /// Unregistered objects behave as singleton clusters without edges.
  DeduceResult deduce_label(const Pair& pair) const;

  bool has_edge(Index root_a, Index root_b) const;

  std::size_t object_count() const noexcept { return ids_.size(); }
  std::size_t cluster_count() const noexcept { return clusters_; }
  std::size_t edge_count() const noexcept { return edge_endpoints_ / 2; }
  std::size_t cluster_size(Index i) const { return size_[root(i)]; }

  /// Clusters as sorted member lists, sorted by first member. Independent
  /// of which member happens to be the root.
  std::vector<std::vector<ObjectId>> partition() const;
  /// Non-matching edges as (smallest member, smallest member) of the two
  /// clusters, sorted. Independent of representatives.
  std::vector<std::pair<ObjectId, ObjectId>> cluster_edges() const;

  /// Checks the forest, size, symmetry and no-self-loop invariants; throws
  /// std::logic_error describing the first violation.
  void validate() const;

 private:
  Index link(Index ra, Index rb);

  std::vector<ObjectId> ids_;
  std::unordered_map<ObjectId, Index> index_;
  std::vector<Index> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::unordered_set<Index>> edges_;
  std::size_t clusters_ = 0;
  std::size_t edge_endpoints_ = 0;
};

/// Free-function spelling of ClusterGraph::deduce_label.
inline DeduceResult deduce_label(const Pair& pair, const ClusterGraph& graph) {
  return graph.deduce_label(pair);
}

}  // namespace crowdjoin
