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

#include "crowdjoin/cluster_graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace crowdjoin {

ClusterGraph::ClusterGraph(std::span<const ObjectId> objects) {
  for (const auto& o : objects) intern(o);
}

ClusterGraph::Index ClusterGraph::intern(std::string_view id) {
  ObjectId key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto i = static_cast<Index>(ids_.size());
  ids_.push_back(key);
  index_.emplace(std::move(key), i);
  parent_.push_back(i);
  size_.push_back(1);
  edges_.emplace_back();
  ++clusters_;
  return i;
}

void ClusterGraph::reset() {
  for (Index i = 0; i < ids_.size(); ++i) {
    parent_[i] = i;
    size_[i] = 1;
    edges_[i].clear();
  }
  clusters_ = ids_.size();
  edge_endpoints_ = 0;
}

std::optional<ClusterGraph::Index> ClusterGraph::index_of(std::string_view id) const {
  if (auto it = index_.find(ObjectId(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

ClusterGraph::Index ClusterGraph::root(Index i) const {
  while (parent_[i] != i) i = parent_[i];
  return i;
}

ClusterGraph::Index ClusterGraph::find(Index i) {
  Index r = root(i);
  while (parent_[i] != r) {
    const Index next = parent_[i];
    parent_[i] = r;
    i = next;
  }
  return r;
}

ObjectId ClusterGraph::find(std::string_view id) {
  return ids_[find(intern(id))];
}

bool ClusterGraph::has_edge(Index root_a, Index root_b) const {
  const auto& smaller = edges_[root_a].size() <= edges_[root_b].size() ? edges_[root_a] : edges_[root_b];
  const Index other = &smaller == &edges_[root_a] ? root_b : root_a;
  return smaller.contains(other);
}

// Union by size; equal sizes keep the lexicographically smaller id as root.
// The loser's edges are re-homed onto the survivor and an edge between the
// two (possible only via force_union) is dropped.
ClusterGraph::Index ClusterGraph::link(Index ra, Index rb) {
  Index winner = ra;
  Index loser = rb;
  if (size_[ra] < size_[rb] || (size_[ra] == size_[rb] && ids_[rb] < ids_[ra])) {
    std::swap(winner, loser);
  }
  parent_[loser] = winner;
  size_[winner] += size_[loser];
  --clusters_;

  auto moved = std::move(edges_[loser]);
  edges_[loser].clear();
  for (Index n : moved) {
    edges_[n].erase(loser);
    edge_endpoints_ -= 2;
    if (n == winner) continue;
    if (edges_[winner].insert(n).second) {
      edges_[n].insert(winner);
      edge_endpoints_ += 2;
    }
  }
  return winner;
}

InsertOutcome ClusterGraph::insert(Index a, Index b, Label label) {
  const Index ra = find(a);
  const Index rb = find(b);
  if (label == Label::Matching) {
    if (ra == rb) return InsertOutcome::Redundant;
    if (has_edge(ra, rb)) return InsertOutcome::Conflict;
    link(ra, rb);
    return InsertOutcome::Applied;
  }
  if (ra == rb) return InsertOutcome::Conflict;
  if (!edges_[ra].insert(rb).second) return InsertOutcome::Redundant;
  edges_[rb].insert(ra);
  edge_endpoints_ += 2;
  return InsertOutcome::Applied;
}

InsertOutcome ClusterGraph::insert_labeled(const Pair& pair, Label label) {
  const Index a = intern(pair.left);
  const Index b = intern(pair.right);
  return insert(a, b, label);
}

bool ClusterGraph::force_union(Index a, Index b) {
  const Index ra = find(a);
  const Index rb = find(b);
  if (ra == rb) return false;
  link(ra, rb);
  return true;
}

DeduceResult ClusterGraph::deduce(Index a, Index b) const {
  const Index ra = root(a);
  const Index rb = root(b);
  if (ra == rb) return DeduceResult::Matching;
  if (has_edge(ra, rb)) return DeduceResult::NonMatching;
  return DeduceResult::Undeduced;
}

DeduceResult ClusterGraph::deduce_label(const Pair& pair) const {
  const auto a = index_of(pair.left);
  const auto b = index_of(pair.right);
  if (!a || !b) return DeduceResult::Undeduced;
  return deduce(*a, *b);
}

std::vector<std::vector<ObjectId>> ClusterGraph::partition() const {
  std::map<Index, std::vector<ObjectId>> by_root;
  for (Index i = 0; i < ids_.size(); ++i) by_root[root(i)].push_back(ids_[i]);
  std::vector<std::vector<ObjectId>> out;
  out.reserve(by_root.size());
  for (auto& [r, members] : by_root) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<ObjectId, ObjectId>> ClusterGraph::cluster_edges() const {
  std::vector<const ObjectId*> smallest(ids_.size(), nullptr);
  for (Index i = 0; i < ids_.size(); ++i) {
    const Index r = root(i);
    if (!smallest[r] || ids_[i] < *smallest[r]) smallest[r] = &ids_[i];
  }
  std::vector<std::pair<ObjectId, ObjectId>> out;
  for (Index r = 0; r < ids_.size(); ++r) {
    for (Index n : edges_[r]) {
      if (r < n) {
        auto e = std::make_pair(*smallest[r], *smallest[n]);
        if (e.second < e.first) std::swap(e.first, e.second);
        out.push_back(std::move(e));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ClusterGraph::validate() const {
  const auto fail = [](const std::string& what) { throw std::logic_error("ClusterGraph: " + what); };
  std::vector<std::uint32_t> counted(ids_.size(), 0);
  std::size_t roots = 0;
  std::size_t endpoints = 0;
  for (Index i = 0; i < ids_.size(); ++i) {
    // A cycle in the parent links would make this walk exceed n steps.
    Index cur = i;
    std::size_t steps = 0;
    while (parent_[cur] != cur) {
      cur = parent_[cur];
      if (++steps > ids_.size()) fail("parent links contain a cycle at '" + ids_[i] + "'");
    }
    ++counted[cur];
    if (parent_[i] == i) ++roots;
  }
  if (roots != clusters_) fail("cluster count out of sync");
  for (Index i = 0; i < ids_.size(); ++i) {
    const bool is_root = parent_[i] == i;
    if (is_root && counted[i] != size_[i]) fail("size of '" + ids_[i] + "' out of sync");
    if (!is_root && !edges_[i].empty()) fail("non-root '" + ids_[i] + "' owns edges");
    for (Index n : edges_[i]) {
      if (n == i) fail("self-loop on '" + ids_[i] + "'");
      if (parent_[n] != n) fail("edge points at non-root '" + ids_[n] + "'");
      if (!edges_[n].contains(i)) fail("asymmetric edge '" + ids_[i] + "' -> '" + ids_[n] + "'");
    }
    endpoints += edges_[i].size();
  }
  if (endpoints != edge_endpoints_) fail("edge count out of sync");
}

}  // namespace crowdjoin
