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

#include "crowdjoin/brute_force.hpp"

#include <map>
#include <string>
#include <vector>

namespace crowdjoin {

namespace {

struct Edge {
  std::size_t to;
  bool non_matching;
};

class PathWalker {
 public:
  PathWalker(const std::vector<std::vector<Edge>>& adj, std::size_t target)
      : adj_(adj), target_(target), on_path_(adj.size(), false) {}

  void walk(std::size_t at, int non_matching) {
    if (at == target_) {
      if (non_matching == 0) found_zero_ = true;
      if (non_matching == 1) found_one_ = true;
      return;
    }
    // Paths already carrying two non-matching edges cannot end at 0 or 1.
    if (non_matching >= 2) return;
    on_path_[at] = true;
    for (const Edge& e : adj_[at]) {
      if (!on_path_[e.to]) walk(e.to, non_matching + (e.non_matching ? 1 : 0));
    }
    on_path_[at] = false;
  }

  bool found_zero() const { return found_zero_; }
  bool found_one() const { return found_one_; }

 private:
  const std::vector<std::vector<Edge>>& adj_;
  std::size_t target_;
  std::vector<bool> on_path_;
  bool found_zero_ = false;
  bool found_one_ = false;
};

}  // namespace

DeduceResult brute_force_deduce(const Pair& pair, std::span<const LabeledPair> labeled) {
  std::map<ObjectId, std::size_t> index;
  const auto id = [&](const ObjectId& o) {
    return index.try_emplace(o, index.size()).first->second;
  };
  const std::size_t source = id(pair.left);
  const std::size_t target = id(pair.right);
  for (const auto& lp : labeled) {
    id(lp.pair.left);
    id(lp.pair.right);
  }
  if (index.size() > kBruteForceObjectCap) {
    throw CapExceeded("brute-force deduction is limited to " + std::to_string(kBruteForceObjectCap) +
                      " objects, got " + std::to_string(index.size()));
  }

  std::vector<std::vector<Edge>> adj(index.size());
  for (const auto& lp : labeled) {
    const std::size_t a = index.at(lp.pair.left);
    const std::size_t b = index.at(lp.pair.right);
    const bool nm = lp.label == Label::NonMatching;
    adj[a].push_back({b, nm});
    adj[b].push_back({a, nm});
  }

  PathWalker walker(adj, target);
  walker.walk(source, 0);
  if (walker.found_zero()) return DeduceResult::Matching;
  if (walker.found_one()) return DeduceResult::NonMatching;
  return DeduceResult::Undeduced;
}

}  // namespace crowdjoin
