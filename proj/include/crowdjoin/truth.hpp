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

#include <string>
#include <unordered_map>

#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Entity-cluster assignment for every object. Two objects match iff they
/// share a cluster id, so the induced labels are transitively consistent.
struct GroundTruth {
  std::unordered_map<ObjectId, std::string> cluster_of;

  bool covers(const ObjectId& o) const { return cluster_of.contains(o); }

  /// Throws MissingTruth.
  const std::string& cluster(const ObjectId& o) const {
    auto it = cluster_of.find(o);
    if (it == cluster_of.end()) throw MissingTruth(o);
    return it->second;
  }

  Label label(const ObjectId& a, const ObjectId& b) const {
    return cluster(a) == cluster(b) ? Label::Matching : Label::NonMatching;
  }
  Label label(const Pair& p) const { return label(p.left, p.right); }
};

}  // namespace crowdjoin
