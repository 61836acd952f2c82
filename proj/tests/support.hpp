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

// Fixtures and independent reference implementations shared by the tests.
// The oracles here deliberately avoid ClusterGraph: deduction is recomputed
// from scratch with a breadth-first closure over the labeled pairs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "crowdjoin/labeling.hpp"
#include "crowdjoin/ordering.hpp"
#include "crowdjoin/random.hpp"
#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace testing_support {

using namespace crowdjoin;

inline GroundTruth truth_of(const std::map<std::string, std::string>& m) {
  GroundTruth t;
  for (const auto& [o, c] : m) t.cluster_of.emplace(o, c);
  return t;
}

/// The eight-pair running example: o1,o2,o3 are one entity, o4,o5 another,
/// o6 a third. Likelihoods strictly decrease from p1 to p8.
inline std::vector<Pair> running_pairs() {
  return {make_pair("p1", "o2", "o3", 0.3333333333333333), make_pair("p2", "o1", "o2", 0.23809523809523808),
          make_pair("p3", "o1", "o6", 0.23529411764705882), make_pair("p4", "o1", "o3", 0.2),
          make_pair("p5", "o4", "o5", 0.19047619047619047), make_pair("p6", "o4", "o6", 0.17391304347826086),
          make_pair("p7", "o2", "o4", 0.14285714285714285), make_pair("p8", "o5", "o6", 0.1111111111111111)};
}

inline GroundTruth running_truth() {
  return truth_of({{"o1", "A"}, {"o2", "A"}, {"o3", "A"}, {"o4", "B"}, {"o5", "B"}, {"o6", "C"}});
}

/// Triangle with likelihoods 0.9, 0.5, 0.1.
inline std::vector<Pair> triangle_pairs() {
  return {make_pair("p1", "o1", "o2", 0.9), make_pair("p2", "o2", "o3", 0.5), make_pair("p3", "o1", "o3", 0.1)};
}

namespace oracle {

/// Matching components of the labeled pairs, then a direct check for a
/// non-matching label between the two components.
inline DeduceResult closure_deduce(const Pair& q, const std::vector<LabeledPair>& labeled) {
  std::map<ObjectId, std::vector<ObjectId>> adj;
  for (const auto& lp : labeled) {
    if (lp.label == Label::Matching) {
      adj[lp.pair.left].push_back(lp.pair.right);
      adj[lp.pair.right].push_back(lp.pair.left);
    }
  }
  auto component = [&](const ObjectId& start) {
    std::set<ObjectId> seen{start};
    std::queue<ObjectId> todo;
    todo.push(start);
    while (!todo.empty()) {
      auto o = todo.front();
      todo.pop();
      for (const auto& n : adj[o]) {
        if (seen.insert(n).second) todo.push(n);
      }
    }
    return seen;
  };
  const auto a = component(q.left);
  if (a.contains(q.right)) return DeduceResult::Matching;
  const auto b = component(q.right);
  for (const auto& lp : labeled) {
    if (lp.label != Label::NonMatching) continue;
    if ((a.contains(lp.pair.left) && b.contains(lp.pair.right)) ||
        (a.contains(lp.pair.right) && b.contains(lp.pair.left))) {
      return DeduceResult::NonMatching;
    }
  }
  return DeduceResult::Undeduced;
}

/// True per position if that pair needs the crowd when labeling in order.
inline std::vector<bool> sequential_flags(const LabelingOrder& order, const std::vector<Pair>& pairs,
                                          const std::vector<Label>& labels) {
  std::vector<bool> asked(pairs.size(), false);
  std::vector<LabeledPair> done;
  for (std::size_t pos : order.sequence) {
    if (closure_deduce(pairs[pos], done) == DeduceResult::Undeduced) asked[pos] = true;
    done.push_back({pairs[pos], labels[pos], LabelSource::Crowd});
  }
  return asked;
}

inline std::size_t sequential_count(const LabelingOrder& order, const std::vector<Pair>& pairs,
                                    const GroundTruth& truth) {
  std::vector<Label> labels;
  for (const auto& p : pairs) labels.push_back(truth.label(p));
  const auto f = sequential_flags(order, pairs, labels);
  return static_cast<std::size_t>(std::count(f.begin(), f.end(), true));
}

/// No non-matching label inside a matching component.
inline bool consistent(const std::vector<Pair>& pairs, const std::vector<Label>& labels) {
  std::vector<LabeledPair> matching;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (labels[i] == Label::Matching) matching.push_back({pairs[i], Label::Matching, LabelSource::Crowd});
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (labels[i] == Label::NonMatching && closure_deduce(pairs[i], matching) == DeduceResult::Matching) {
      return false;
    }
  }
  return true;
}

inline std::vector<Label> labels_of_mask(std::size_t n, std::uint64_t mask) {
  std::vector<Label> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = (mask >> i) & 1 ? Label::NonMatching : Label::Matching;
  return l;
}

inline double expected_count(const LabelingOrder& order, const std::vector<Pair>& pairs) {
  const std::size_t n = pairs.size();
  double total = 0.0, weighted = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto labels = labels_of_mask(n, mask);
    if (!consistent(pairs, labels)) continue;
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      w *= labels[i] == Label::Matching ? pairs[i].likelihood : 1.0 - pairs[i].likelihood;
    }
    const auto f = sequential_flags(order, pairs, labels);
    total += w;
    weighted += w * static_cast<double>(std::count(f.begin(), f.end(), true));
  }
  return weighted / total;
}

}  // namespace oracle

struct Instance {
  GroundTruth truth;
  std::vector<Pair> pairs;
};

/// `objects` objects spread over a random number of entities, and up to
/// `max_pairs` distinct random pairs with random likelihoods.
inline Instance random_instance(Rng& rng, std::size_t objects, std::size_t max_pairs) {
  Instance inst;
  const std::size_t entities = 1 + uniform_below(rng, objects);
  for (std::size_t i = 1; i <= objects; ++i) {
    inst.truth.cluster_of.emplace("o" + std::to_string(i), "e" + std::to_string(uniform_below(rng, entities)));
  }
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 1; i <= objects; ++i) {
    for (std::size_t j = i + 1; j <= objects; ++j) all.emplace_back(i, j);
  }
  shuffle(all.begin(), all.end(), rng);
  const std::size_t n = std::min(all.size(), 1 + static_cast<std::size_t>(uniform_below(rng, max_pairs)));
  for (std::size_t k = 0; k < n; ++k) {
    const double lk = static_cast<double>(uniform_below(rng, 101)) / 100.0;
    inst.pairs.push_back(make_pair("p" + std::to_string(k + 1), "o" + std::to_string(all[k].first),
                                   "o" + std::to_string(all[k].second), lk));
  }
  return inst;
}

inline std::vector<Label> truth_labels(const Instance& inst) {
  std::vector<Label> out;
  for (const auto& p : inst.pairs) out.push_back(inst.truth.label(p));
  return out;
}

/// Answers outstanding pairs with `crowd` in the order the config asks for.
/// `ascending` forces lowest-likelihood-first arrival even without instant
/// decision, which the engine config itself does not allow.
inline LabelingResult drive(ParallelEngine& engine, CrowdBackend& crowd, bool ascending, std::uint64_t seed) {
  engine.start();
  Rng rng(seed);
  while (!engine.outstanding().empty()) {
    const auto& out = engine.outstanding();
    std::size_t pick = 0;
    if (ascending) {
      for (std::size_t i = 1; i < out.size(); ++i) {
        const auto& a = engine.pairs()[out[i]];
        const auto& b = engine.pairs()[out[pick]];
        if (a.likelihood < b.likelihood || (a.likelihood == b.likelihood && natural_less(a.id, b.id))) pick = i;
      }
    } else {
      pick = uniform_below(rng, out.size());
    }
    const auto pos = out[pick];
    engine.apply_answer(pos, crowd.answer(engine.pairs()[pos]));
  }
  return engine.result();
}

}  // namespace testing_support
