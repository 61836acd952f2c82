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

#include "crowdjoin/labeling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "crowdjoin/random.hpp"

namespace crowdjoin {

namespace {

using Index = ClusterGraph::Index;
using Ends = std::vector<std::pair<Index, Index>>;

enum class ScanRole : std::uint8_t { LabeledMatching, LabeledNonMatching, Unlabeled, Published };

Ends intern_all(ClusterGraph& graph, std::span<const Pair> pairs) {
  Ends ends;
  ends.reserve(pairs.size());
  for (const auto& p : pairs) ends.emplace_back(graph.intern(p.left), graph.intern(p.right));
  return ends;
}

void check_unique_ids(std::span<const Pair> pairs) {
  std::unordered_set<std::string_view> seen;
  for (const auto& p : pairs) {
    if (!seen.insert(p.id).second) throw std::invalid_argument("duplicate pair id '" + p.id + "'");
  }
}

// The publishable-set scan over a reset graph. Unlabeled and published pairs
// are assumed matching; only unlabeled ones can be emitted. Assumed and
// labeled matches are merged even across a non-matching edge so that the
// graph keeps describing the minimum number of non-matching edges on any
// path, which is what makes an emitted pair safe to crowdsource.
template <class RoleOf>
std::vector<std::size_t> scan(ClusterGraph& graph, const Ends& ends, const LabelingOrder& order, RoleOf role_of) {
  graph.reset();
  std::vector<std::size_t> emitted;
  for (std::size_t pos : order.sequence) {
    const auto [a, b] = ends[pos];
    switch (role_of(pos)) {
      case ScanRole::LabeledMatching:
        graph.force_union(a, b);
        break;
      case ScanRole::LabeledNonMatching:
        graph.insert(a, b, Label::NonMatching);
        break;
      case ScanRole::Unlabeled:
        if (graph.deduce(a, b) == DeduceResult::Undeduced) emitted.push_back(pos);
        graph.force_union(a, b);
        break;
      case ScanRole::Published:
        graph.force_union(a, b);
        break;
    }
  }
  return emitted;
}

PairState labeled_state(Label l, LabelSource s) { return PairState{PairStatus::Labeled, l, s}; }

}  // namespace

std::string_view to_string(PairStatus s) noexcept {
  switch (s) {
    case PairStatus::Unlabeled:
      return "unlabeled";
    case PairStatus::Published:
      return "published";
    case PairStatus::Labeled:
      break;
  }
  return "labeled";
}

void EngineConfig::validate() const {
  if (nonmatching_first && !instant_decision) {
    throw std::invalid_argument("nonmatching_first requires instant_decision");
  }
}

std::size_t LabelingResult::conflicts() const {
  std::size_t n = 0;
  for (const auto& it : iterations) n += it.conflicts;
  return n;
}

PairIdSet LabelingResult::crowdsourced_ids() const {
  PairIdSet out;
  for (const auto& [id, lp] : labels) {
    if (lp.source == LabelSource::Crowd) out.insert(id);
  }
  return out;
}

PairIdSet LabelingResult::deduced_ids() const {
  PairIdSet out;
  for (const auto& [id, lp] : labels) {
    if (lp.source == LabelSource::Deduced) out.insert(id);
  }
  return out;
}

LabelingResult sequential_label(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd) {
  check_permutation(order, pairs.size());
  check_unique_ids(pairs);
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);

  LabelingResult result;
  for (std::size_t pos : order.sequence) {
    const Pair& pair = pairs[pos];
    const auto [a, b] = ends[pos];
    const DeduceResult deduced = graph.deduce(a, b);
    if (deduced == DeduceResult::Undeduced) {
      const Label answer = crowd.answer(pair);
      IterationReport report;
      report.iteration = result.iterations.size() + 1;
      report.published.push_back(pair.id);
      report.crowd_labeled.emplace_back(pair.id, answer);
      if (graph.insert(a, b, answer) == InsertOutcome::Conflict) ++report.conflicts;
      result.iterations.push_back(std::move(report));
      result.labels.emplace(pair.id, LabeledPair{pair, answer, LabelSource::Crowd});
      ++result.crowdsourced_count;
    } else {
      const Label label = *to_label(deduced);
      if (result.iterations.empty()) result.iterations.push_back(IterationReport{1, {}, {}, {}, 0});
      result.iterations.back().deduced.emplace_back(pair.id, label);
      result.labels.emplace(pair.id, LabeledPair{pair, label, LabelSource::Deduced});
      ++result.deduced_count;
    }
  }
  return result;
}

PairIdSet parallel_crowdsourced_pairs(const LabelingOrder& order, std::span<const Pair> pairs,
                                      const PairLabels& labeled) {
  check_permutation(order, pairs.size());
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);
  const auto emitted = scan(graph, ends, order, [&](std::size_t pos) {
    auto it = labeled.find(pairs[pos].id);
    if (it == labeled.end()) return ScanRole::Unlabeled;
    return it->second == Label::Matching ? ScanRole::LabeledMatching : ScanRole::LabeledNonMatching;
  });
  PairIdSet out;
  for (std::size_t pos : emitted) out.insert(pairs[pos].id);
  return out;
}

std::vector<LabelEvent> deduce_all(const LabelingOrder& order, std::span<const Pair> pairs,
                                   const PairLabels& labeled) {
  check_permutation(order, pairs.size());
  ClusterGraph graph;
  const Ends ends = intern_all(graph, pairs);
  for (std::size_t pos : order.sequence) {
    auto it = labeled.find(pairs[pos].id);
    if (it != labeled.end()) graph.insert(ends[pos].first, ends[pos].second, it->second);
  }
  // Deduced labels are already implied by the graph, so inserting them would
  // be redundant: one pass is the fixpoint.
  std::vector<LabelEvent> out;
  for (std::size_t pos : order.sequence) {
    if (labeled.contains(pairs[pos].id)) continue;
    if (auto l = to_label(graph.deduce(ends[pos].first, ends[pos].second))) out.emplace_back(pairs[pos].id, *l);
  }
  return out;
}

ParallelEngine::ParallelEngine(std::vector<Pair> pairs, LabelingOrder order, EngineConfig config)
    : pairs_(std::move(pairs)), order_(std::move(order)), config_(config) {
  config_.validate();
  check_permutation(order_, pairs_.size());
  check_unique_ids(pairs_);
  for (std::size_t i = 0; i < pairs_.size(); ++i) position_.emplace(pairs_[i].id, i);
  ends_ = intern_all(graph_, pairs_);
  intern_all(scan_, pairs_);
  states_.resize(pairs_.size());
  pending_ = order_.sequence;
}

std::optional<std::size_t> ParallelEngine::position_of(std::string_view pair_id) const {
  if (auto it = position_.find(pair_id); it != position_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::size_t> ParallelEngine::scan_publishable() {
  return scan(scan_, ends_, order_, [&](std::size_t pos) {
    const PairState& st = states_[pos];
    switch (st.status) {
      case PairStatus::Labeled:
        return *st.label == Label::Matching ? ScanRole::LabeledMatching : ScanRole::LabeledNonMatching;
      case PairStatus::Published:
        return ScanRole::Published;
      case PairStatus::Unlabeled:
        break;
    }
    return ScanRole::Unlabeled;
  });
}

std::vector<std::pair<std::size_t, Label>> ParallelEngine::deduce_pending() {
  std::vector<std::pair<std::size_t, Label>> out;
  for (std::size_t pos : pending_) {
    if (auto l = to_label(graph_.deduce(ends_[pos].first, ends_[pos].second))) {
      states_[pos] = labeled_state(*l, LabelSource::Deduced);
      ++labeled_;
      iterations_.back().deduced.emplace_back(pairs_[pos].id, *l);
      out.emplace_back(pos, *l);
    }
  }
  std::erase_if(pending_, [&](std::size_t pos) { return states_[pos].status != PairStatus::Unlabeled; });
  return out;
}

void ParallelEngine::publish(const std::vector<std::size_t>& positions, Delta& delta) {
  if (positions.empty()) return;
  IterationReport report;
  report.iteration = iterations_.size() + 1;
  for (std::size_t pos : positions) {
    states_[pos].status = PairStatus::Published;
    report.published.push_back(pairs_[pos].id);
    outstanding_.push_back(pos);
    delta.published.push_back(pos);
  }
  iterations_.push_back(std::move(report));
  std::erase_if(pending_, [&](std::size_t pos) { return states_[pos].status != PairStatus::Unlabeled; });
}

void ParallelEngine::advance(Delta& delta) {
  if (!config_.instant_decision && !outstanding_.empty()) return;
  auto deduced = deduce_pending();
  delta.deduced.insert(delta.deduced.end(), deduced.begin(), deduced.end());
  if (pending_.empty()) return;
  auto next = scan_publishable();
  // With consistent answers the first pending pair is always emitted once
  // nothing is outstanding. Contradictory answers can break that, so fall
  // back to it to guarantee progress.
  if (next.empty() && outstanding_.empty()) next.push_back(pending_.front());
  publish(next, delta);
}

ParallelEngine::Delta ParallelEngine::start() {
  if (started_) throw std::logic_error("engine already started");
  started_ = true;
  Delta delta;
  if (pending_.empty()) return delta;
  publish(scan_publishable(), delta);
  return delta;
}

ParallelEngine::Delta ParallelEngine::apply_answer(std::size_t position, Label label) {
  if (position >= states_.size() || states_[position].status != PairStatus::Published) {
    throw std::logic_error("answer for a pair that is not published");
  }
  Delta delta;
  states_[position] = labeled_state(label, LabelSource::Crowd);
  ++labeled_;
  ++crowdsourced_;
  std::erase(outstanding_, position);

  IterationReport& current = iterations_.back();
  current.crowd_labeled.emplace_back(pairs_[position].id, label);
  if (graph_.insert(ends_[position].first, ends_[position].second, label) == InsertOutcome::Conflict) {
    ++conflicts_;
    ++current.conflicts;
    delta.conflict = true;
  }
  advance(delta);
  return delta;
}

LabelingResult ParallelEngine::result() const {
  LabelingResult out;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const PairState& st = states_[i];
    if (st.status != PairStatus::Labeled) continue;
    out.labels.emplace(pairs_[i].id, LabeledPair{pairs_[i], *st.label, *st.source});
  }
  out.iterations = iterations_;
  out.crowdsourced_count = crowdsourced_;
  out.deduced_count = labeled_ - crowdsourced_;
  return out;
}

LabelingResult parallel_label(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd,
                              const EngineConfig& config) {
  if (config.mode != EngineMode::Parallel) throw std::invalid_argument("parallel_label needs a parallel config");
  ParallelEngine engine(std::vector<Pair>(pairs.begin(), pairs.end()), order, config);
  engine.start();
  Rng rng(config.seed);
  while (!engine.outstanding().empty()) {
    const auto& out = engine.outstanding();
    std::size_t pick = 0;
    if (config.nonmatching_first) {
      for (std::size_t i = 1; i < out.size(); ++i) {
        const Pair& best = pairs[out[pick]];
        const Pair& cand = pairs[out[i]];
        if (cand.likelihood < best.likelihood ||
            (cand.likelihood == best.likelihood && natural_less(cand.id, best.id))) {
          pick = i;
        }
      }
    } else {
      pick = static_cast<std::size_t>(uniform_below(rng, out.size()));
    }
    const std::size_t pos = out[pick];
    engine.apply_answer(pos, crowd.answer(pairs[pos]));
  }
  if (!engine.complete()) throw std::logic_error("parallel engine stalled with unlabeled pairs");
  return engine.result();
}

LabelingResult run_engine(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd,
                          const EngineConfig& config) {
  config.validate();
  if (config.mode == EngineMode::Sequential) return sequential_label(order, pairs, crowd);
  return parallel_label(order, pairs, crowd, config);
}

LabelingResult non_transitive_label(std::span<const Pair> pairs, CrowdBackend& crowd) {
  check_unique_ids(pairs);
  LabelingResult result;
  if (pairs.empty()) return result;
  IterationReport report;
  report.iteration = 1;
  for (const auto& p : pairs) {
    const Label l = crowd.answer(p);
    report.published.push_back(p.id);
    report.crowd_labeled.emplace_back(p.id, l);
    result.labels.emplace(p.id, LabeledPair{p, l, LabelSource::Crowd});
  }
  result.iterations.push_back(std::move(report));
  result.crowdsourced_count = pairs.size();
  return result;
}

}  // namespace crowdjoin
