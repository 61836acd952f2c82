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
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdjoin/cluster_graph.hpp"
#include "crowdjoin/crowd.hpp"
#include "crowdjoin/ordering.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

enum class PairStatus : std::uint8_t { Unlabeled, Published, Labeled };

std::string_view to_string(PairStatus s) noexcept;

struct PairState {
  PairStatus status = PairStatus::Unlabeled;
  std::optional<Label> label;
  std::optional<LabelSource> source;
};

enum class EngineMode : std::uint8_t { Sequential, Parallel };

struct EngineConfig {
  EngineMode mode = EngineMode::Parallel;
  /// Re-decide what to publish after every single answer.
  bool instant_decision = false;
  /// Answer the outstanding published pairs in ascending likelihood.
  bool nonmatching_first = false;
  /// Drives the simulated answer arrival order.
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when nonmatching_first is set without
  /// instant_decision.
  void validate() const;
};

using LabelEvent = std::pair<PairId, Label>;

struct IterationReport {
  std::size_t iteration = 0;
  std::vector<PairId> published;
  std::vector<LabelEvent> crowd_labeled;
  std::vector<LabelEvent> deduced;
  std::size_t conflicts = 0;
};

struct LabelingResult {
  std::map<PairId, LabeledPair, NaturalLess> labels;
  std::vector<IterationReport> iterations;
  std::size_t crowdsourced_count = 0;
  std::size_t deduced_count = 0;

  std::size_t conflicts() const;
  PairIdSet crowdsourced_ids() const;
  PairIdSet deduced_ids() const;
};

using PairLabels = std::map<PairId, Label, NaturalLess>;

/// Labels pairs one at a time in `order`: deduce when possible, otherwise
/// ask the crowd. One IterationReport per crowd question; deductions are
/// filed under the most recent question.
LabelingResult sequential_label(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd);

/// Pairs that must be crowdsourced no matter how the unlabeled ones turn
/// out: scans `order` over a fresh graph, inserting labeled pairs with their
/// label and assuming every unlabeled pair is matching. An unlabeled pair is
/// emitted iff its clusters differ and share no non-matching edge at the
/// time it is scanned.
PairIdSet parallel_crowdsourced_pairs(const LabelingOrder& order, std::span<const Pair> pairs,
                                      const PairLabels& labeled);

/// Labels of every unlabeled pair that follows from `labeled` by
/// transitivity, in `order` order. Conflicting inputs are skipped (first
/// write wins).
std::vector<LabelEvent> deduce_all(const LabelingOrder& order, std::span<const Pair> pairs,
                                   const PairLabels& labeled);

/// The parallel labeling state machine, driven by answers as they arrive.
///
/// Each pair moves Unlabeled -> Published -> Labeled(Crowd) or
/// Unlabeled -> Labeled(Deduced). start() publishes the first batch; every
/// apply_answer() returns what the answer unlocked. Without instant decision
/// the next batch is computed once all outstanding answers are in; with it
/// the publishable set is recomputed after every answer, treating
/// outstanding pairs as matching.
///
/// A crowd answer that contradicts the current graph is kept as that pair's
/// label but does not change the graph; it is counted as a conflict.
///
/// Not thread-safe; callers serialize access.
class ParallelEngine {
 public:
  struct Delta {
    std::vector<std::size_t> published;
    std::vector<std::pair<std::size_t, Label>> deduced;
    bool conflict = false;
  };

  ParallelEngine(std::vector<Pair> pairs, LabelingOrder order, EngineConfig config);
  ParallelEngine(const ParallelEngine&) = delete;
  ParallelEngine& operator=(const ParallelEngine&) = delete;
  ParallelEngine(ParallelEngine&&) noexcept = default;
  ParallelEngine& operator=(ParallelEngine&&) noexcept = default;

  Delta start();
  /// Throws std::logic_error unless `position` is currently Published.
  Delta apply_answer(std::size_t position, Label label);

  bool started() const noexcept { return started_; }
  bool complete() const noexcept { return labeled_ == pairs_.size(); }

  std::span<const Pair> pairs() const noexcept { return pairs_; }
  const LabelingOrder& order() const noexcept { return order_; }
  const EngineConfig& config() const noexcept { return config_; }
  const PairState& state(std::size_t position) const { return states_.at(position); }
  std::optional<std::size_t> position_of(std::string_view pair_id) const;

  /// Published pairs still waiting for an answer, in publication order.
  const std::vector<std::size_t>& outstanding() const noexcept { return outstanding_; }

  std::size_t labeled_count() const noexcept { return labeled_; }
  std::size_t crowdsourced_count() const noexcept { return crowdsourced_; }
  std::size_t deduced_count() const noexcept { return labeled_ - crowdsourced_; }
  std::size_t conflict_count() const noexcept { return conflicts_; }
  const std::vector<IterationReport>& iterations() const noexcept { return iterations_; }

  LabelingResult result() const;

 private:
  std::vector<std::size_t> scan_publishable();
  std::vector<std::pair<std::size_t, Label>> deduce_pending();
  void publish(const std::vector<std::size_t>& positions, Delta& delta);
  void advance(Delta& delta);

  std::vector<Pair> pairs_;
  LabelingOrder order_;
  EngineConfig config_;
  std::unordered_map<std::string_view, std::size_t> position_;

  ClusterGraph graph_;
  ClusterGraph scan_;
  std::vector<std::pair<ClusterGraph::Index, ClusterGraph::Index>> ends_;

  std::vector<PairState> states_;
  std::vector<std::size_t> pending_;  // Unlabeled, in labeling order
  std::vector<std::size_t> outstanding_;
  std::vector<IterationReport> iterations_;

  bool started_ = false;
  std::size_t labeled_ = 0;
  std::size_t crowdsourced_ = 0;
  std::size_t conflicts_ = 0;
};

/// Drives a ParallelEngine against a crowd backend. The next answer is taken
/// from the outstanding pairs uniformly at random (seeded by config.seed), or
/// lowest likelihood first with nonmatching_first. Throws
/// std::invalid_argument unless config.mode is Parallel.
LabelingResult parallel_label(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd,
                              const EngineConfig& config);

/// Dispatches on config.mode.
LabelingResult run_engine(const LabelingOrder& order, std::span<const Pair> pairs, CrowdBackend& crowd,
                          const EngineConfig& config);

/// Baseline without transitivity: every pair is crowdsourced, all in one
/// iteration.
LabelingResult non_transitive_label(std::span<const Pair> pairs, CrowdBackend& crowd);

}  // namespace crowdjoin
