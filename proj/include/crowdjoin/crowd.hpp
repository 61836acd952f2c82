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
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

struct CrowdCapabilities {
  /// answer() returns the final label immediately.
  bool synchronous = true;
  /// The caller may choose the order in which published pairs are answered.
  bool supports_reorder = true;
};

/// A source of final labels for published pairs. Implementations must be
/// safe to call concurrently.
class CrowdBackend {
 public:
  virtual ~CrowdBackend() = default;
  virtual Label answer(const Pair& pair) = 0;
  virtual CrowdCapabilities capabilities() const { return {}; }
};

/// Throws MissingTruth if either object lacks a cluster.
Label truth_answer(const Pair& pair, const GroundTruth& truth);

struct NoiseModel {
  double error_rate = 0.0;
  std::uint64_t seed = 0;
};

/// One worker's answer: the truthful label flipped with probability
/// `error_rate`. The flip is a pure function of (seed, pair id, worker id),
/// so errors are independent across pairs and workers yet reproducible.
Label noisy_answer(const Pair& pair, const GroundTruth& truth, const NoiseModel& noise,
                   std::string_view worker_id);

/// Most frequent label; ties resolve to NonMatching. Throws
/// std::invalid_argument on empty input.
Label majority_vote(std::span<const Label> answers);

/// Always answers with the ground truth.
class TruthfulCrowd final : public CrowdBackend {
 public:
  explicit TruthfulCrowd(GroundTruth truth) : truth_(std::move(truth)) {}
  Label answer(const Pair& pair) override { return truth_answer(pair, truth_); }

 private:
  GroundTruth truth_;
};

/// `replicas` independent noisy workers per pair, resolved by majority vote.
class NoisyCrowd final : public CrowdBackend {
 public:
  NoisyCrowd(GroundTruth truth, NoiseModel noise, int replicas);
  Label answer(const Pair& pair) override;

  static std::string worker_name(int replica) { return "w" + std::to_string(replica); }

 private:
  GroundTruth truth_;
  NoiseModel noise_;
  int replicas_;
};

/// Replays fixed answers keyed by pair id; throws Error for unknown pairs.
class ScriptedCrowd final : public CrowdBackend {
 public:
  explicit ScriptedCrowd(std::unordered_map<PairId, Label> answers) : answers_(std::move(answers)) {}
  Label answer(const Pair& pair) override;

 private:
  std::unordered_map<PairId, Label> answers_;
};

/// A batch of pairs shown to one worker at a time, replicated across
/// `replicas` workers. A pair's final label exists once it has `replicas`
/// answers.
struct Hit {
  std::string hit_id;
  std::vector<PairId> pair_ids;
  int replicas = 1;
  std::map<std::pair<PairId, std::string>, Label> answers;

  bool contains(std::string_view pair_id) const;
  bool answered_by(const PairId& pair_id, const std::string& worker) const;
  std::size_t answer_count(const PairId& pair_id) const;
  /// False if the worker already answered this pair.
  bool record(const PairId& pair_id, const std::string& worker, Label label);
  std::optional<Label> final_label(const PairId& pair_id) const;
  /// True once every pair has its final label.
  bool complete() const;
};

/// Consecutive chunks of at most `batch_size` pairs, ids "h<first_number>",
/// "h<first_number+1>", ... Throws std::invalid_argument if batch_size or
/// replicas is below 1.
std::vector<Hit> batch_into_hits(std::span<const PairId> pair_ids, std::size_t batch_size, int replicas,
                                 std::size_t first_number = 1);

}  // namespace crowdjoin
