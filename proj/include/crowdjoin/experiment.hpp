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
#include <span>
#include <string>
#include <string_view>

#include "crowdjoin/labeling.hpp"
#include "crowdjoin/report.hpp"
#include "crowdjoin/truth.hpp"

namespace crowdjoin {

/// optimal and worst need ground truth; given keeps the candidate order.
enum class OrderKind : std::uint8_t { Optimal, Worst, Heuristic, Random, Given };

OrderKind parse_order_kind(std::string_view text);
std::string_view to_string(OrderKind k) noexcept;

LabelingOrder make_order(OrderKind kind, std::span<const Pair> pairs, const GroundTruth* truth, std::uint64_t seed);

/// Everything needed to reproduce one simulated run.
struct RunSpec {
  std::string dataset;
  std::string dataset2;
  std::string pairs;
  std::string truth;
  std::string likelihoods;
  double threshold = 0.5;
  OrderKind order = OrderKind::Heuristic;
  EngineMode mode = EngineMode::Parallel;
  bool instant_decision = false;
  bool nonmatching_first = false;
  /// false runs the baseline that crowdsources every pair.
  bool transitive = true;
  double error_rate = 0.0;
  int replicas = 1;
  std::size_t batch_size = 20;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
  EngineConfig engine_config() const;
  Json to_json() const;
};

struct RunOutcome {
  LabelingResult result;
  Report report;
  /// HITs needed when every iteration's publications are batched.
  std::size_t hits = 0;
};

/// Simulates the crowd from `truth`: truthful when error_rate is 0 and
/// replicas is 1, otherwise independent noisy workers with majority vote.
RunOutcome run_pipeline(const RunSpec& spec, std::span<const Pair> pairs, const GroundTruth& truth);

std::size_t hit_count(const LabelingResult& result, std::size_t batch_size);

/// Candidates whose likelihood is at least `threshold`, order kept.
std::vector<Pair> filter_by_threshold(std::span<const Pair> pairs, double threshold);

}  // namespace crowdjoin
