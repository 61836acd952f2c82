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
#include <map>
#include <vector>

#include "crowdjoin/labeling.hpp"
#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Matching-pair quality. Empty denominators give precision and recall 1.0;
/// f_measure is 0 when both are 0.
struct QualityMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_measure = 1.0;

  friend bool operator==(const QualityMetrics&, const QualityMetrics&) = default;
};

QualityMetrics quality_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

/// Scores output labels against the truth. Pairs whose id has no label are
/// skipped.
QualityMetrics evaluate(const PairLabels& labels, std::span<const Pair> pairs, const GroundTruth& truth);
QualityMetrics evaluate(const LabelingResult& result, const GroundTruth& truth);

struct SavingsReport {
  std::size_t total_pairs = 0;
  std::size_t crowdsourced = 0;
  std::size_t deduced = 0;
  std::size_t conflicts = 0;
  /// Pairs published per iteration.
  std::vector<std::size_t> iteration_sizes;

  friend bool operator==(const SavingsReport&, const SavingsReport&) = default;
};

SavingsReport savings(const LabelingResult& result);

PairLabels label_map(const LabelingResult& result);

}  // namespace crowdjoin
