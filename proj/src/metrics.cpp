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

#include "crowdjoin/metrics.hpp"

namespace crowdjoin {

QualityMetrics quality_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  QualityMetrics q;
  q.tp = tp;
  q.fp = fp;
  q.fn = fn;
  q.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  q.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double sum = q.precision + q.recall;
  q.f_measure = sum == 0.0 ? 0.0 : 2.0 * q.precision * q.recall / sum;
  return q;
}

QualityMetrics evaluate(const PairLabels& labels, std::span<const Pair> pairs, const GroundTruth& truth) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const Pair& p : pairs) {
    auto it = labels.find(p.id);
    if (it == labels.end()) continue;
    const bool predicted = it->second == Label::Matching;
    const bool actual = truth.label(p) == Label::Matching;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
  }
  return quality_from_counts(tp, fp, fn);
}

QualityMetrics evaluate(const LabelingResult& result, const GroundTruth& truth) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [id, lp] : result.labels) {
    const bool predicted = lp.label == Label::Matching;
    const bool actual = truth.label(lp.pair) == Label::Matching;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
  }
  return quality_from_counts(tp, fp, fn);
}

SavingsReport savings(const LabelingResult& result) {
  SavingsReport s;
  s.total_pairs = result.labels.size();
  s.crowdsourced = result.crowdsourced_count;
  s.deduced = result.deduced_count;
  s.conflicts = result.conflicts();
  for (const auto& it : result.iterations) s.iteration_sizes.push_back(it.published.size());
  return s;
}

PairLabels label_map(const LabelingResult& result) {
  PairLabels out;
  for (const auto& [id, lp] : result.labels) out.emplace(id, lp.label);
  return out;
}

}  // namespace crowdjoin
