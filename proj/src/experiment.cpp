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

#include "crowdjoin/experiment.hpp"

#include <memory>
#include <stdexcept>

#include "crowdjoin/crowd.hpp"
#include "crowdjoin/metrics.hpp"
#include "crowdjoin/random.hpp"

namespace crowdjoin {

OrderKind parse_order_kind(std::string_view text) {
  if (text == "optimal") return OrderKind::Optimal;
  if (text == "worst") return OrderKind::Worst;
  if (text == "heuristic") return OrderKind::Heuristic;
  if (text == "random") return OrderKind::Random;
  if (text == "given") return OrderKind::Given;
  throw std::invalid_argument("unknown order '" + std::string(text) + "'");
}

std::string_view to_string(OrderKind k) noexcept {
  switch (k) {
    case OrderKind::Optimal:
      return "optimal";
    case OrderKind::Worst:
      return "worst";
    case OrderKind::Heuristic:
      return "heuristic";
    case OrderKind::Random:
      return "random";
    case OrderKind::Given:
      return "given";
  }
  return "unknown";
}

LabelingOrder make_order(OrderKind kind, std::span<const Pair> pairs, const GroundTruth* truth, std::uint64_t seed) {
  switch (kind) {
    case OrderKind::Optimal:
    case OrderKind::Worst:
      if (!truth) throw std::invalid_argument("the " + std::string(to_string(kind)) + " order needs ground truth");
      return kind == OrderKind::Optimal ? oracle_optimal_order(pairs, *truth) : oracle_worst_order(pairs, *truth);
    case OrderKind::Heuristic:
      return heuristic_order(pairs);
    case OrderKind::Random:
      return random_order(pairs, seed);
    case OrderKind::Given:
      break;
  }
  return given_order(pairs);
}

void RunSpec::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold out of range: must lie in [0,1]");
  }
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) throw std::invalid_argument("error rate must lie in [0,1]");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (mode == EngineMode::Sequential && (instant_decision || nonmatching_first)) {
    throw std::invalid_argument("instant decision and non-matching first apply to the parallel mode only");
  }
  engine_config().validate();
}

EngineConfig RunSpec::engine_config() const {
  EngineConfig c;
  c.mode = mode;
  c.instant_decision = instant_decision;
  c.nonmatching_first = nonmatching_first;
  c.seed = seed;
  return c;
}

Json RunSpec::to_json() const {
  Json j;
  j["kind"] = "run";
  j["dataset"] = dataset;
  j["dataset2"] = dataset2;
  j["pairs"] = pairs;
  j["truth"] = truth;
  j["likelihoods"] = likelihoods;
  j["threshold"] = threshold;
  j["order"] = to_string(order);
  j["mode"] = mode == EngineMode::Parallel ? "parallel" : "sequential";
  j["instant_decision"] = instant_decision;
  j["nonmatching_first"] = nonmatching_first;
  j["transitive"] = transitive;
  j["error_rate"] = error_rate;
  j["replicas"] = replicas;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  return j;
}

std::size_t hit_count(const LabelingResult& result, std::size_t batch_size) {
  std::size_t hits = 0;
  for (const auto& it : result.iterations) hits += (it.published.size() + batch_size - 1) / batch_size;
  return hits;
}

std::vector<Pair> filter_by_threshold(std::span<const Pair> pairs, double threshold) {
  std::vector<Pair> out;
  for (const auto& p : pairs) {
    if (p.likelihood >= threshold) out.push_back(p);
  }
  return out;
}

RunOutcome run_pipeline(const RunSpec& spec, std::span<const Pair> pairs, const GroundTruth& truth) {
  spec.validate();
  std::unique_ptr<CrowdBackend> crowd;
  if (spec.error_rate == 0.0 && spec.replicas == 1) {
    crowd = std::make_unique<TruthfulCrowd>(truth);
  } else {
    crowd = std::make_unique<NoisyCrowd>(truth, NoiseModel{spec.error_rate, splitmix64(spec.seed)}, spec.replicas);
  }
  RunOutcome out;
  if (spec.transitive) {
    const auto order = make_order(spec.order, pairs, &truth, spec.seed);
    out.result = run_engine(order, pairs, *crowd, spec.engine_config());
  } else {
    out.result = non_transitive_label(pairs, *crowd);
  }
  out.hits = hit_count(out.result, spec.batch_size);
  out.report = make_report(spec.to_json(), out.result, &truth);
  return out;
}

}  // namespace crowdjoin
