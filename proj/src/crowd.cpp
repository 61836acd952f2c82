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

#include "crowdjoin/crowd.hpp"

#include <algorithm>
#include <stdexcept>

#include "crowdjoin/random.hpp"

namespace crowdjoin {

Label truth_answer(const Pair& pair, const GroundTruth& truth) { return truth.label(pair); }

Label noisy_answer(const Pair& pair, const GroundTruth& truth, const NoiseModel& noise,
                   std::string_view worker_id) {
  const Label correct = truth.label(pair);
  std::uint64_t key = splitmix64(noise.seed);
  key = splitmix64(key ^ stable_hash(pair.id));
  key = splitmix64(key ^ stable_hash(worker_id));
  return unit_interval(key) < noise.error_rate ? opposite(correct) : correct;
}

Label majority_vote(std::span<const Label> answers) {
  if (answers.empty()) throw std::invalid_argument("majority vote over no answers");
  const auto matching = std::count(answers.begin(), answers.end(), Label::Matching);
  const auto non_matching = static_cast<std::ptrdiff_t>(answers.size()) - matching;
  return matching > non_matching ? Label::Matching : Label::NonMatching;
}

NoisyCrowd::NoisyCrowd(GroundTruth truth, NoiseModel noise, int replicas)
    : truth_(std::move(truth)), noise_(noise), replicas_(replicas) {
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (!(noise.error_rate >= 0.0 && noise.error_rate <= 1.0)) {
    throw std::invalid_argument("error rate must lie in [0,1]");
  }
}

Label NoisyCrowd::answer(const Pair& pair) {
  std::vector<Label> votes;
  votes.reserve(static_cast<std::size_t>(replicas_));
  for (int r = 0; r < replicas_; ++r) votes.push_back(noisy_answer(pair, truth_, noise_, worker_name(r)));
  return majority_vote(votes);
}

Label ScriptedCrowd::answer(const Pair& pair) {
  auto it = answers_.find(pair.id);
  if (it == answers_.end()) throw Error("no scripted answer for pair '" + pair.id + "'");
  return it->second;
}

bool Hit::contains(std::string_view pair_id) const {
  return std::find(pair_ids.begin(), pair_ids.end(), pair_id) != pair_ids.end();
}

bool Hit::answered_by(const PairId& pair_id, const std::string& worker) const {
  return answers.contains({pair_id, worker});
}

std::size_t Hit::answer_count(const PairId& pair_id) const {
  std::size_t n = 0;
  for (auto it = answers.lower_bound({pair_id, std::string{}}); it != answers.end() && it->first.first == pair_id;
       ++it) {
    ++n;
  }
  return n;
}

bool Hit::record(const PairId& pair_id, const std::string& worker, Label label) {
  return answers.try_emplace({pair_id, worker}, label).second;
}

std::optional<Label> Hit::final_label(const PairId& pair_id) const {
  std::vector<Label> votes;
  for (auto it = answers.lower_bound({pair_id, std::string{}}); it != answers.end() && it->first.first == pair_id;
       ++it) {
    votes.push_back(it->second);
  }
  if (votes.empty() || votes.size() < static_cast<std::size_t>(replicas)) return std::nullopt;
  return majority_vote(votes);
}

bool Hit::complete() const {
  return std::all_of(pair_ids.begin(), pair_ids.end(),
                     [&](const PairId& p) { return answer_count(p) >= static_cast<std::size_t>(replicas); });
}

std::vector<Hit> batch_into_hits(std::span<const PairId> pair_ids, std::size_t batch_size, int replicas,
                                 std::size_t first_number) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  std::vector<Hit> hits;
  hits.reserve((pair_ids.size() + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < pair_ids.size(); start += batch_size) {
    const std::size_t end = std::min(pair_ids.size(), start + batch_size);
    Hit hit;
    hit.hit_id = "h" + std::to_string(first_number + hits.size());
    hit.pair_ids.assign(pair_ids.begin() + static_cast<std::ptrdiff_t>(start),
                        pair_ids.begin() + static_cast<std::ptrdiff_t>(end));
    hit.replicas = replicas;
    hits.push_back(std::move(hit));
  }
  return hits;
}

}  // namespace crowdjoin
