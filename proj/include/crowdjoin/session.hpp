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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crowdjoin/crowd.hpp"
#include "crowdjoin/labeling.hpp"
#include "crowdjoin/random.hpp"
#include "crowdjoin/report.hpp"

namespace crowdjoin {

struct QualificationQuestion {
  std::string question_id;
  Json left;
  Json right;
  Label answer = Label::NonMatching;
};

/// Settings of one labeling session. Parsed from and written back to the
/// "config" object of the create-session request.
struct SessionConfig {
  std::size_t batch_size = 20;
  int replicas = 1;
  bool instant_decision = true;
  bool nonmatching_first = false;
  /// heuristic, given or random.
  std::string order = "heuristic";
  std::uint64_t seed = 0;
  /// Workers must answer all of these correctly before getting HITs. Empty
  /// means no gate.
  std::vector<QualificationQuestion> qualification;

  /// Throws std::invalid_argument.
  void validate() const;
  EngineConfig engine_config() const;
  Json to_json() const;
  /// Missing keys keep their defaults. Throws std::invalid_argument.
  static SessionConfig from_json(const Json& j);
};

LabelingOrder session_order(std::span<const Pair> pairs, const SessionConfig& config);

/// One accepted worker answer, as written to the session's JSONL log.
struct AnswerRecord {
  std::string ts;
  std::string worker;
  PairId pair_id;
  Label label = Label::NonMatching;

  Json to_json() const;
  static AnswerRecord from_json(const Json& j);
};

std::vector<AnswerRecord> read_answer_log(const std::filesystem::path& path);

/// Runs the parallel engine offline over a recorded answer log: votes are
/// collected per pair and the majority is applied once `replicas` votes are
/// in, in log order. Throws Error if the log answers a pair that was not
/// published at that point.
LabelingResult replay_answers(std::span<const Pair> pairs, const SessionConfig& config,
                              std::span<const AnswerRecord> log);

/// Report for a session or a replay. The spec block holds the session config.
Report session_report(const SessionConfig& config, const LabelingResult& result);

/// A live labeling session: the parallel engine with published pairs handed
/// out as HITs to human workers. Not thread-safe; the HTTP layer holds a
/// per-session lock.
class Session {
 public:
  enum class Outcome { Accepted, UnknownHit, UnknownPair, Duplicate, AlreadyLabeled, NotQualified };

  struct AnswerResult {
    Outcome outcome = Outcome::Accepted;
    /// Set when this answer completed the pair's quorum.
    std::optional<Label> final_label;
    std::vector<PairId> newly_published;
    std::vector<LabelEvent> newly_deduced;
  };

  struct Status {
    std::size_t total = 0;
    std::size_t labeled = 0;
    std::size_t crowdsourced = 0;
    std::size_t deduced = 0;
    std::size_t published = 0;
    std::size_t open_hits = 0;
    std::size_t conflicts = 0;
    bool complete = false;
  };

  /// `records` maps object ids to display attributes. With a non-empty
  /// `log_path` every accepted answer is appended there.
  Session(std::string id, std::vector<Pair> pairs, SessionConfig config, std::map<ObjectId, Json> records = {},
          std::filesystem::path log_path = {});

  const std::string& id() const noexcept { return id_; }
  const SessionConfig& config() const noexcept { return config_; }
  std::span<const Pair> pairs() const noexcept { return engine_.pairs(); }
  const std::map<ObjectId, Json>& records() const noexcept { return records_; }
  const Pair* pair(std::string_view pair_id) const;

  bool needs_qualification(const std::string& worker) const;
  /// Records a quiz attempt; true when every question is answered correctly.
  bool qualify(const std::string& worker, const std::map<std::string, Label>& answers);

  /// An open HIT with a pair this worker may still answer, chosen at random
  /// (or lowest max likelihood first with nonmatching_first). Null if none.
  const Hit* next_hit(const std::string& worker);
  /// Pairs of `hit` that `worker` has not answered and that still need votes.
  std::vector<PairId> pending_for(const Hit& hit, const std::string& worker) const;
  const Hit* hit(const std::string& hit_id) const;

  AnswerResult submit(const std::string& hit_id, const std::string& worker, const PairId& pair_id, Label label,
                      std::string ts = {});
  /// Re-applies a logged answer to whichever open HIT holds the pair.
  AnswerResult restore(const AnswerRecord& record);

  Status status() const;
  bool complete() const noexcept { return engine_.complete(); }
  const std::vector<AnswerRecord>& log() const noexcept { return log_; }
  LabelingResult result() const { return engine_.result(); }
  Report report() const { return session_report(config_, engine_.result()); }

  /// Serialized pair with both object records attached.
  Json pair_json(const Pair& pair) const;

 private:
  void open_hits(const std::vector<std::size_t>& positions);
  void record_delta(const ParallelEngine::Delta& delta, AnswerResult& out);

  std::string id_;
  SessionConfig config_;
  std::map<ObjectId, Json> records_;
  std::filesystem::path log_path_;
  ParallelEngine engine_;
  Rng rng_;

  std::map<std::string, Hit, NaturalLess> hits_;
  std::set<std::string, NaturalLess> open_;
  std::map<PairId, std::string, NaturalLess> hit_of_;
  std::size_t hit_counter_ = 0;
  std::set<std::string> qualified_;
  std::vector<AnswerRecord> log_;
};

std::string_view to_string(Session::Outcome o) noexcept;

/// Current UTC time as ISO 8601 with milliseconds.
std::string utc_timestamp();

}  // namespace crowdjoin
