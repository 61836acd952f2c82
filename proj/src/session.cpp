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

#include "crowdjoin/session.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace crowdjoin {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

void SessionConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (order != "heuristic" && order != "given" && order != "random") {
    throw std::invalid_argument("order must be one of heuristic, given, random");
  }
  engine_config().validate();
  std::set<std::string> seen;
  for (const auto& q : qualification) {
    if (!seen.insert(q.question_id).second) {
      throw std::invalid_argument("duplicate qualification question '" + q.question_id + "'");
    }
  }
}

EngineConfig SessionConfig::engine_config() const {
  EngineConfig c;
  c.mode = EngineMode::Parallel;
  c.instant_decision = instant_decision;
  c.nonmatching_first = nonmatching_first;
  c.seed = seed;
  return c;
}

Json SessionConfig::to_json() const {
  Json j;
  j["batch_size"] = batch_size;
  j["replicas"] = replicas;
  j["instant_decision"] = instant_decision;
  j["nonmatching_first"] = nonmatching_first;
  j["order"] = order;
  j["seed"] = seed;
  Json qs = Json::array();
  for (const auto& q : qualification) {
    qs.push_back({{"question_id", q.question_id}, {"left", q.left}, {"right", q.right}, {"label", to_string(q.answer)}});
  }
  j["qualification"] = std::move(qs);
  return j;
}

SessionConfig SessionConfig::from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  SessionConfig c;
  const auto batch = get_or<std::int64_t>(j, "batch_size", static_cast<std::int64_t>(c.batch_size));
  if (batch < 1) throw std::invalid_argument("batch_size must be at least 1");
  c.batch_size = static_cast<std::size_t>(batch);
  c.replicas = get_or<int>(j, "replicas", c.replicas);
  c.instant_decision = get_or<bool>(j, "instant_decision", c.instant_decision);
  c.nonmatching_first = get_or<bool>(j, "nonmatching_first", c.nonmatching_first);
  c.order = get_or<std::string>(j, "order", c.order);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (auto it = j.find("qualification"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw std::invalid_argument("qualification must be an array");
    for (const auto& q : *it) {
      if (!q.is_object() || !q.contains("question_id") || !q.contains("label")) {
        throw std::invalid_argument("qualification entries need question_id and label");
      }
      QualificationQuestion qq;
      qq.question_id = get_or<std::string>(q, "question_id", "");
      qq.left = q.value("left", Json());
      qq.right = q.value("right", Json());
      qq.answer = parse_label(get_or<std::string>(q, "label", ""));
      c.qualification.push_back(std::move(qq));
    }
  }
  c.validate();
  return c;
}

LabelingOrder session_order(std::span<const Pair> pairs, const SessionConfig& config) {
  if (config.order == "given") return given_order(pairs);
  if (config.order == "random") return random_order(pairs, config.seed);
  return heuristic_order(pairs);
}

Json AnswerRecord::to_json() const {
  return {{"ts", ts}, {"worker", worker}, {"pair_id", pair_id}, {"label", to_string(label)}};
}

AnswerRecord AnswerRecord::from_json(const Json& j) {
  AnswerRecord r;
  try {
    r.ts = j.at("ts").get<std::string>();
    r.worker = j.at("worker").get<std::string>();
    r.pair_id = j.at("pair_id").get<std::string>();
    r.label = parse_label(j.at("label").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed answer record: ") + e.what());
  }
  return r;
}

std::vector<AnswerRecord> read_answer_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<AnswerRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(AnswerRecord::from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(path.string() + ": line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

LabelingResult replay_answers(std::span<const Pair> pairs, const SessionConfig& config,
                              std::span<const AnswerRecord> log) {
  config.validate();
  ParallelEngine engine(std::vector<Pair>(pairs.begin(), pairs.end()), session_order(pairs, config),
                        config.engine_config());
  engine.start();
  std::map<PairId, std::vector<Label>, NaturalLess> votes;
  for (const auto& rec : log) {
    const auto pos = engine.position_of(rec.pair_id);
    if (!pos) throw Error("answer log names unknown pair '" + rec.pair_id + "'");
    if (engine.state(*pos).status != PairStatus::Published) {
      throw Error("answer log answers pair '" + rec.pair_id + "' while it is not published");
    }
    auto& v = votes[rec.pair_id];
    v.push_back(rec.label);
    if (v.size() == static_cast<std::size_t>(config.replicas)) engine.apply_answer(*pos, majority_vote(v));
  }
  return engine.result();
}

Report session_report(const SessionConfig& config, const LabelingResult& result) {
  Json spec;
  spec["kind"] = "session";
  spec["config"] = config.to_json();
  return make_report(std::move(spec), result, nullptr);
}

Session::Session(std::string id, std::vector<Pair> pairs, SessionConfig config, std::map<ObjectId, Json> records,
                 std::filesystem::path log_path)
    : id_(std::move(id)),
      config_(std::move(config)),
      records_(std::move(records)),
      log_path_(std::move(log_path)),
      engine_([&] {
        config_.validate();
        auto order = session_order(pairs, config_);
        return ParallelEngine(std::move(pairs), std::move(order), config_.engine_config());
      }()),
      rng_(splitmix64(config_.seed ^ 0x5e55107ULL)) {
  const auto delta = engine_.start();
  open_hits(delta.published);
}

bool Session::needs_qualification(const std::string& worker) const {
  return !config_.qualification.empty() && !qualified_.contains(worker);
}

bool Session::qualify(const std::string& worker, const std::map<std::string, Label>& answers) {
  for (const auto& q : config_.qualification) {
    auto it = answers.find(q.question_id);
    if (it == answers.end() || it->second != q.answer) return false;
  }
  qualified_.insert(worker);
  return true;
}

std::vector<PairId> Session::pending_for(const Hit& hit, const std::string& worker) const {
  std::vector<PairId> out;
  for (const auto& id : hit.pair_ids) {
    const auto pos = engine_.position_of(id);
    if (!pos || engine_.state(*pos).status != PairStatus::Published) continue;
    if (hit.answered_by(id, worker)) continue;
    if (hit.answer_count(id) >= static_cast<std::size_t>(hit.replicas)) continue;
    out.push_back(id);
  }
  return out;
}

const Hit* Session::next_hit(const std::string& worker) {
  std::vector<const Hit*> eligible;
  for (const auto& hit_id : open_) {
    const Hit& h = hits_.at(hit_id);
    if (!pending_for(h, worker).empty()) eligible.push_back(&h);
  }
  if (eligible.empty()) return nullptr;
  if (config_.nonmatching_first) {
    const Hit* best = nullptr;
    double best_max = 0.0;
    for (const Hit* h : eligible) {
      double m = 0.0;
      for (const auto& id : h->pair_ids) m = std::max(m, engine_.pairs()[*engine_.position_of(id)].likelihood);
      if (!best || m < best_max) {
        best = h;
        best_max = m;
      }
    }
    return best;
  }
  return eligible[uniform_below(rng_, eligible.size())];
}

const Pair* Session::pair(std::string_view pair_id) const {
  const auto pos = engine_.position_of(pair_id);
  return pos ? &engine_.pairs()[*pos] : nullptr;
}

const Hit* Session::hit(const std::string& hit_id) const {
  auto it = hits_.find(hit_id);
  return it == hits_.end() ? nullptr : &it->second;
}

Session::AnswerResult Session::submit(const std::string& hit_id, const std::string& worker, const PairId& pair_id,
                                      Label label, std::string ts) {
  AnswerResult out;
  if (needs_qualification(worker)) {
    out.outcome = Outcome::NotQualified;
    return out;
  }
  auto it = hits_.find(hit_id);
  if (it == hits_.end()) {
    out.outcome = Outcome::UnknownHit;
    return out;
  }
  Hit& h = it->second;
  if (!h.contains(pair_id)) {
    out.outcome = Outcome::UnknownPair;
    return out;
  }
  if (h.answered_by(pair_id, worker)) {
    out.outcome = Outcome::Duplicate;
    return out;
  }
  const std::size_t pos = *engine_.position_of(pair_id);
  if (engine_.state(pos).status != PairStatus::Published) {
    out.outcome = Outcome::AlreadyLabeled;
    return out;
  }

  h.record(pair_id, worker, label);
  AnswerRecord rec{ts.empty() ? utc_timestamp() : std::move(ts), worker, pair_id, label};
  if (!log_path_.empty()) {
    std::ofstream f(log_path_, std::ios::binary | std::ios::app);
    if (!f) throw Error("cannot append to '" + log_path_.string() + "'");
    f << rec.to_json().dump() << '\n';
  }
  log_.push_back(std::move(rec));

  if (auto final = h.final_label(pair_id)) {
    out.final_label = final;
    const auto delta = engine_.apply_answer(pos, *final);
    if (h.complete()) open_.erase(h.hit_id);
    record_delta(delta, out);
  }
  return out;
}

Session::AnswerResult Session::restore(const AnswerRecord& record) {
  auto it = hit_of_.find(record.pair_id);
  if (it == hit_of_.end()) {
    AnswerResult out;
    out.outcome = Outcome::UnknownPair;
    return out;
  }
  // The quiz was passed before the answer was first accepted.
  const bool gated = needs_qualification(record.worker);
  if (gated) qualified_.insert(record.worker);
  const auto saved = std::exchange(log_path_, {});
  auto out = submit(it->second, record.worker, record.pair_id, record.label, record.ts);
  log_path_ = saved;
  if (gated) qualified_.erase(record.worker);
  return out;
}

Session::Status Session::status() const {
  Status s;
  s.total = engine_.pairs().size();
  s.labeled = engine_.labeled_count();
  s.crowdsourced = engine_.crowdsourced_count();
  s.deduced = engine_.deduced_count();
  s.published = engine_.outstanding().size();
  s.open_hits = open_.size();
  s.conflicts = engine_.conflict_count();
  s.complete = engine_.complete();
  return s;
}

Json Session::pair_json(const Pair& pair) const {
  auto side = [&](const ObjectId& id) {
    auto it = records_.find(id);
    return Json{{"id", id}, {"attributes", it == records_.end() ? Json::object() : it->second}};
  };
  return {{"pair_id", pair.id}, {"likelihood", pair.likelihood}, {"left", side(pair.left)}, {"right", side(pair.right)}};
}

void Session::open_hits(const std::vector<std::size_t>& positions) {
  if (positions.empty()) return;
  std::vector<PairId> ids;
  ids.reserve(positions.size());
  for (std::size_t pos : positions) ids.push_back(engine_.pairs()[pos].id);
  auto batch = batch_into_hits(ids, config_.batch_size, config_.replicas, hit_counter_ + 1);
  hit_counter_ += batch.size();
  for (auto& h : batch) {
    for (const auto& id : h.pair_ids) hit_of_[id] = h.hit_id;
    open_.insert(h.hit_id);
    auto key = h.hit_id;
    hits_.emplace(std::move(key), std::move(h));
  }
}

void Session::record_delta(const ParallelEngine::Delta& delta, AnswerResult& out) {
  for (std::size_t pos : delta.published) out.newly_published.push_back(engine_.pairs()[pos].id);
  for (const auto& [pos, label] : delta.deduced) out.newly_deduced.emplace_back(engine_.pairs()[pos].id, label);
  open_hits(delta.published);
}

std::string_view to_string(Session::Outcome o) noexcept {
  switch (o) {
    case Session::Outcome::Accepted:
      return "accepted";
    case Session::Outcome::UnknownHit:
      return "unknown hit";
    case Session::Outcome::UnknownPair:
      return "pair is not part of this hit";
    case Session::Outcome::Duplicate:
      return "worker already answered this pair";
    case Session::Outcome::AlreadyLabeled:
      return "pair is already labeled";
    case Session::Outcome::NotQualified:
      return "worker has not passed the qualification test";
  }
  return "unknown";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace crowdjoin
