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

#include "crowdjoin/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "crowdjoin/ingestion.hpp"

namespace crowdjoin {

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, Json{{"error", message}});
}

Json status_json(const Session::Status& s) {
  return {{"total", s.total},         {"labeled", s.labeled},     {"crowdsourced", s.crowdsourced},
          {"deduced", s.deduced},     {"published", s.published}, {"open_hits", s.open_hits},
          {"conflicts", s.conflicts}, {"complete", s.complete}};
}

Json events_json(const std::vector<LabelEvent>& events) {
  Json out = Json::array();
  for (const auto& [id, label] : events) out.push_back({{"pair_id", id}, {"label", to_string(label)}});
  return out;
}

std::vector<Pair> parse_candidates(const Json& c) {
  std::string text;
  if (c.is_string()) {
    text = c.get<std::string>();
  } else if (c.is_array()) {
    for (const auto& p : c) text += p.dump() + "\n";
  } else {
    throw std::invalid_argument("candidates must be an array or a JSONL string");
  }
  std::istringstream in(text);
  return read_candidates_jsonl(in);
}

std::map<ObjectId, Json> parse_records(const Json& r) {
  std::map<ObjectId, Json> out;
  if (r.is_null()) return out;
  if (r.is_object()) {
    for (const auto& [id, attrs] : r.items()) {
      if (!attrs.is_object()) throw std::invalid_argument("record '" + id + "' must be an object");
      out.emplace(id, attrs);
    }
  } else if (r.is_array()) {
    for (const auto& rec : r) {
      if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
        throw std::invalid_argument("records need a string id");
      }
      Json attrs = rec;
      attrs.erase("id");
      if (!out.emplace(rec["id"].get<std::string>(), std::move(attrs)).second) {
        throw std::invalid_argument("duplicate record id '" + rec["id"].get<std::string>() + "'");
      }
    }
  } else {
    throw std::invalid_argument("records must be an object or an array");
  }
  return out;
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    auto j = Json::parse(req.body);
    if (!j.is_object()) {
      fail(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(res, 400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

int outcome_status(Session::Outcome o) {
  switch (o) {
    case Session::Outcome::Accepted:
      return 200;
    case Session::Outcome::UnknownHit:
    case Session::Outcome::UnknownPair:
      return 404;
    case Session::Outcome::Duplicate:
    case Session::Outcome::AlreadyLabeled:
      return 409;
    case Session::Outcome::NotQualified:
      return 403;
  }
  return 500;
}

}  // namespace

SessionRequest SessionRequest::from_json(const Json& body) {
  if (!body.is_object()) throw std::invalid_argument("request body must be a JSON object");
  if (!body.contains("candidates")) throw std::invalid_argument("missing candidates");
  SessionRequest r;
  r.pairs = parse_candidates(body.at("candidates"));
  r.records = parse_records(body.value("records", Json()));
  r.config = SessionConfig::from_json(body.value("config", Json::object()));
  return r;
}

Json SessionRequest::to_json() const {
  Json candidates = Json::array();
  for (const auto& p : pairs) {
    candidates.push_back({{"pair_id", p.id}, {"left", p.left}, {"right", p.right}, {"likelihood", p.likelihood}});
  }
  Json recs = Json::object();
  for (const auto& [id, attrs] : records) recs[id] = attrs;
  return {{"candidates", std::move(candidates)}, {"records", std::move(recs)}, {"config", config.to_json()}};
}

SessionStore::SessionStore(std::filesystem::path log_dir) : log_dir_(std::move(log_dir)) {
  if (!log_dir_.empty()) std::filesystem::create_directories(log_dir_);
}

std::shared_ptr<SessionStore::Entry> SessionStore::add(const std::string& id, SessionRequest request) {
  auto entry = std::make_shared<Entry>();
  std::filesystem::path log;
  if (!log_dir_.empty()) log = log_dir_ / (id + ".answers.jsonl");
  entry->session = std::make_unique<Session>(id, std::move(request.pairs), std::move(request.config),
                                             std::move(request.records), log);
  sessions_.emplace(id, entry);
  return entry;
}

std::string SessionStore::create(SessionRequest request) {
  std::unique_lock lock(mutex_);
  std::string id;
  do {
    id = "s" + std::to_string(++counter_);
  } while (sessions_.contains(id));
  if (!log_dir_.empty()) {
    Json saved = request.to_json();
    saved["session_id"] = id;
    std::ofstream f(log_dir_ / (id + ".session.json"), std::ios::binary);
    if (!f) throw Error("cannot write session file for " + id);
    f << saved.dump() << '\n';
  }
  add(id, std::move(request));
  return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, e] : sessions_) out.push_back(id);
  return out;
}

std::size_t SessionStore::restore() {
  if (log_dir_.empty() || !std::filesystem::exists(log_dir_)) return 0;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(log_dir_)) {
    const auto name = e.path().filename().string();
    if (name.size() > 13 && name.ends_with(".session.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::unique_lock lock(mutex_);
  std::size_t restored = 0;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    Json saved;
    try {
      saved = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(file.string() + ": " + e.what());
    }
    const auto id = saved.at("session_id").get<std::string>();
    if (sessions_.contains(id)) continue;
    auto entry = add(id, SessionRequest::from_json(saved));
    const auto log = log_dir_ / (id + ".answers.jsonl");
    if (std::filesystem::exists(log)) {
      for (const auto& rec : read_answer_log(log)) {
        const auto r = entry->session->restore(rec);
        if (r.outcome != Session::Outcome::Accepted) {
          throw Error(log.string() + ": cannot restore answer for '" + rec.pair_id + "': " +
                      std::string(to_string(r.outcome)));
        }
      }
    }
    if (id.size() > 1 && id[0] == 's' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      counter_ = std::max<std::size_t>(counter_, std::stoull(id.substr(1)));
    }
    ++restored;
  }
  return restored;
}

void register_routes(httplib::Server& server, SessionStore& store) {
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    } catch (...) {
      fail(res, 500, "internal error");
    }
  });

  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}});
  });

  server.Get("/api/sessions", [&store](const httplib::Request&, httplib::Response& res) {
    Json list = Json::array();
    for (const auto& id : store.ids()) {
      auto entry = store.find(id);
      std::shared_lock lock(entry->mutex);
      list.push_back({{"session_id", id}, {"status", status_json(entry->session->status())}});
    }
    reply(res, 200, {{"sessions", std::move(list)}});
  });

  server.Post("/api/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    SessionRequest request;
    try {
      request = SessionRequest::from_json(*body);
    } catch (const std::exception& e) {
      fail(res, 400, e.what());
      return;
    }
    const auto id = store.create(std::move(request));
    auto entry = store.find(id);
    std::shared_lock lock(entry->mutex);
    reply(res, 201, {{"session_id", id}, {"status", status_json(entry->session->status())}});
  });

  // Looks up the session named in the path or answers 404.
  auto session_of = [&store](const httplib::Request& req, httplib::Response& res) {
    auto entry = store.find(req.path_params.at("id"));
    if (!entry) fail(res, 404, "unknown session '" + req.path_params.at("id") + "'");
    return entry;
  };

  server.Get("/api/sessions/:id", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    std::shared_lock lock(entry->mutex);
    const Session& s = *entry->session;
    Json config = s.config().to_json();
    config.erase("qualification");
    config["qualification_required"] = !s.config().qualification.empty();
    reply(res, 200, {{"session_id", s.id()}, {"config", std::move(config)}, {"status", status_json(s.status())}});
  });

  server.Get("/api/sessions/:id/status", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    std::shared_lock lock(entry->mutex);
    reply(res, 200, status_json(entry->session->status()));
  });

  server.Get("/api/sessions/:id/qualification", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    std::shared_lock lock(entry->mutex);
    Json questions = Json::array();
    for (const auto& q : entry->session->config().qualification) {
      questions.push_back({{"question_id", q.question_id}, {"left", q.left}, {"right", q.right}});
    }
    reply(res, 200, {{"required", !questions.empty()}, {"questions", std::move(questions)}});
  });

  server.Post("/api/sessions/:id/qualification", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    auto body = parse_body(req, res);
    if (!body) return;
    std::string worker;
    std::map<std::string, Label> answers;
    try {
      worker = body->at("worker").get<std::string>();
      for (const auto& [qid, label] : body->at("answers").items()) answers[qid] = parse_label(label.get<std::string>());
    } catch (const std::exception& e) {
      fail(res, 400, std::string("bad qualification attempt: ") + e.what());
      return;
    }
    if (worker.empty()) {
      fail(res, 400, "worker must not be empty");
      return;
    }
    std::unique_lock lock(entry->mutex);
    const bool passed = entry->session->qualify(worker, answers);
    reply(res, 200, {{"worker", worker}, {"passed", passed}});
  });

  server.Get("/api/sessions/:id/hits/next", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    const auto worker = req.get_param_value("worker");
    if (worker.empty()) {
      fail(res, 400, "missing worker parameter");
      return;
    }
    std::unique_lock lock(entry->mutex);
    Session& s = *entry->session;
    if (s.needs_qualification(worker)) {
      fail(res, 403, std::string(to_string(Session::Outcome::NotQualified)));
      return;
    }
    const Hit* hit = s.next_hit(worker);
    if (!hit) {
      res.status = 204;
      return;
    }
    Json pairs = Json::array();
    for (const auto& id : s.pending_for(*hit, worker)) {
      pairs.push_back(s.pair_json(*s.pair(id)));
    }
    reply(res, 200, {{"hit_id", hit->hit_id}, {"replicas", hit->replicas}, {"pairs", std::move(pairs)}});
  });

  server.Post("/api/sessions/:id/hits/:hit/answers", [session_of](const httplib::Request& req,
                                                                  httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    auto body = parse_body(req, res);
    if (!body) return;
    std::string worker;
    PairId pair_id;
    Label label{};
    try {
      worker = body->at("worker").get<std::string>();
      pair_id = body->at("pair_id").get<std::string>();
      label = parse_label(body->at("label").get<std::string>());
    } catch (const std::exception& e) {
      fail(res, 400, std::string("bad answer: ") + e.what());
      return;
    }
    if (worker.empty()) {
      fail(res, 400, "worker must not be empty");
      return;
    }
    std::unique_lock lock(entry->mutex);
    Session& s = *entry->session;
    const auto r = s.submit(req.path_params.at("hit"), worker, pair_id, label);
    if (r.outcome != Session::Outcome::Accepted) {
      fail(res, outcome_status(r.outcome), std::string(to_string(r.outcome)));
      return;
    }
    reply(res, 200,
          {{"accepted", true},
           {"pair_id", pair_id},
           {"final_label", r.final_label ? Json(to_string(*r.final_label)) : Json()},
           {"newly_published", r.newly_published},
           {"newly_deduced", events_json(r.newly_deduced)},
           {"status", status_json(s.status())}});
  });

  server.Get("/api/sessions/:id/results", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    std::shared_lock lock(entry->mutex);
    const Session& s = *entry->session;
    if (!s.complete()) {
      reply(res, 409, {{"error", "session is not complete"}, {"status", status_json(s.status())}});
      return;
    }
    reply(res, 200, to_json(s.report()));
  });

  server.Get("/api/sessions/:id/log", [session_of](const httplib::Request& req, httplib::Response& res) {
    auto entry = session_of(req, res);
    if (!entry) return;
    std::shared_lock lock(entry->mutex);
    Json answers = Json::array();
    for (const auto& rec : entry->session->log()) answers.push_back(rec.to_json());
    reply(res, 200, {{"answers", std::move(answers)}});
  });
}

bool serve(httplib::Server& server, SessionStore& store, const ServerOptions& options) {
  register_routes(server, store);
  if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir.string())) {
    throw Error("cannot serve static files from '" + options.static_dir.string() + "'");
  }
  return server.listen(options.host, options.port);
}

}  // namespace crowdjoin
