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

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "crowdjoin/session.hpp"

namespace httplib {
class Server;
}

namespace crowdjoin {

/// Parsed body of a create-session request:
///
///   {"candidates": [...] | "<jsonl>", "records": {...} | [...], "config": {...}}
///
/// Records are optional; either an object keyed by object id or an array of
/// objects with an "id" field. Throws std::invalid_argument or Error.
struct SessionRequest {
  std::vector<Pair> pairs;
  SessionConfig config;
  std::map<ObjectId, Json> records;

  static SessionRequest from_json(const Json& body);
  Json to_json() const;
};

/// Thread-safe registry of live sessions. Each session carries its own
/// reader/writer lock; handlers take it shared for reads and exclusive for
/// anything that touches the engine or the HIT assignment stream.
class SessionStore {
 public:
  struct Entry {
    mutable std::shared_mutex mutex;
    std::unique_ptr<Session> session;
  };

  /// With a non-empty `log_dir`, each session is persisted as
  /// <id>.session.json plus an append-only <id>.answers.jsonl.
  explicit SessionStore(std::filesystem::path log_dir = {});

  std::string create(SessionRequest request);
  std::shared_ptr<Entry> find(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Rebuilds every session found in the log directory by replaying its
  /// answers. Returns the number of sessions restored.
  std::size_t restore();

 private:
  std::shared_ptr<Entry> add(const std::string& id, SessionRequest request);

  std::filesystem::path log_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>, NaturalLess> sessions_;
  std::size_t counter_ = 0;
};

/// Installs every /api route on `server`.
void register_routes(httplib::Server& server, SessionStore& store);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path log_dir;
  /// Served at / when set (the worker UI bundle).
  std::filesystem::path static_dir;
};

/// Runs a blocking server. Returns when `server.stop()` is called from
/// another thread or on a bind failure (returns false then).
bool serve(httplib::Server& server, SessionStore& store, const ServerOptions& options);

}  // namespace crowdjoin
