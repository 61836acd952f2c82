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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdjoin {

using ObjectId = std::string;
using PairId = std::string;

enum class Label : std::uint8_t { Matching, NonMatching };

enum class LabelSource : std::uint8_t { Crowd, Deduced };

/// Result of asking a ClusterGraph about a pair. Undeduced is not a label.
enum class DeduceResult : std::uint8_t { Matching, NonMatching, Undeduced };

enum class InsertOutcome : std::uint8_t { Applied, Redundant, Conflict };

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input exceeded a hard size limit (enumeration caps, record caps, ...).
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Ground truth has no entity cluster for an object.
class MissingTruth : public Error {
 public:
  explicit MissingTruth(const ObjectId& id)
      : Error("no ground-truth cluster for object '" + id + "'"), object_(id) {}
  const ObjectId& object() const noexcept { return object_; }

 private:
  ObjectId object_;
};

/// An unordered candidate pair. `left < right` always holds (byte-wise
/// lexicographic on the object ids); use make_pair() to build one.
struct Pair {
  PairId id;
  ObjectId left;
  ObjectId right;
  double likelihood = 0.0;

  friend bool operator==(const Pair&, const Pair&) = default;
};

/// Canonicalizes the endpoint order and validates the invariants.
/// Throws std::invalid_argument on a self pair or a likelihood outside [0,1].
Pair make_pair(PairId id, ObjectId a, ObjectId b, double likelihood = 0.0);

struct LabeledPair {
  Pair pair;
  Label label = Label::NonMatching;
  LabelSource source = LabelSource::Crowd;
};

constexpr Label opposite(Label l) noexcept {
  return l == Label::Matching ? Label::NonMatching : Label::Matching;
}

constexpr DeduceResult to_deduce_result(Label l) noexcept {
  return l == Label::Matching ? DeduceResult::Matching : DeduceResult::NonMatching;
}

constexpr std::optional<Label> to_label(DeduceResult r) noexcept {
  switch (r) {
    case DeduceResult::Matching:
      return Label::Matching;
    case DeduceResult::NonMatching:
      return Label::NonMatching;
    case DeduceResult::Undeduced:
      break;
  }
  return std::nullopt;
}

std::string_view to_string(Label l) noexcept;
std::string_view to_string(LabelSource s) noexcept;
std::string_view to_string(DeduceResult r) noexcept;
std::string_view to_string(InsertOutcome o) noexcept;

/// Accepts "matching"/"non-matching" (also "M"/"N", "yes"/"no"),
/// case-insensitive. Throws std::invalid_argument otherwise.
Label parse_label(std::string_view text);
LabelSource parse_label_source(std::string_view text);

/// Orders ids so that embedded digit runs compare numerically
/// ("p2" < "p10"). Used for every pair-id tie-break.
bool natural_less(std::string_view a, std::string_view b) noexcept;

}  // namespace crowdjoin
