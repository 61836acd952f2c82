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
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowdjoin/truth.hpp"
#include "crowdjoin/types.hpp"

namespace crowdjoin {

/// Raised for malformed input files. `line()` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ObjectRecord {
  ObjectId id;
  std::vector<std::pair<std::string, std::string>> attributes;
};

/// One collection, or two for a bipartite join where only cross pairs are
/// candidates.
struct Dataset {
  std::vector<ObjectRecord> records;
  std::optional<std::vector<ObjectRecord>> second;

  bool two_table() const noexcept { return second.has_value(); }
};

/// Reads RFC 4180 style CSV (quoted fields, doubled quotes, embedded
/// newlines). Throws ParseError with the offending line.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

/// Header row required, first column named "id". Throws ParseError on bad
/// rows and Error naming the id on duplicates.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_dataset_csv(std::istream& in);
/// Loads `second` into the bipartite slot. Ids must be unique across both.
Dataset load_two_table(const std::filesystem::path& first, const std::filesystem::path& second);

/// Two columns (object id, entity-cluster id) after a header row.
GroundTruth load_truth(const std::filesystem::path& path);
GroundTruth parse_truth_csv(std::istream& in);
/// Dataset objects the truth does not cover, plus truth objects absent from
/// the dataset.
std::vector<std::string> truth_warnings(const GroundTruth& truth, const Dataset& dataset);

/// Lowercased tokens of `text` split on whitespace (ASCII and the common
/// Unicode spaces) and ASCII punctuation; empty tokens dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Token-set Jaccard similarity of the concatenated attribute values; 0 when
/// both token sets are empty.
double jaccard_likelihood(const ObjectRecord& a, const ObjectRecord& b);

/// Per-pair likelihood overrides keyed by canonical (left, right).
using LikelihoodOverrides = std::map<std::pair<ObjectId, ObjectId>, double>;

/// CSV with columns left,right,likelihood.
LikelihoodOverrides load_likelihood_overrides(const std::filesystem::path& path);

inline constexpr std::size_t kDefaultRecordCap = 5000;

struct CandidateSet {
  std::vector<Pair> pairs;
  double threshold = 0.0;
};

/// All pairs (cross-collection only in two-table mode) whose likelihood is
/// at least `threshold`, in canonical object order. Pair ids are
/// "<left>|<right>", stable across thresholds. Throws std::invalid_argument
/// for a threshold outside [0,1] and CapExceeded above `record_cap` records.
CandidateSet generate_candidates(const Dataset& dataset, double threshold,
                                 const LikelihoodOverrides* overrides = nullptr,
                                 std::size_t record_cap = kDefaultRecordCap);

/// Cluster size -> number of clusters of that size (singletons included).
std::map<std::size_t, std::size_t> cluster_size_distribution(const GroundTruth& truth);

/// One JSON object per line: {"pair_id","left","right","likelihood"}.
void write_candidates_jsonl(std::ostream& out, const std::vector<Pair>& pairs);
std::vector<Pair> read_candidates_jsonl(std::istream& in);
std::vector<Pair> load_candidates_jsonl(const std::filesystem::path& path);

}  // namespace crowdjoin
