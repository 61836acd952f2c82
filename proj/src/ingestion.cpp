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

#include "crowdjoin/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace crowdjoin {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

std::string trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

bool blank_row(const std::vector<std::string>& row) {
  return std::all_of(row.begin(), row.end(), [](const std::string& f) { return trim(f).empty(); });
}

// Length of the Unicode space starting at s[i], or 0.
std::size_t unicode_space_len(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0U; };
  const unsigned b0 = byte(0);
  if (b0 == 0xC2 && (byte(1) == 0xA0 || byte(1) == 0x85)) return 2;
  if (b0 == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;
  if (b0 == 0xE2 && byte(1) == 0x80) {
    const unsigned b2 = byte(2);
    if ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF) return 3;
  }
  if (b0 == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;
  if (b0 == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;
  return 0;
}

bool ascii_separator(unsigned char c) {
  if (c >= 0x80) return false;
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
         (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

std::string joined_values(const ObjectRecord& r) {
  std::string text;
  for (const auto& [name, value] : r.attributes) {
    text += value;
    text += ' ';
  }
  return text;
}

// Sorted, deduplicated token ids; ids come from a shared dictionary so set
// operations are integer merges.
using TokenSet = std::vector<std::uint32_t>;

TokenSet token_ids(const ObjectRecord& r, std::unordered_map<std::string, std::uint32_t>& dict) {
  TokenSet out;
  for (auto& tok : tokenize(joined_values(r))) {
    out.push_back(dict.try_emplace(std::move(tok), static_cast<std::uint32_t>(dict.size())).first->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::vector<ObjectRecord> records_from_rows(const std::vector<std::vector<std::string>>& rows,
                                            std::unordered_set<ObjectId>& seen) {
  if (rows.empty()) return {};
  const auto& header = rows.front();
  if (header.empty() || trim(header[0]) != "id") throw ParseError("first column must be named 'id'", 1);
  std::vector<ObjectRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (blank_row(row)) continue;
    if (row.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(row.size()),
                       r + 1);
    }
    ObjectRecord rec;
    rec.id = trim(row[0]);
    if (rec.id.empty()) throw ParseError("empty id", r + 1);
    if (!seen.insert(rec.id).second) throw Error("duplicate object id '" + rec.id + "'");
    for (std::size_t c = 1; c < row.size(); ++c) rec.attributes.emplace_back(header[c], row[c]);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool after_quote = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  char c;
  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
    after_quote = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      end_row();
      ++line;
    } else if (c == '"') {
      if (field_started || after_quote) throw ParseError("unexpected quote inside field", line);
      in_quotes = true;
      field_started = true;
      quote_line = line;
    } else {
      if (after_quote) throw ParseError("characters after closing quote", line);
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", quote_line);
  if (field_started || after_quote || !row.empty()) end_row();
  return rows;
}

Dataset parse_dataset_csv(std::istream& in) {
  std::unordered_set<ObjectId> seen;
  Dataset d;
  d.records = records_from_rows(read_csv(in), seen);
  return d;
}

Dataset load_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dataset_csv(in);
}

Dataset load_two_table(const std::filesystem::path& first, const std::filesystem::path& second) {
  std::unordered_set<ObjectId> seen;
  Dataset d;
  {
    auto in = open_input(first);
    d.records = records_from_rows(read_csv(in), seen);
  }
  auto in = open_input(second);
  d.second = records_from_rows(read_csv(in), seen);
  return d;
}

GroundTruth parse_truth_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw ParseError("missing header row", 1);
  GroundTruth truth;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (blank_row(row)) continue;
    if (row.size() != 2) throw ParseError("expected object_id,cluster_id", r + 1);
    ObjectId id = trim(row[0]);
    std::string cluster = trim(row[1]);
    if (id.empty() || cluster.empty()) throw ParseError("empty object or cluster id", r + 1);
    if (!truth.cluster_of.emplace(id, cluster).second) {
      throw ParseError("object '" + id + "' listed twice", r + 1);
    }
  }
  return truth;
}

GroundTruth load_truth(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_truth_csv(in);
}

std::vector<std::string> truth_warnings(const GroundTruth& truth, const Dataset& dataset) {
  std::vector<std::string> out;
  std::unordered_set<ObjectId> present;
  const auto visit = [&](const std::vector<ObjectRecord>& records) {
    for (const auto& r : records) {
      present.insert(r.id);
      if (!truth.covers(r.id)) out.push_back("object '" + r.id + "' has no ground-truth cluster");
    }
  };
  visit(dataset.records);
  if (dataset.second) visit(*dataset.second);
  std::vector<ObjectId> unknown;
  for (const auto& [id, cluster] : truth.cluster_of) {
    if (!present.contains(id)) unknown.push_back(id);
  }
  std::sort(unknown.begin(), unknown.end());
  for (const auto& id : unknown) out.push_back("truth lists unknown object '" + id + "'");
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (ascii_separator(c)) {
      flush();
      ++i;
      continue;
    }
    if (const std::size_t n = unicode_space_len(text, i)) {
      flush();
      i += n;
      continue;
    }
    cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    ++i;
  }
  flush();
  return out;
}

double jaccard_likelihood(const ObjectRecord& a, const ObjectRecord& b) {
  std::unordered_map<std::string, std::uint32_t> dict;
  const TokenSet ta = token_ids(a, dict);
  const TokenSet tb = token_ids(b, dict);
  return jaccard(ta, tb);
}

LikelihoodOverrides load_likelihood_overrides(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto rows = read_csv(in);
  LikelihoodOverrides out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (blank_row(row)) continue;
    if (row.size() != 3) throw ParseError("expected left,right,likelihood", r + 1);
    ObjectId a = trim(row[0]);
    ObjectId b = trim(row[1]);
    if (b < a) std::swap(a, b);
    double v = 0.0;
    try {
      std::size_t used = 0;
      const std::string text = trim(row[2]);
      v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ParseError("likelihood is not a number", r + 1);
    }
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("likelihood outside [0,1]", r + 1);
    out[{std::move(a), std::move(b)}] = v;
  }
  return out;
}

CandidateSet generate_candidates(const Dataset& dataset, double threshold, const LikelihoodOverrides* overrides,
                                 std::size_t record_cap) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold out of range: must lie in [0,1]");
  }
  const std::size_t total = dataset.records.size() + (dataset.second ? dataset.second->size() : 0);
  if (total > record_cap) {
    throw CapExceeded("all-pairs candidate generation is limited to " + std::to_string(record_cap) +
                      " records, got " + std::to_string(total));
  }

  std::unordered_map<std::string, std::uint32_t> dict;
  const auto prepare = [&](const std::vector<ObjectRecord>& records) {
    std::vector<std::pair<const ObjectRecord*, TokenSet>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.emplace_back(&r, token_ids(r, dict));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first->id < y.first->id; });
    return out;
  };
  const auto first = prepare(dataset.records);
  const auto second = dataset.second ? prepare(*dataset.second) : decltype(first){};

  CandidateSet set;
  set.threshold = threshold;
  const auto consider = [&](const auto& x, const auto& y) {
    double likelihood = jaccard(x.second, y.second);
    ObjectId a = x.first->id;
    ObjectId b = y.first->id;
    if (b < a) std::swap(a, b);
    if (overrides) {
      if (auto it = overrides->find({a, b}); it != overrides->end()) likelihood = it->second;
    }
    if (likelihood >= threshold) {
      PairId id = a + "|" + b;
      set.pairs.push_back(make_pair(std::move(id), std::move(a), std::move(b), likelihood));
    }
  };
  if (dataset.second) {
    for (const auto& x : first) {
      for (const auto& y : second) consider(x, y);
    }
  } else {
    for (std::size_t i = 0; i < first.size(); ++i) {
      for (std::size_t j = i + 1; j < first.size(); ++j) consider(first[i], first[j]);
    }
  }
  std::sort(set.pairs.begin(), set.pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.left, x.right) < std::tie(y.left, y.right);
  });
  return set;
}

std::map<std::size_t, std::size_t> cluster_size_distribution(const GroundTruth& truth) {
  std::unordered_map<std::string, std::size_t> sizes;
  for (const auto& [object, cluster] : truth.cluster_of) ++sizes[cluster];
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& [cluster, size] : sizes) ++histogram[size];
  return histogram;
}

void write_candidates_jsonl(std::ostream& out, const std::vector<Pair>& pairs) {
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["pair_id"] = p.id;
    j["left"] = p.left;
    j["right"] = p.right;
    j["likelihood"] = p.likelihood;
    out << j.dump() << '\n';
  }
}

std::vector<Pair> read_candidates_jsonl(std::istream& in) {
  std::vector<Pair> pairs;
  std::unordered_set<PairId> seen;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Pair p = make_pair(j.at("pair_id").get<std::string>(), j.at("left").get<std::string>(),
                         j.at("right").get<std::string>(), j.value("likelihood", 0.0));
      if (!seen.insert(p.id).second) throw std::invalid_argument("duplicate pair id '" + p.id + "'");
      pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), n);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), n);
    }
  }
  return pairs;
}

std::vector<Pair> load_candidates_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_candidates_jsonl(in);
}

}  // namespace crowdjoin
