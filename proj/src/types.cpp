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

#include "crowdjoin/types.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace crowdjoin {

Pair make_pair(PairId id, ObjectId a, ObjectId b, double likelihood) {
  if (a == b) {
    throw std::invalid_argument("pair '" + id + "' joins object '" + a + "' with itself");
  }
  if (!(likelihood >= 0.0 && likelihood <= 1.0)) {
    throw std::invalid_argument("pair '" + id + "' has likelihood outside [0,1]");
  }
  if (b < a) std::swap(a, b);
  return Pair{std::move(id), std::move(a), std::move(b), likelihood};
}

std::string_view to_string(Label l) noexcept {
  return l == Label::Matching ? "matching" : "non-matching";
}

std::string_view to_string(LabelSource s) noexcept {
  return s == LabelSource::Crowd ? "crowd" : "deduced";
}

std::string_view to_string(DeduceResult r) noexcept {
  switch (r) {
    case DeduceResult::Matching:
      return "matching";
    case DeduceResult::NonMatching:
      return "non-matching";
    case DeduceResult::Undeduced:
      break;
  }
  return "undeduced";
}

std::string_view to_string(InsertOutcome o) noexcept {
  switch (o) {
    case InsertOutcome::Applied:
      return "applied";
    case InsertOutcome::Redundant:
      return "redundant";
    case InsertOutcome::Conflict:
      break;
  }
  return "conflict";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Label parse_label(std::string_view text) {
  const std::string t = lower(text);
  if (t == "matching" || t == "m" || t == "yes") return Label::Matching;
  if (t == "non-matching" || t == "nonmatching" || t == "non_matching" || t == "n" || t == "no") {
    return Label::NonMatching;
  }
  throw std::invalid_argument("unknown label '" + std::string(text) + "'");
}

LabelSource parse_label_source(std::string_view text) {
  const std::string t = lower(text);
  if (t == "crowd") return LabelSource::Crowd;
  if (t == "deduced") return LabelSource::Deduced;
  throw std::invalid_argument("unknown label source '" + std::string(text) + "'");
}

bool natural_less(std::string_view a, std::string_view b) noexcept {
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // Strip leading zeros, then longer run means larger number.
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      const auto na = a.substr(is, ie - is);
      const auto nb = b.substr(js, je - js);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      if ((ie - i) != (je - j)) return (ie - i) < (je - j);
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) {
      return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
    }
    ++i;
    ++j;
  }
  return (a.size() - i) < (b.size() - j);
}

}  // namespace crowdjoin
