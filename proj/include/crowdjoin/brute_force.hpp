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
#include <span>

#include "crowdjoin/types.hpp"

namespace crowdjoin {

inline constexpr std::size_t kBruteForceObjectCap = 12;

/// Reference deduction by path enumeration: walks every simple path between
/// the pair's endpoints in the graph of labeled pairs and looks at how many
/// non-matching edges each path carries (0 => matching, 1 => non-matching).
///
/// Exponential; meant as a test oracle. Throws CapExceeded when the query and
/// labeled pairs together mention more than kBruteForceObjectCap objects.
DeduceResult brute_force_deduce(const Pair& pair, std::span<const LabeledPair> labeled);

}  // namespace crowdjoin
