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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdjoin/labeling.hpp"
#include "crowdjoin/metrics.hpp"
#include "crowdjoin/truth.hpp"

namespace crowdjoin {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

/// Serialized outcome of a labeling run. Shared by the CLI and the service.
///
///   {"version", "spec", "savings", "quality", "iterations", "labels"}
///
/// "spec" is whatever describes the run (flags, session config); "quality"
/// is null without ground truth. Labels are listed in pair-id order.
struct Report {
  int version = kReportVersion;
  Json spec = Json::object();
  SavingsReport savings;
  std::optional<QualityMetrics> quality;
  std::vector<IterationReport> iterations;
  std::vector<LabeledPair> labels;
};

Report make_report(Json spec, const LabelingResult& result, const GroundTruth* truth = nullptr);

Json to_json(const Report& report);
/// Throws Error on a missing field or an unsupported version.
Report report_from_json(const Json& j);

/// Two-space indented JSON plus a trailing newline.
std::string dump_report(const Report& report);
Report parse_report(std::string_view text);

}  // namespace crowdjoin
