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

#include "crowdjoin/report.hpp"

#include <utility>

namespace crowdjoin {

namespace {

Json events_json(const std::vector<LabelEvent>& events) {
  Json out = Json::array();
  for (const auto& [id, label] : events) out.push_back({{"pair_id", id}, {"label", to_string(label)}});
  return out;
}

std::vector<LabelEvent> events_from(const Json& j) {
  std::vector<LabelEvent> out;
  for (const auto& e : j) out.emplace_back(e.at("pair_id").get<std::string>(), parse_label(e.at("label").get<std::string>()));
  return out;
}

}  // namespace

Report make_report(Json spec, const LabelingResult& result, const GroundTruth* truth) {
  Report r;
  r.spec = std::move(spec);
  r.savings = savings(result);
  if (truth) r.quality = evaluate(result, *truth);
  r.iterations = result.iterations;
  r.labels.reserve(result.labels.size());
  for (const auto& [id, lp] : result.labels) r.labels.push_back(lp);
  return r;
}

Json to_json(const Report& report) {
  Json j;
  j["version"] = report.version;
  j["spec"] = report.spec;
  const auto& s = report.savings;
  j["savings"] = {{"total_pairs", s.total_pairs},
                  {"crowdsourced", s.crowdsourced},
                  {"deduced", s.deduced},
                  {"conflicts", s.conflicts},
                  {"iteration_sizes", s.iteration_sizes}};
  if (report.quality) {
    const auto& q = *report.quality;
    j["quality"] = {{"tp", q.tp},
                    {"fp", q.fp},
                    {"fn", q.fn},
                    {"precision", q.precision},
                    {"recall", q.recall},
                    {"f_measure", q.f_measure}};
  } else {
    j["quality"] = nullptr;
  }
  Json iterations = Json::array();
  for (const auto& it : report.iterations) {
    iterations.push_back({{"iteration", it.iteration},
                          {"published", it.published},
                          {"crowd_labeled", events_json(it.crowd_labeled)},
                          {"deduced", events_json(it.deduced)},
                          {"conflicts", it.conflicts}});
  }
  j["iterations"] = std::move(iterations);
  Json labels = Json::array();
  for (const auto& lp : report.labels) {
    labels.push_back({{"pair_id", lp.pair.id},
                      {"left", lp.pair.left},
                      {"right", lp.pair.right},
                      {"likelihood", lp.pair.likelihood},
                      {"label", to_string(lp.label)},
                      {"source", to_string(lp.source)}});
  }
  j["labels"] = std::move(labels);
  return j;
}

Report report_from_json(const Json& j) {
  try {
    Report r;
    r.version = j.at("version").get<int>();
    if (r.version != kReportVersion) throw Error("unsupported report version " + std::to_string(r.version));
    r.spec = j.at("spec");
    const auto& s = j.at("savings");
    r.savings.total_pairs = s.at("total_pairs").get<std::size_t>();
    r.savings.crowdsourced = s.at("crowdsourced").get<std::size_t>();
    r.savings.deduced = s.at("deduced").get<std::size_t>();
    r.savings.conflicts = s.at("conflicts").get<std::size_t>();
    r.savings.iteration_sizes = s.at("iteration_sizes").get<std::vector<std::size_t>>();
    const auto& q = j.at("quality");
    if (!q.is_null()) {
      QualityMetrics m;
      m.tp = q.at("tp").get<std::size_t>();
      m.fp = q.at("fp").get<std::size_t>();
      m.fn = q.at("fn").get<std::size_t>();
      m.precision = q.at("precision").get<double>();
      m.recall = q.at("recall").get<double>();
      m.f_measure = q.at("f_measure").get<double>();
      r.quality = m;
    }
    for (const auto& it : j.at("iterations")) {
      IterationReport ir;
      ir.iteration = it.at("iteration").get<std::size_t>();
      ir.published = it.at("published").get<std::vector<PairId>>();
      ir.crowd_labeled = events_from(it.at("crowd_labeled"));
      ir.deduced = events_from(it.at("deduced"));
      ir.conflicts = it.at("conflicts").get<std::size_t>();
      r.iterations.push_back(std::move(ir));
    }
    for (const auto& l : j.at("labels")) {
      LabeledPair lp;
      lp.pair.id = l.at("pair_id").get<std::string>();
      lp.pair.left = l.at("left").get<std::string>();
      lp.pair.right = l.at("right").get<std::string>();
      lp.pair.likelihood = l.at("likelihood").get<double>();
      lp.label = parse_label(l.at("label").get<std::string>());
      lp.source = parse_label_source(l.at("source").get<std::string>());
      r.labels.push_back(std::move(lp));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

std::string dump_report(const Report& report) { return to_json(report).dump(2) + "\n"; }

Report parse_report(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace crowdjoin
