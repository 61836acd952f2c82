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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "crowdjoin/brute_force.hpp"
#include "crowdjoin/cluster_graph.hpp"
#include "crowdjoin/experiment.hpp"
#include "crowdjoin/ingestion.hpp"
#include "crowdjoin/session.hpp"
#include "crowdjoin/synthetic.hpp"
#include "http_support.hpp"
#include "support.hpp"

namespace crowdjoin {
namespace {

using namespace testing_support;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "FAILED: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

PairIdSet ids(std::initializer_list<const char*> list) { return PairIdSet(list.begin(), list.end()); }

std::vector<PairId> published_ids(const ParallelEngine& e, const std::vector<std::size_t>& positions) {
  std::vector<PairId> out;
  for (auto p : positions) out.push_back(e.pairs()[p].id);
  return out;
}

// 1. Expected crowdsourced counts of the six triangle orders.
void expected_counts(Verdict& v) {
  const auto start = Clock::now();
  const auto pairs = triangle_pairs();
  const std::vector<std::vector<PairId>> orders = {{"p1", "p2", "p3"}, {"p1", "p3", "p2"}, {"p2", "p3", "p1"},
                                                   {"p2", "p1", "p3"}, {"p3", "p1", "p2"}, {"p3", "p2", "p1"}};
  const double want[] = {2.09, 2.17, 2.83, 2.09, 2.17, 2.83};
  std::string got;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double e = expected_crowdsourced_count(order_from_ids(pairs, orders[i]), pairs);
    got += (i ? " " : "") + fmt(e, 3);
    v.require(std::abs(e - want[i]) <= 0.005, "order " + std::to_string(i + 1) + " gives " + fmt(e, 4));
  }
  const double t = seconds_since(start);
  v.require(t < 1.0, "took " + fmt(t) + " s");
  v.detail << (v.pass ? "" : " | ") << "E[C] = " << got << " in " << fmt(t, 3) << " s";
}

// 2. Two triangle orders need 2 and 3 crowdsourced pairs.
void order_sensitivity(Verdict& v) {
  const auto pairs = triangle_pairs();
  const auto truth = truth_of({{"o1", "A"}, {"o2", "A"}, {"o3", "B"}});
  const auto good = crowdsourced_count(order_from_ids(pairs, std::vector<PairId>{"p1", "p2", "p3"}), pairs, truth);
  const auto bad = crowdsourced_count(order_from_ids(pairs, std::vector<PairId>{"p2", "p3", "p1"}), pairs, truth);
  v.require(good.count == 2, "<p1,p2,p3> crowdsourced " + std::to_string(good.count));
  v.require(bad.count == 3, "<p2,p3,p1> crowdsourced " + std::to_string(bad.count));
  v.detail << (v.pass ? "" : " | ") << "counts " << good.count << " and " << bad.count;
}

// 3. Running example, sequential and parallel.
void running_example(Verdict& v) {
  const auto pairs = running_pairs();
  const auto truth = running_truth();
  TruthfulCrowd crowd(truth);
  const auto seq = sequential_label(given_order(pairs), pairs, crowd);
  v.require(seq.crowdsourced_ids() == ids({"p1", "p2", "p3", "p5", "p6", "p7"}), "sequential crowdsourced set");
  v.require(seq.labels.at("p4").label == Label::Matching && seq.labels.at("p4").source == LabelSource::Deduced,
            "p4 not deduced matching");
  v.require(seq.labels.at("p8").label == Label::NonMatching && seq.labels.at("p8").source == LabelSource::Deduced,
            "p8 not deduced non-matching");
  const auto par = parallel_label(given_order(pairs), pairs, crowd, {});
  v.require(par.iterations.size() == 2, std::to_string(par.iterations.size()) + " iterations");
  if (par.iterations.size() == 2) {
    const auto& a = par.iterations[0].published;
    const auto& b = par.iterations[1].published;
    v.require(PairIdSet(a.begin(), a.end()) == ids({"p1", "p2", "p3", "p5", "p6"}), "first publish set");
    v.require(PairIdSet(b.begin(), b.end()) == ids({"p7"}), "second publish set");
  }
  v.detail << (v.pass ? "" : " | ") << "sequential 6 crowdsourced + p4/p8 deduced; parallel {p1,p2,p3,p5,p6} then {p7}";
}

// 4. ClusterGraph deduction against path enumeration.
void deduction_oracle(Verdict& v) {
  const auto start = Clock::now();
  Rng rng(4004);
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  const int instances = 600;
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t objects = 2 + uniform_below(rng, 9);
    const auto inst = random_instance(rng, objects, objects * (objects - 1) / 2);
    std::vector<LabeledPair> labeled;
    ClusterGraph graph;
    for (const auto& p : inst.pairs) {
      if (uniform_double(rng) < 0.6) {
        const Label l = inst.truth.label(p);
        labeled.push_back({p, l, LabelSource::Crowd});
        graph.insert_labeled(p, l);
      }
    }
    for (std::size_t i = 1; i <= objects; ++i) {
      for (std::size_t j = i + 1; j <= objects; ++j) {
        const auto q = make_pair("q", "o" + std::to_string(i), "o" + std::to_string(j));
        ++queries;
        if (deduce_label(q, graph) != brute_force_deduce(q, labeled)) ++mismatches;
      }
    }
  }
  const double t = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.require(t < 30.0, "took " + fmt(t) + " s");
  v.detail << (v.pass ? "" : " | ") << instances << " instances, " << queries << " queries, " << mismatches
           << " mismatches in " << fmt(t) << " s";
}

// 5. Optimal order by exhaustive search, within-block shuffles, adjacent swaps.
void optimality(Verdict& v) {
  Rng rng(5005);
  const int instances = 150;
  std::size_t permutations = 0;
  std::size_t shuffles = 0;
  std::size_t swaps = 0;
  for (int trial = 0; trial < instances; ++trial) {
    const auto inst = random_instance(rng, 2 + uniform_below(rng, 5), 7);
    const auto& pairs = inst.pairs;
    const auto labels = truth_labels(inst);
    auto count = [&](const LabelingOrder& o) {
      const auto flags = simulate_sequential(o, pairs, labels);
      return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    };
    const auto optimal = oracle_optimal_order(pairs, inst.truth);
    const std::size_t best = count(optimal);

    LabelingOrder perm = given_order(pairs);
    std::size_t minimum = SIZE_MAX;
    do {
      minimum = std::min(minimum, count(perm));
      ++permutations;
    } while (std::next_permutation(perm.sequence.begin(), perm.sequence.end()));
    v.require(best == minimum, "instance " + std::to_string(trial) + ": optimal " + std::to_string(best) +
                                   " vs minimum " + std::to_string(minimum));

    // Shuffling inside the matching block and inside the non-matching block.
    const auto matching = static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [&](const Pair& p) { return inst.truth.label(p) == Label::Matching; }));
    for (int s = 0; s < 10; ++s) {
      LabelingOrder shuffled = optimal;
      shuffle(shuffled.sequence.begin(), shuffled.sequence.begin() + static_cast<std::ptrdiff_t>(matching), rng);
      shuffle(shuffled.sequence.begin() + static_cast<std::ptrdiff_t>(matching), shuffled.sequence.end(), rng);
      ++shuffles;
      v.require(count(shuffled) == best, "block shuffle changed the count in instance " + std::to_string(trial));
    }

    // Swapping an adjacent (non-matching, matching) pair never adds work.
    for (int s = 0; s < 10; ++s) {
      LabelingOrder o = random_order(pairs, rng());
      const std::size_t before = count(o);
      for (std::size_t i = 0; i + 1 < o.size(); ++i) {
        if (labels[o.sequence[i]] == Label::NonMatching && labels[o.sequence[i + 1]] == Label::Matching) {
          LabelingOrder swapped = o;
          std::swap(swapped.sequence[i], swapped.sequence[i + 1]);
          ++swaps;
          v.require(count(swapped) <= before, "adjacent swap increased the count in instance " + std::to_string(trial));
        }
      }
    }
  }
  v.detail << (v.pass ? "" : " | ") << instances << " instances, " << permutations << " permutations, " << shuffles
           << " block shuffles, " << swaps << " adjacent swaps";
}

// 6. Parallel and sequential crowdsource the same pairs.
void parallel_equivalence(Verdict& v) {
  Rng rng(6006);
  const int instances = 250;
  struct Combo {
    bool instant;
    bool ascending;
  };
  const Combo combos[] = {{false, false}, {false, true}, {true, false}, {true, true}};
  std::size_t runs = 0;
  for (int trial = 0; trial < instances; ++trial) {
    const auto inst = random_instance(rng, 4 + uniform_below(rng, 12), 50);
    const auto order = random_order(inst.pairs, static_cast<std::uint64_t>(trial));
    TruthfulCrowd crowd(inst.truth);
    const auto seq = sequential_label(order, inst.pairs, crowd);
    for (const auto& c : combos) {
      EngineConfig config;
      config.instant_decision = c.instant;
      config.nonmatching_first = c.instant && c.ascending;
      config.seed = static_cast<std::uint64_t>(trial);
      ParallelEngine engine(inst.pairs, order, config);
      const auto par = drive(engine, crowd, c.ascending, config.seed);
      ++runs;
      v.require(par.crowdsourced_ids() == seq.crowdsourced_ids(),
                "instance " + std::to_string(trial) + " instant=" + std::to_string(c.instant) +
                    " ascending=" + std::to_string(c.ascending));
    }
  }
  v.detail << (v.pass ? "" : " | ") << instances << " instances x 4 flag combinations = " << runs << " runs";
}

// 7. Savings on fully connected clusters.
void cluster_savings(Verdict& v) {
  std::string summary;
  for (const auto& [size, crowd_want, deduced_want] :
       std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>{{102, 101, 5050}, {3, 2, 1}}) {
    const auto fx = within_cluster_pairs({size});
    RunSpec spec;
    const auto out = run_pipeline(spec, fx.pairs, fx.truth);
    v.require(out.result.crowdsourced_count == crowd_want && out.result.deduced_count == deduced_want,
              std::to_string(size) + "-object cluster: " + std::to_string(out.result.crowdsourced_count) + "/" +
                  std::to_string(out.result.deduced_count));
    summary += (summary.empty() ? "" : "; ") + std::to_string(size) + " objects: " + std::to_string(fx.pairs.size()) +
               " pairs -> " + std::to_string(out.result.crowdsourced_count) + " crowdsourced, " +
               std::to_string(out.result.deduced_count) + " deduced";
  }
  v.detail << (v.pass ? "" : " | ") << summary;
}

// 8. Instant decision on the running example.
void instant_decision(Verdict& v) {
  const auto pairs = running_pairs();
  const auto truth = running_truth();
  EngineConfig config;
  config.instant_decision = true;
  {
    ParallelEngine e(pairs, given_order(pairs), config);
    e.start();
    auto pos = [&](const char* id) { return *e.position_of(id); };
    const auto d1 = e.apply_answer(pos("p3"), Label::NonMatching);
    const auto d2 = e.apply_answer(pos("p6"), Label::NonMatching);
    v.require(d1.published.empty(), "p3 alone published something");
    v.require(published_ids(e, d2.published) == std::vector<PairId>{"p7"}, "p6 did not publish exactly p7");
    for (const char* id : {"p1", "p2", "p5"}) {
      v.require(e.state(pos(id)).status == PairStatus::Published, std::string(id) + " no longer outstanding");
    }
  }
  // Every answer order a single truthful worker could follow.
  std::size_t sequences = 0;
  std::size_t matching_answers = 0;
  std::vector<std::string> violations;
  std::function<void(std::vector<std::size_t>)> explore = [&](std::vector<std::size_t> prefix) {
    ParallelEngine e(pairs, given_order(pairs), config);
    e.start();
    for (auto p : prefix) e.apply_answer(p, truth.label(pairs[p]));
    if (e.outstanding().empty()) {
      ++sequences;
      return;
    }
    for (auto next : std::vector<std::size_t>(e.outstanding())) {
      ParallelEngine probe(pairs, given_order(pairs), config);
      probe.start();
      for (auto p : prefix) probe.apply_answer(p, truth.label(pairs[p]));
      const Label l = truth.label(pairs[next]);
      const auto delta = probe.apply_answer(next, l);
      if (l == Label::Matching) {
        ++matching_answers;
        if (!delta.published.empty()) violations.push_back(pairs[next].id);
      }
      auto longer = prefix;
      longer.push_back(next);
      explore(longer);
    }
  };
  explore({});
  v.require(violations.empty(), std::to_string(violations.size()) + " matching answers published new pairs");
  v.detail << (v.pass ? "" : " | ") << "p3,p6 -> p7 while p1,p2,p5 outstanding; " << sequences
           << " answer orders, " << matching_answers << " matching answers, none published";
}

constexpr double kSyntheticThreshold = 0.1;
constexpr int kSyntheticDatasets = 50;

// 9. Mean crowdsourced counts by order over synthetic data.
void order_trend(Verdict& v) {
  const auto start = Clock::now();
  double sum[4] = {0, 0, 0, 0};
  double candidates = 0;
  for (int s = 0; s < kSyntheticDatasets; ++s) {
    const auto inst = make_synthetic(1000 + static_cast<std::uint64_t>(s));
    const auto pairs = generate_candidates(inst.dataset, kSyntheticThreshold).pairs;
    candidates += static_cast<double>(pairs.size());
    const LabelingOrder orders[] = {oracle_optimal_order(pairs, inst.truth), heuristic_order(pairs),
                                    random_order(pairs, static_cast<std::uint64_t>(s)),
                                    oracle_worst_order(pairs, inst.truth)};
    for (int k = 0; k < 4; ++k) {
      sum[k] += static_cast<double>(crowdsourced_count(orders[k], pairs, inst.truth).count);
    }
  }
  double mean[4];
  for (int k = 0; k < 4; ++k) mean[k] = sum[k] / kSyntheticDatasets;
  const double t = seconds_since(start);
  v.require(mean[0] <= mean[1] && mean[1] <= mean[2] && mean[2] <= mean[3], "means out of order");
  v.require(mean[3] >= 2.0 * mean[0], "worst/optimal below 2");
  v.require(t < 120.0, "took " + fmt(t) + " s");
  v.detail << (v.pass ? "" : " | ") << "mean over " << kSyntheticDatasets << " datasets (" << fmt(candidates / 50, 0)
           << " candidates): optimal " << fmt(mean[0], 1) << " <= heuristic " << fmt(mean[1], 1) << " <= random "
           << fmt(mean[2], 1) << " <= worst " << fmt(mean[3], 1) << ", worst/optimal " << fmt(mean[3] / mean[0])
           << " in " << fmt(t) << " s";
}

// 10. F-measure under a noisy crowd, transitive vs not.
void noisy_quality(Verdict& v) {
  double f_transitive = 0;
  double f_plain = 0;
  double worst_gap = 0;
  for (int s = 0; s < kSyntheticDatasets; ++s) {
    const auto inst = make_synthetic(2000 + static_cast<std::uint64_t>(s));
    const auto pairs = generate_candidates(inst.dataset, kSyntheticThreshold).pairs;
    RunSpec spec;
    spec.error_rate = 0.1;
    spec.replicas = 3;
    spec.seed = static_cast<std::uint64_t>(s);
    const double a = run_pipeline(spec, pairs, inst.truth).report.quality->f_measure;
    spec.transitive = false;
    const double b = run_pipeline(spec, pairs, inst.truth).report.quality->f_measure;
    f_transitive += a;
    f_plain += b;
    worst_gap = std::max(worst_gap, b - a);
  }
  f_transitive /= kSyntheticDatasets;
  f_plain /= kSyntheticDatasets;
  const double gap = f_plain - f_transitive;
  v.require(gap <= 0.06, "mean gap " + fmt(100 * gap, 1) + " points");
  v.detail << (v.pass ? "" : " | ") << "e=0.1, 3 replicas, " << kSyntheticDatasets << " runs: F transitive "
           << fmt(f_transitive, 4) << ", non-transitive " << fmt(f_plain, 4) << ", mean gap " << fmt(100 * gap, 2)
           << " points (largest single-run gap " << fmt(100 * worst_gap, 2) << ")";
}

// 11. A service session driven over HTTP replays to the same report.
void replay_equivalence(Verdict& v) {
  const auto inst = make_synthetic(77, {.objects = 80});
  const auto pairs = generate_candidates(inst.dataset, 0.2).pairs;
  Json candidates = Json::array();
  for (const auto& p : pairs) {
    candidates.push_back({{"pair_id", p.id}, {"left", p.left}, {"right", p.right}, {"likelihood", p.likelihood}});
  }
  LiveServer server;
  auto c = server.client();
  const auto created = post_json(*c, "/api/sessions",
                                 {{"candidates", candidates}, {"config", {{"replicas", 3}, {"batch_size", 10}}}});
  if (status_of(created) != 201) {
    v.require(false, "create returned " + std::to_string(status_of(created)));
    return;
  }
  const std::string base = "/api/sessions/" + body_of(created)["session_id"].get<std::string>();
  const NoiseModel noise{0.1, 99};
  std::map<PairId, const Pair*> by_id;
  for (const auto& p : pairs) by_id[p.id] = &p;
  std::size_t answers = 0;
  for (int round = 0; round < 100000; ++round) {
    bool any = false;
    for (int w = 0; w < 4; ++w) {
      const std::string worker = "w" + std::to_string(w);
      const auto next = c->Get(base + "/hits/next?worker=" + worker);
      if (status_of(next) != 200) continue;
      const auto hit = body_of(next);
      for (const auto& p : hit["pairs"]) {
        const Pair& pair = *by_id.at(p["pair_id"].get<std::string>());
        const Label l = noisy_answer(pair, inst.truth, noise, worker);
        const auto r = post_json(*c, base + "/hits/" + hit["hit_id"].get<std::string>() + "/answers",
                                 {{"worker", worker}, {"pair_id", pair.id}, {"label", std::string(to_string(l))}});
        if (status_of(r) == 200) ++answers;
      }
      any = true;
    }
    if (!any) break;
  }
  const auto results = c->Get(base + "/results");
  if (status_of(results) != 200) {
    v.require(false, "results returned " + std::to_string(status_of(results)));
    return;
  }
  const auto live = parse_report(results->body);
  std::vector<AnswerRecord> log;
  const auto logged = body_of(c->Get(base + "/log"));
  for (const auto& a : logged["answers"]) log.push_back(AnswerRecord::from_json(a));
  const auto config = SessionConfig::from_json(body_of(c->Get(base))["config"]);
  const auto replayed = replay_answers(pairs, config, log);
  const auto offline = session_report(config, replayed);
  v.require(log.size() == answers, "log has " + std::to_string(log.size()) + " of " + std::to_string(answers));
  v.require(replayed.crowdsourced_ids() == [&] {
    PairIdSet s;
    for (const auto& lp : live.labels) {
      if (lp.source == LabelSource::Crowd) s.insert(lp.pair.id);
    }
    return s;
  }(), "crowdsourced partition differs");
  v.require(to_json(offline) == Json::parse(results->body), "reports differ");
  v.detail << (v.pass ? "" : " | ") << pairs.size() << " pairs, " << answers << " answers over HTTP, "
           << live.savings.crowdsourced << " crowdsourced / " << live.savings.deduced
           << " deduced; replayed partition and report identical";
}

}  // namespace
}  // namespace crowdjoin

int main() {
  using namespace crowdjoin;
  const std::vector<std::pair<const char*, void (*)(Verdict&)>> criteria = {
      {"expected counts of the six triangle orders", expected_counts},
      {"triangle order sensitivity", order_sensitivity},
      {"running example, sequential and parallel", running_example},
      {"deduction agrees with path enumeration", deduction_oracle},
      {"optimal order and same-label rearrangements", optimality},
      {"parallel crowdsources the sequential set", parallel_equivalence},
      {"cluster savings", cluster_savings},
      {"instant decision", instant_decision},
      {"order quality trend", order_trend},
      {"noisy crowd quality", noisy_quality},
      {"service log replay", replay_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.str().c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
