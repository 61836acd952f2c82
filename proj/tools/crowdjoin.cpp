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

// Command-line front end: candidate generation, simulated labeling runs,
// expected-cost computation, parameter sweeps, log replay and the HTTP
// labeling service.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crowdjoin/experiment.hpp"
#include "crowdjoin/ingestion.hpp"
#include "crowdjoin/metrics.hpp"
#include "crowdjoin/ordering.hpp"
#include "crowdjoin/report.hpp"
#include "crowdjoin/server.hpp"
#include "crowdjoin/session.hpp"
#include "crowdjoin/synthetic.hpp"

namespace cj = crowdjoin;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CROWDJOIN_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw cj::Error(std::string("CROWDJOIN_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_threshold(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void check_threshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("threshold out of range: must lie in [0,1]");
}

// Writes to --output when given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cj::Error("cannot write '" + path + "'");
  out << text;
}

struct Inputs {
  std::string dataset;
  std::string dataset2;
  std::string pairs;
  std::string likelihoods;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--dataset", in.dataset, "Records CSV (header row, first column id)");
  cmd->add_option("--dataset2", in.dataset2, "Second collection for a two-table join");
  cmd->add_option("--pairs", in.pairs, "Candidate pairs as JSONL instead of a dataset");
  cmd->add_option("--likelihoods", in.likelihoods, "CSV left,right,likelihood overriding the Jaccard score");
}

// Every candidate at or above `threshold`, from either input form.
std::vector<cj::Pair> load_pairs(const Inputs& in, double threshold) {
  check_threshold(threshold);
  if (!in.pairs.empty()) {
    if (!in.dataset.empty()) throw std::invalid_argument("give either --pairs or --dataset, not both");
    return cj::filter_by_threshold(cj::load_candidates_jsonl(in.pairs), threshold);
  }
  if (in.dataset.empty()) throw std::invalid_argument("one of --pairs or --dataset is required");
  const auto dataset = in.dataset2.empty() ? cj::load_csv(in.dataset) : cj::load_two_table(in.dataset, in.dataset2);
  cj::LikelihoodOverrides overrides;
  if (!in.likelihoods.empty()) overrides = cj::load_likelihood_overrides(in.likelihoods);
  return cj::generate_candidates(dataset, threshold, in.likelihoods.empty() ? nullptr : &overrides).pairs;
}

cj::EngineMode parse_mode(const std::string& s) {
  if (s == "parallel") return cj::EngineMode::Parallel;
  if (s == "sequential") return cj::EngineMode::Sequential;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowdsourced join labeling with transitive deduction"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string output;

  // candidates
  auto* candidates = app.add_subcommand("candidates", "Generate thresholded candidate pairs as JSONL");
  Inputs cand_in;
  double cand_threshold = 0.5;
  std::size_t record_cap = cj::kDefaultRecordCap;
  candidates->add_option("--dataset", cand_in.dataset, "Records CSV")->required();
  candidates->add_option("--dataset2", cand_in.dataset2, "Second collection for a two-table join");
  candidates->add_option("--likelihoods", cand_in.likelihoods, "CSV left,right,likelihood overrides");
  candidates->add_option("--threshold", cand_threshold, "Minimum likelihood")->capture_default_str();
  candidates->add_option("--record-cap", record_cap, "Refuse datasets above this many records")
      ->capture_default_str();
  candidates->add_option("--output", output, "Output file (default stdout)");

  // clusters
  auto* clusters = app.add_subcommand("clusters", "Print the cluster-size distribution of a truth file");
  std::string clusters_truth;
  clusters->add_option("--truth", clusters_truth, "Truth CSV (object_id,cluster_id)")->required();
  clusters->add_option("--output", output, "Output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Simulate a labeling run and write a JSON report");
  cj::RunSpec spec;
  Inputs run_in;
  std::string run_order = "heuristic";
  std::string run_mode = "parallel";
  bool non_transitive = false;
  add_inputs(run, run_in);
  run->add_option("--truth", spec.truth, "Truth CSV used to simulate the crowd")->required();
  run->add_option("--threshold", spec.threshold, "Minimum likelihood")->capture_default_str();
  run->add_option("--order", run_order, "optimal|worst|heuristic|random|given (optimal and worst are oracles)")
      ->capture_default_str();
  run->add_option("--mode", run_mode, "sequential|parallel")->capture_default_str();
  run->add_flag("--instant-decision", spec.instant_decision, "Re-decide publications after every answer");
  run->add_flag("--nonmatching-first", spec.nonmatching_first, "Answer likely non-matching pairs first");
  run->add_flag("--non-transitive", non_transitive, "Crowdsource every pair, no deduction");
  run->add_option("--error-rate", spec.error_rate, "Per-answer flip probability")->capture_default_str();
  run->add_option("--replicas", spec.replicas, "Workers per pair, majority vote")->capture_default_str();
  run->add_option("--batch-size", spec.batch_size, "Pairs per HIT")->capture_default_str();
  run->add_option("--seed", seed, "Seed (default $CROWDJOIN_SEED or 0)");
  run->add_option("--output", output, "Report file (default stdout)");

  // expected
  auto* expected = app.add_subcommand("expected", "Expected number of crowdsourced pairs of an order");
  std::string exp_pairs;
  std::string exp_order = "given";
  expected->add_option("--pairs", exp_pairs, "Candidate pairs JSONL")->required();
  expected->add_option("--order", exp_order, "given|heuristic|random or comma-separated pair ids")
      ->capture_default_str();
  expected->add_option("--seed", seed, "Seed for --order random");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations and print CSV");
  Inputs sweep_in;
  std::string sweep_truth;
  std::string thresholds = "0.5";
  std::string orders = "heuristic";
  std::string modes = "parallel";
  std::string seeds_text;
  std::size_t seed_count = 1;
  cj::RunSpec sweep_base;
  bool sweep_nontransitive = false;
  add_inputs(sweep, sweep_in);
  sweep->add_option("--truth", sweep_truth, "Truth CSV")->required();
  sweep->add_option("--thresholds", thresholds, "Comma-separated thresholds")->capture_default_str();
  sweep->add_option("--orders", orders, "Comma-separated orders")->capture_default_str();
  sweep->add_option("--modes", modes, "Comma-separated modes")->capture_default_str();
  sweep->add_option("--seeds", seed_count, "Number of seeds, starting at --seed")->capture_default_str();
  sweep->add_option("--seed-list", seeds_text, "Explicit comma-separated seeds");
  sweep->add_option("--seed", seed, "First seed (default $CROWDJOIN_SEED or 0)");
  sweep->add_flag("--instant-decision", sweep_base.instant_decision, "Parallel rows use instant decision");
  sweep->add_flag("--nonmatching-first", sweep_base.nonmatching_first, "Parallel rows use non-matching first");
  sweep->add_flag("--non-transitive", sweep_nontransitive, "Crowdsource every pair, no deduction");
  sweep->add_option("--error-rate", sweep_base.error_rate, "Per-answer flip probability")->capture_default_str();
  sweep->add_option("--replicas", sweep_base.replicas, "Workers per pair")->capture_default_str();
  sweep->add_option("--batch-size", sweep_base.batch_size, "Pairs per HIT")->capture_default_str();
  sweep->add_option("--output", output, "CSV file (default stdout)");

  // replay
  auto* replay = app.add_subcommand("replay", "Rebuild a service session report from its answer log");
  std::string replay_session;
  std::string replay_log;
  replay->add_option("--session", replay_session, "<id>.session.json from the service log directory")->required();
  replay->add_option("--log", replay_log, "<id>.answers.jsonl (default next to the session file)");
  replay->add_option("--output", output, "Report file (default stdout)");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset and its truth");
  cj::SyntheticOptions synth_opts;
  std::string synth_dataset;
  std::string synth_truth;
  synth->add_option("--objects", synth_opts.objects, "Number of records")->capture_default_str();
  synth->add_option("--seed", seed, "Seed (default $CROWDJOIN_SEED or 0)");
  synth->add_option("--dataset", synth_dataset, "Records CSV to write")->required();
  synth->add_option("--truth", synth_truth, "Truth CSV to write")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP labeling service");
  cj::ServerOptions server_opts;
  serve->add_option("--host", server_opts.host, "Bind address")->capture_default_str();
  serve->add_option("--port", server_opts.port, "Port")->capture_default_str();
  serve->add_option("--log-dir", server_opts.log_dir, "Persist sessions and answer logs here");
  serve->add_option("--static-dir", server_opts.static_dir, "Serve the worker UI from this directory");

  try {
    seed = default_seed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (candidates->parsed()) {
      check_threshold(cand_threshold);
      const auto dataset = cand_in.dataset2.empty() ? cj::load_csv(cand_in.dataset)
                                                    : cj::load_two_table(cand_in.dataset, cand_in.dataset2);
      cj::LikelihoodOverrides overrides;
      if (!cand_in.likelihoods.empty()) overrides = cj::load_likelihood_overrides(cand_in.likelihoods);
      const auto set = cj::generate_candidates(dataset, cand_threshold,
                                               cand_in.likelihoods.empty() ? nullptr : &overrides, record_cap);
      std::ostringstream out;
      cj::write_candidates_jsonl(out, set.pairs);
      emit(output, out.str());
      return 0;
    }

    if (clusters->parsed()) {
      std::ostringstream out;
      out << "size,count\n";
      for (const auto& [size, count] : cj::cluster_size_distribution(cj::load_truth(clusters_truth))) {
        out << size << ',' << count << '\n';
      }
      emit(output, out.str());
      return 0;
    }

    if (run->parsed()) {
      spec.dataset = run_in.dataset;
      spec.dataset2 = run_in.dataset2;
      spec.pairs = run_in.pairs;
      spec.likelihoods = run_in.likelihoods;
      spec.order = cj::parse_order_kind(run_order);
      spec.mode = parse_mode(run_mode);
      spec.transitive = !non_transitive;
      spec.seed = seed;
      spec.validate();
      const auto pairs = load_pairs(run_in, spec.threshold);
      const auto truth = cj::load_truth(spec.truth);
      const auto outcome = cj::run_pipeline(spec, pairs, truth);
      emit(output, cj::dump_report(outcome.report));
      const auto& s = outcome.report.savings;
      std::cerr << "pairs=" << s.total_pairs << " crowdsourced=" << s.crowdsourced << " deduced=" << s.deduced
                << " iterations=" << s.iteration_sizes.size() << " hits=" << outcome.hits
                << " f_measure=" << csv_number(outcome.report.quality->f_measure) << "\n";
      return 0;
    }

    if (expected->parsed()) {
      const auto pairs = cj::load_candidates_jsonl(exp_pairs);
      cj::LabelingOrder order;
      if (exp_order == "given") {
        order = cj::given_order(pairs);
      } else if (exp_order == "heuristic") {
        order = cj::heuristic_order(pairs);
      } else if (exp_order == "random") {
        order = cj::random_order(pairs, seed);
      } else {
        const auto ids = split_list(exp_order);
        order = cj::order_from_ids(pairs, ids);
      }
      std::printf("%.6f\n", cj::expected_crowdsourced_count(order, pairs));
      return 0;
    }

    if (sweep->parsed()) {
      std::vector<double> ts;
      for (const auto& t : split_list(thresholds)) {
        ts.push_back(parse_threshold(t));
        check_threshold(ts.back());
      }
      std::vector<cj::OrderKind> os;
      for (const auto& o : split_list(orders)) os.push_back(cj::parse_order_kind(o));
      std::vector<cj::EngineMode> ms;
      for (const auto& m : split_list(modes)) ms.push_back(parse_mode(m));
      std::vector<std::uint64_t> seeds;
      if (!seeds_text.empty()) {
        for (const auto& s : split_list(seeds_text)) seeds.push_back(std::stoull(s));
      } else {
        for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(seed + i);
      }
      std::ostringstream out;
      out << "threshold,order,mode,instant_decision,nonmatching_first,transitive,seed,candidates,crowdsourced,"
             "deduced,iterations,hits,precision,recall,f_measure\n";
      if (!ts.empty() && !os.empty() && !ms.empty() && !seeds.empty()) {
        const auto truth = cj::load_truth(sweep_truth);
        const auto all = load_pairs(sweep_in, 0.0);
        for (double t : ts) {
          const auto pairs = cj::filter_by_threshold(all, t);
          for (auto o : os) {
            for (auto m : ms) {
              for (auto sd : seeds) {
                cj::RunSpec row = sweep_base;
                row.threshold = t;
                row.order = o;
                row.mode = m;
                row.seed = sd;
                row.transitive = !sweep_nontransitive;
                if (m == cj::EngineMode::Sequential) row.instant_decision = row.nonmatching_first = false;
                const auto r = cj::run_pipeline(row, pairs, truth);
                const auto& s = r.report.savings;
                const auto& q = *r.report.quality;
                out << csv_number(t) << ',' << cj::to_string(o) << ','
                    << (m == cj::EngineMode::Parallel ? "parallel" : "sequential") << ','
                    << (row.instant_decision ? 1 : 0) << ',' << (row.nonmatching_first ? 1 : 0) << ','
                    << (row.transitive ? 1 : 0) << ',' << sd << ',' << pairs.size() << ',' << s.crowdsourced
                    << ',' << s.deduced << ',' << s.iteration_sizes.size() << ',' << r.hits << ','
                    << csv_number(q.precision) << ',' << csv_number(q.recall) << ',' << csv_number(q.f_measure)
                    << '\n';
              }
            }
          }
        }
      }
      emit(output, out.str());
      return 0;
    }

    if (replay->parsed()) {
      std::ifstream in(replay_session, std::ios::binary);
      if (!in) throw cj::Error("cannot open '" + replay_session + "'");
      const auto saved = cj::Json::parse(in);
      const auto request = cj::SessionRequest::from_json(saved);
      std::string log = replay_log;
      if (log.empty()) {
        log = (std::filesystem::path(replay_session).parent_path() /
               (saved.at("session_id").get<std::string>() + ".answers.jsonl"))
                  .string();
      }
      const auto answers = std::filesystem::exists(log) ? cj::read_answer_log(log) : std::vector<cj::AnswerRecord>{};
      const auto result = cj::replay_answers(request.pairs, request.config, answers);
      if (result.labels.size() != request.pairs.size()) {
        std::cerr << "warning: log leaves " << request.pairs.size() - result.labels.size() << " pair(s) unlabeled\n";
      }
      emit(output, cj::dump_report(cj::session_report(request.config, result)));
      return 0;
    }

    if (synth->parsed()) {
      const auto inst = cj::make_synthetic(seed, synth_opts);
      cj::write_dataset_csv(synth_dataset, inst.dataset);
      cj::write_truth_csv(synth_truth, inst.truth);
      return 0;
    }

    if (serve->parsed()) {
      cj::SessionStore store(server_opts.log_dir);
      if (const auto n = store.restore()) std::cerr << "restored " << n << " session(s)\n";
      httplib::Server server;
      std::cerr << "listening on http://" << server_opts.host << ':' << server_opts.port << "/api\n";
      if (!cj::serve(server, store, server_opts)) {
        std::cerr << "error: cannot listen on " << server_opts.host << ':' << server_opts.port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
