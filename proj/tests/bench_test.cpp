/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <set>
#include <unordered_set>

#include "ddf/bench/calibrate.hpp"
#include "ddf/bench/datagen.hpp"
#include "ddf/bench/runner.hpp"
#include "ddf/serialize.hpp"
#include "support/random_tables.hpp"

using namespace ddf;
using namespace ddf::bench;

TEST_CASE("generated keys respect the cardinality pool") {
  Table t = generate_table(100, two_int64_schema(), 0.9, 1);
  std::unordered_set<int64_t> distinct;
  for (int64_t r = 0; r < t.num_rows(); r++) {
    distinct.insert(t.column(0).int64_at(r));
  }
  CHECK(distinct.size() <= 90);
  CHECK(distinct.size() >= 80);  // pool of 90 with 10 repeats

  // C = 1: all keys distinct, a permutation of the pool
  Table unique_keys = generate_table(64, two_int64_schema(), 1.0, 2);
  std::unordered_set<int64_t> seen;
  for (int64_t r = 0; r < unique_keys.num_rows(); r++) {
    CHECK(seen.insert(unique_keys.column(0).int64_at(r)).second);
  }
}

TEST_CASE("generation is deterministic per seed") {
  Table a = generate_table(500, two_int64_schema(), 0.5, 99);
  Table b = generate_table(500, two_int64_schema(), 0.5, 99);
  CHECK(table_to_bytes(a) == table_to_bytes(b));
  Table c = generate_table(500, two_int64_schema(), 0.5, 100);
  CHECK(table_to_bytes(a) != table_to_bytes(c));
}

TEST_CASE("degenerate generation parameters are rejected") {
  CHECK_THROWS_AS(generate_table(100, two_int64_schema(), 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(generate_table(100, two_int64_schema(), 1.5, 1), InvalidArgument);
}

TEST_CASE("single-worker join moves no shuffle bytes") {
  BenchConfig cfg;
  cfg.op = "join";
  cfg.rows = 2000;
  cfg.workers = 1;
  cfg.reps = 2;
  TimingReport report = run_benchmark(cfg);
  CHECK(report.stage_bytes("shuffle-left") == 0);
  CHECK(report.stage_bytes("shuffle-right") == 0);
}

TEST_CASE("stage names follow each operator's documented sequence") {
  auto stage_names = [](const char* op, const char* strategy) {
    BenchConfig cfg;
    cfg.op = op;
    cfg.strategy = strategy;
    cfg.rows = 4000;
    cfg.workers = 4;
    cfg.reps = 1;
    TimingReport report = run_benchmark(cfg);
    std::set<std::string> names;
    for (const auto& s : report.stages) names.insert(s.name);
    return names;
  };

  CHECK(stage_names("join", "hash") ==
        std::set<std::string>{"partition", "split", "shuffle-left",
                              "shuffle-right", "local-join"});
  CHECK(stage_names("groupby", "combine") ==
        std::set<std::string>{"combine", "partition", "split", "shuffle",
                              "reduce"});
  CHECK(stage_names("groupby", "shuffle") ==
        std::set<std::string>{"partition", "split", "shuffle", "local-groupby"});
  CHECK(stage_names("sort", "sample") ==
        std::set<std::string>{"local-sort", "sample-pivots", "split", "shuffle",
                              "local-merge"});
  CHECK(stage_names("sort", "range") ==
        std::set<std::string>{"allreduce-range", "range-partition", "shuffle",
                              "local-sort"});
  CHECK(stage_names("unique", "") ==
        std::set<std::string>{"local-distinct", "partition", "split", "shuffle",
                              "final-distinct"});
  CHECK(stage_names("aggregate", "") ==
        std::set<std::string>{"local-op", "allreduce", "finalize"});
  CHECK(stage_names("window", "") ==
        std::set<std::string>{"halo-exchange", "local-window"});
}

TEST_CASE("byte counts are deterministic across runs") {
  BenchConfig cfg;
  cfg.op = "groupby";
  cfg.rows = 4000;
  cfg.workers = 4;
  cfg.reps = 2;
  cfg.seed = 7;
  TimingReport a = run_benchmark(cfg);
  TimingReport b = run_benchmark(cfg);
  REQUIRE(a.stages.size() == b.stages.size());
  for (size_t i = 0; i < a.stages.size(); i++) {
    CHECK(a.stages[i].name == b.stages[i].name);
    CHECK(a.stages[i].bytes == b.stages[i].bytes);
  }
}

TEST_CASE("scaling suite with a single parallelism yields one report") {
  BenchConfig cfg;
  cfg.op = "select";
  cfg.rows = 1000;
  cfg.reps = 1;
  auto reports = scaling_suite(ScalingKind::Strong, cfg, {1});
  CHECK(reports.size() == 1);
  // infeasible parallelism is skipped
  auto skipped = scaling_suite(ScalingKind::Strong, cfg, {100000});
  CHECK(skipped.empty());
}

TEST_CASE("weak scaling keeps rows per worker fixed") {
  BenchConfig cfg;
  cfg.op = "select";
  cfg.rows = 500;  // per worker under weak scaling
  cfg.reps = 1;
  auto reports = scaling_suite(ScalingKind::Weak, cfg, {1, 2});
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].config.rows == 500);
  CHECK(reports[1].config.rows == 1000);
}

TEST_CASE("hockney fit recovers injected constants within 5%") {
  const double alpha = 2e-6, beta = 1e-9;
  HockneyFit fit = calibrate_from_measure(
      [&](int64_t bytes) { return alpha + double(bytes) * beta; });
  CHECK(fit.alpha == doctest::Approx(alpha).epsilon(0.05));
  CHECK(fit.beta == doctest::Approx(beta).epsilon(0.05));
  CHECK(fit.residual < 1e-9);
}

TEST_CASE("zero-size messages isolate alpha") {
  std::vector<double> xs = {0, 0, 0, 1024, 2048};
  std::vector<double> ys = {3e-6, 3e-6, 3e-6, 3e-6 + 1024e-9, 3e-6 + 2048e-9};
  HockneyFit fit = fit_hockney(xs, ys);
  CHECK(fit.alpha == doctest::Approx(3e-6).epsilon(0.01));
  CHECK(fit.beta == doctest::Approx(1e-9).epsilon(0.01));
}

TEST_CASE("fit rejects degenerate sweeps") {
  std::vector<double> xs = {5, 5};
  std::vector<double> ys = {1, 2};
  CHECK_THROWS_AS(fit_hockney(xs, ys), InvalidArgument);
}

TEST_CASE("report JSON round-trips") {
  BenchConfig cfg;
  cfg.op = "aggregate";
  cfg.rows = 1000;
  cfg.workers = 2;
  cfg.reps = 1;
  TimingReport report = run_benchmark(cfg);
  TimingReport back = TimingReport::from_json_string(report.to_json_string());
  CHECK(back.config.op == "aggregate");
  REQUIRE(back.stages.size() == report.stages.size());
  for (size_t i = 0; i < back.stages.size(); i++) {
    CHECK(back.stages[i].name == report.stages[i].name);
    CHECK(back.stages[i].bytes == report.stages[i].bytes);
  }
  CHECK(back.rank_detail.size() == 2);
}

TEST_CASE("predict-vs-measured pairs the model with the stages") {
  BenchConfig cfg;
  cfg.op = "join";
  cfg.rows = 4000;
  cfg.workers = 4;
  cfg.reps = 2;
  TimingReport report = run_benchmark(cfg);
  std::string comparison = predict_vs_measured(report, 1e-6, 1e-9, 1e-8);
  CHECK(comparison.find("startup_s") != std::string::npos);
  CHECK(comparison.find("bytes_total") != std::string::npos);
  CHECK(comparison.find("shuffle_compute_hash") != std::string::npos);

  // P=1: predicted and measured communication are both zero
  BenchConfig solo = cfg;
  solo.workers = 1;
  TimingReport solo_report = run_benchmark(solo);
  auto [pattern, core] = op_cost_mapping(solo);
  cost::CostParams params = cost_params_for(solo, 1e-6, 1e-9, 1e-8);
  cost::CostBreakdown b = cost::pattern_cost(pattern, params, core);
  CHECK(b.startup == 0);
  CHECK(b.transfer == 0);
  CHECK(solo_report.stage_bytes("shuffle-left") == 0);
}

TEST_CASE("predicted shuffle bytes track measured bytes within 10%") {
  BenchConfig cfg;
  cfg.op = "groupby";
  cfg.strategy = "shuffle";
  cfg.rows = 40000;
  cfg.workers = 4;
  cfg.reps = 1;
  cfg.cardinality = 1.0;
  TimingReport report = run_benchmark(cfg);
  uint64_t measured = report.stage_bytes("shuffle");

  auto [pattern, core] = op_cost_mapping(cfg);
  cost::CostParams params = cost_params_for(cfg, 1e-6, 1e-9, 1e-8);
  double predicted =
      cost::pattern_cost(pattern, params, core).predicted_bytes * cfg.workers;
  CHECK(double(measured) > 0.9 * predicted);
  CHECK(double(measured) < 1.1 * predicted);
}
