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

#pragma once

#include <string>
#include <vector>

#include "ddf/costmodel.hpp"
#include "ddf/table.hpp"

namespace ddf::bench {

struct BenchConfig {
  std::string op = "join";  // join|groupby|sort|union|difference|unique|
                            // select|project|map|aggregate|window|csv
  int64_t rows = 1000000;   // total rows (scaling_suite adjusts per kind)
  int workers = 4;
  double cardinality = 0.9;
  std::string transport = "local";  // local|tcp
  uint64_t seed = 42;
  std::string strategy;  // operator-specific algorithm selector
  int reps = 5;
  int64_t window = 8;    // rolling window width for op=window
  int bins = 256;        // histogram bins for range-partitioned sort
  int sample_size = 0;   // per-rank samples for sample sort (0 = world size)
  std::string json_out;  // empty = stdout only

  std::string to_json_string() const;
  static BenchConfig from_json_string(const std::string& text);
};

struct StageTiming {
  std::string name;
  double wall_s = 0;
  double cpu_s = 0;
  uint64_t bytes = 0;  // payload bytes this worker sent during the stage
};

/// Per-stage wall times and byte counts. Top-level stages report the
/// max-over-ranks wall (the BSP critical path) and the sum-over-ranks bytes;
/// rank_detail keeps each rank's view.
struct TimingReport {
  BenchConfig config;
  std::vector<StageTiming> stages;
  double total_wall_s = 0;  // max over ranks
  std::vector<std::vector<StageTiming>> rank_detail;

  std::string to_json_string() const;
  static TimingReport from_json_string(const std::string& text);

  uint64_t stage_bytes(const std::string& name) const;
  double stage_wall(const std::string& name) const;
};

/// Executes the configured operator with per-stage timers. Reps run
/// back-to-back with a barrier ahead of each timed region; the first rep is
/// warm-up (discarded when reps > 1) and the reported wall is the median of
/// the rest. Byte counts are deterministic per (config, seed).
TimingReport run_benchmark(const BenchConfig& cfg);

enum class ScalingKind { Strong, Weak };

/// Strong scaling holds cfg.rows fixed as total; weak scaling treats
/// cfg.rows as rows per worker. Infeasible entries (rows < P) are skipped
/// with a notice on stderr.
std::vector<TimingReport> scaling_suite(ScalingKind kind, const BenchConfig& base,
                                        const std::vector<int>& workers);

/// The (pattern, core) the cost model uses for an operator configuration.
std::pair<cost::PatternKind, cost::LocalOpKind> op_cost_mapping(
    const BenchConfig& cfg);

/// Cost parameters implied by a config plus calibrated constants.
cost::CostParams cost_params_for(const BenchConfig& cfg, double alpha, double beta,
                                 double kappa);

/// Pairs each measured stage group with the model's components: predicted
/// startup/transfer/compute vs measured comm/compute walls, and predicted vs
/// measured shuffle bytes. Returns a JSON string.
std::string predict_vs_measured(const TimingReport& measured, double alpha,
                                double beta, double kappa);

/// Entry point for spawned TCP worker processes (driven by DDF_* env vars).
/// Returns the process exit code.
int tcp_worker_main();

}  // namespace ddf::bench
