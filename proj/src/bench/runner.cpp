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

#include "ddf/bench/runner.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ddf/bench/datagen.hpp"
#include "ddf/comm/cluster.hpp"
#include "ddf/comm/collectives.hpp"
#include "ddf/comm/socket_transport.hpp"
#include "ddf/ops/aggregate.hpp"
#include "ddf/ops/groupby.hpp"
#include "ddf/ops/io.hpp"
#include "ddf/ops/join.hpp"
#include "ddf/ops/local_ops.hpp"
#include "ddf/ops/setops.hpp"
#include "ddf/ops/sort.hpp"
#include "ddf/ops/window.hpp"

namespace ddf::bench {

using nlohmann::json;

namespace {

json config_to_json(const BenchConfig& cfg) {
  return json{{"op", cfg.op},
              {"rows", cfg.rows},
              {"workers", cfg.workers},
              {"cardinality", cfg.cardinality},
              {"transport", cfg.transport},
              {"seed", cfg.seed},
              {"strategy", cfg.strategy},
              {"reps", cfg.reps},
              {"window", cfg.window},
              {"bins", cfg.bins},
              {"sample_size", cfg.sample_size}};
}

BenchConfig config_from_json(const json& j) {
  BenchConfig cfg;
  cfg.op = j.at("op").get<std::string>();
  cfg.rows = j.at("rows").get<int64_t>();
  cfg.workers = j.at("workers").get<int>();
  cfg.cardinality = j.at("cardinality").get<double>();
  cfg.transport = j.at("transport").get<std::string>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.strategy = j.at("strategy").get<std::string>();
  cfg.reps = j.at("reps").get<int>();
  cfg.window = j.value("window", int64_t(8));
  cfg.bins = j.value("bins", 256);
  cfg.sample_size = j.value("sample_size", 0);
  return cfg;
}

json stages_to_json(const std::vector<StageTiming>& stages) {
  json arr = json::array();
  for (const auto& s : stages) {
    arr.push_back(json{{"name", s.name},
                       {"wall_s", s.wall_s},
                       {"cpu_s", s.cpu_s},
                       {"bytes", s.bytes}});
  }
  return arr;
}

std::vector<StageTiming> stages_from_json(const json& arr) {
  std::vector<StageTiming> stages;
  for (const auto& j : arr) {
    StageTiming s;
    s.name = j.at("name").get<std::string>();
    s.wall_s = j.at("wall_s").get<double>();
    s.cpu_s = j.value("cpu_s", 0.0);
    s.bytes = j.at("bytes").get<uint64_t>();
    stages.push_back(std::move(s));
  }
  return stages;
}

/// Collects stage records, merging repeats of one name (both sides of a
/// binary operator report e.g. one "partition" stage).
class VectorSink final : public StageSink {
 public:
  void record(const std::string& name, double wall_s, double cpu_s,
              uint64_t bytes) override {
    for (auto& s : stages_) {
      if (s.name == name) {
        s.wall_s += wall_s;
        s.cpu_s += cpu_s;
        s.bytes += bytes;
        return;
      }
    }
    stages_.push_back({name, wall_s, cpu_s, bytes});
  }

  std::vector<StageTiming> take() { return std::move(stages_); }

 private:
  std::vector<StageTiming> stages_;
};

void validate(const BenchConfig& cfg) {
  if (cfg.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (cfg.rows < cfg.workers) throw InvalidArgument("need rows >= workers");
  if (cfg.cardinality <= 0 || cfg.cardinality > 1) {
    throw InvalidArgument("cardinality must be in (0, 1]");
  }
  if (cfg.reps < 1) throw InvalidArgument("reps must be >= 1");
}

int64_t local_rows(const BenchConfig& cfg, int rank) {
  int64_t base = cfg.rows / cfg.workers;
  int64_t rem = cfg.rows % cfg.workers;
  return base + (rank < rem ? 1 : 0);
}

/// Executes one repetition of the configured operator on this worker.
void execute_op(comm::WorkerContext& ctx, const BenchConfig& cfg,
                StageSink* sink) {
  const int rank = ctx.rank();
  const int64_t rows = local_rows(cfg, rank);
  const uint64_t seed = cfg.seed * 1000003ULL + uint64_t(rank);
  const Schema schema = two_int64_schema();
  const int key_cols[1] = {0};

  if (cfg.op == "join") {
    Table left = generate_table(rows, schema, cfg.cardinality, seed);
    Table right = generate_table(rows, schema, cfg.cardinality, seed ^ 0x5a5a5a5aULL);
    JoinAlgorithm algo = JoinAlgorithm::HashShuffle;
    if (cfg.strategy == "sort") algo = JoinAlgorithm::SortShuffle;
    if (cfg.strategy == "broadcast") algo = JoinAlgorithm::Broadcast;
    join(ctx, left, right, JoinKind::Inner, algo, sink);
  } else if (cfg.op == "groupby") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    GroupByStrategy strategy = cfg.strategy == "shuffle"
                                   ? GroupByStrategy::ShuffleCompute
                                   : GroupByStrategy::CombineShuffleReduce;
    groupby(ctx, t, key_cols, {{1, AggKind::Sum}}, strategy, sink);
  } else if (cfg.op == "sort") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    SortStrategy strategy = cfg.strategy == "range" ? SortStrategy::HistogramRange
                                                    : SortStrategy::SampleSort;
    sort(ctx, t, 0, strategy, sink, cfg.bins, cfg.sample_size);
  } else if (cfg.op == "union") {
    Table a = generate_table(rows, schema, cfg.cardinality, seed);
    Table b = generate_table(rows, schema, cfg.cardinality, seed ^ 0x77ULL);
    union_distinct(ctx, a, b, sink);
  } else if (cfg.op == "difference") {
    Table a = generate_table(rows, schema, cfg.cardinality, seed);
    Table b = generate_table(rows, schema, cfg.cardinality, seed ^ 0x77ULL);
    difference(ctx, a, b, sink);
  } else if (cfg.op == "unique") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    unique(ctx, t, key_cols, sink);
  } else if (cfg.op == "select") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    StageTimer timer(sink, &ctx, "local-op");
    select(t, [](const Table& tbl, int64_t r) {
      return (tbl.column(0).int64_at(r) & 1) == 0;
    });
  } else if (cfg.op == "project") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    StageTimer timer(sink, &ctx, "local-op");
    project(t, key_cols);
  } else if (cfg.op == "map") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    StageTimer timer(sink, &ctx, "local-op");
    map_column(t, 1, [](const Scalar& s) -> Scalar {
      if (scalar_is_null(s)) return s;
      return std::get<int64_t>(s) * 2 + 1;
    });
  } else if (cfg.op == "aggregate") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    column_aggregate(ctx, t, {{1, AggKind::Sum}, {1, AggKind::Mean}}, sink);
  } else if (cfg.op == "window") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    rolling_window(ctx, t, 1, cfg.window, sink);
  } else if (cfg.op == "csv") {
    Table t = generate_table(rows, schema, cfg.cardinality, seed);
    // Name must agree across worker processes, so no pid in it.
    std::string dir = std::filesystem::temp_directory_path() /
                      ("ddf-bench-csv-" + std::to_string(cfg.seed) + "-" +
                       std::to_string(cfg.workers));
    write_csv_partitioned(ctx, t, dir, sink);
    std::vector<std::string> paths;
    for (int r = 0; r < ctx.world_size(); r++) {
      char name[32];
      snprintf(name, sizeof(name), "part-%05d.csv", r);
      paths.push_back(dir + "/" + name);
    }
    read_csv_partitioned(ctx, paths, sink);
    comm::barrier(ctx);
    if (rank == 0) std::filesystem::remove_all(dir);
  } else {
    throw InvalidArgument("unknown op: " + cfg.op);
  }
}

/// Runs cfg.reps repetitions on one worker; returns the per-rep stage lists.
std::vector<std::vector<StageTiming>> run_reps(comm::WorkerContext& ctx,
                                               const BenchConfig& cfg) {
  std::vector<std::vector<StageTiming>> reps;
  for (int rep = 0; rep < cfg.reps; rep++) {
    comm::barrier(ctx);
    ctx.reset_byte_counters();
    VectorSink sink;
    execute_op(ctx, cfg, &sink);
    reps.push_back(sink.take());
  }
  return reps;
}

/// Median-over-reps per stage (first rep discarded as warm-up when reps>1),
/// asserting the stage name sequence is identical across reps.
std::vector<StageTiming> fold_reps(const std::vector<std::vector<StageTiming>>& reps) {
  const size_t skip = reps.size() > 1 ? 1 : 0;
  const auto& names = reps.back();
  std::vector<StageTiming> out;
  for (size_t s = 0; s < names.size(); s++) {
    std::vector<double> walls, cpus;
    for (size_t r = skip; r < reps.size(); r++) {
      if (reps[r].size() != names.size() || reps[r][s].name != names[s].name) {
        throw Error("stage sequence changed across repetitions");
      }
      walls.push_back(reps[r][s].wall_s);
      cpus.push_back(reps[r][s].cpu_s);
    }
    std::sort(walls.begin(), walls.end());
    std::sort(cpus.begin(), cpus.end());
    StageTiming st;
    st.name = names[s].name;
    st.wall_s = walls[walls.size() / 2];
    st.cpu_s = cpus[cpus.size() / 2];
    st.bytes = reps.back()[s].bytes;
    out.push_back(std::move(st));
  }
  return out;
}

TimingReport aggregate_report(const BenchConfig& cfg,
                              std::vector<std::vector<StageTiming>> per_rank) {
  TimingReport report;
  report.config = cfg;
  report.rank_detail = std::move(per_rank);

  // Stage union across ranks (a rank may skip a stage, e.g. empty halo).
  for (const auto& rank_stages : report.rank_detail) {
    for (const auto& s : rank_stages) {
      bool found = false;
      for (auto& agg : report.stages) {
        if (agg.name != s.name) continue;
        agg.wall_s = std::max(agg.wall_s, s.wall_s);
        agg.cpu_s = std::max(agg.cpu_s, s.cpu_s);
        agg.bytes += s.bytes;
        found = true;
        break;
      }
      if (!found) report.stages.push_back(s);
    }
  }
  for (const auto& rank_stages : report.rank_detail) {
    double total = 0;
    for (const auto& s : rank_stages) total += s.wall_s;
    report.total_wall_s = std::max(report.total_wall_s, total);
  }
  return report;
}

constexpr const char* kEnvCoord = "DDF_COORD";
constexpr const char* kEnvRank = "DDF_RANK";
constexpr const char* kEnvWorld = "DDF_WORLD";
constexpr const char* kEnvJob = "DDF_BENCH_JOB";
constexpr const char* kEnvReport = "DDF_BENCH_REPORT";

TimingReport run_tcp_launcher(const BenchConfig& cfg) {
  // Pick a coordinator port, then fork one worker process per rank.
  uint16_t port = 0;
  int probe = comm::bind_listener("127.0.0.1", port);
  ::close(probe);
  std::string coord = "127.0.0.1:" + std::to_string(port);

  std::string report_path =
      std::filesystem::temp_directory_path() /
      ("ddf-bench-report-" + std::to_string(::getpid()) + ".json");

  std::vector<pid_t> children;
  for (int r = 0; r < cfg.workers; r++) {
    pid_t pid = ::fork();
    if (pid < 0) throw Error("fork failed");
    if (pid == 0) {
      ::setenv(kEnvCoord, coord.c_str(), 1);
      ::setenv(kEnvRank, std::to_string(r).c_str(), 1);
      ::setenv(kEnvWorld, std::to_string(cfg.workers).c_str(), 1);
      ::setenv(kEnvJob, cfg.to_json_string().c_str(), 1);
      ::setenv(kEnvReport, report_path.c_str(), 1);
      ::execl("/proc/self/exe", "ddf-bench", nullptr);
      ::_exit(127);
    }
    children.push_back(pid);
  }

  int failures = 0;
  for (size_t r = 0; r < children.size(); r++) {
    int status = 0;
    ::waitpid(children[r], &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      std::cerr << "worker rank " << r << " exited abnormally\n";
      failures++;
    }
  }
  if (failures) {
    throw Error("tcp benchmark failed: " + std::to_string(failures) +
                " worker(s) died");
  }

  std::ifstream in(report_path);
  if (!in) throw Error("tcp benchmark produced no report file");
  std::stringstream ss;
  ss << in.rdbuf();
  std::filesystem::remove(report_path);
  return TimingReport::from_json_string(ss.str());
}

}  // namespace

std::string BenchConfig::to_json_string() const {
  return config_to_json(*this).dump();
}

BenchConfig BenchConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

std::string TimingReport::to_json_string() const {
  json j{{"config", config_to_json(config)},
         {"stages", stages_to_json(stages)},
         {"total_wall_s", total_wall_s}};
  json detail = json::array();
  for (const auto& rank_stages : rank_detail) {
    detail.push_back(stages_to_json(rank_stages));
  }
  j["rank_detail"] = std::move(detail);
  return j.dump(2);
}

TimingReport TimingReport::from_json_string(const std::string& text) {
  json j = json::parse(text);
  TimingReport report;
  report.config = config_from_json(j.at("config"));
  report.stages = stages_from_json(j.at("stages"));
  report.total_wall_s = j.at("total_wall_s").get<double>();
  for (const auto& arr : j.at("rank_detail")) {
    report.rank_detail.push_back(stages_from_json(arr));
  }
  return report;
}

uint64_t TimingReport::stage_bytes(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return s.bytes;
  }
  return 0;
}

double TimingReport::stage_wall(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return s.wall_s;
  }
  return 0;
}

TimingReport run_benchmark(const BenchConfig& cfg) {
  validate(cfg);
  if (cfg.transport == "tcp" && std::getenv(kEnvRank) == nullptr) {
    return run_tcp_launcher(cfg);
  }
  if (cfg.transport != "local" && cfg.transport != "tcp") {
    throw InvalidArgument("unknown transport: " + cfg.transport);
  }

  std::vector<std::vector<StageTiming>> per_rank(cfg.workers);
  comm::run_local_workers(cfg.workers, [&](comm::WorkerContext& ctx) {
    per_rank[ctx.rank()] = fold_reps(run_reps(ctx, cfg));
  });
  return aggregate_report(cfg, std::move(per_rank));
}

int tcp_worker_main() {
  const char* coord = std::getenv(kEnvCoord);
  const char* rank_s = std::getenv(kEnvRank);
  const char* world_s = std::getenv(kEnvWorld);
  const char* job = std::getenv(kEnvJob);
  const char* report_path = std::getenv(kEnvReport);
  if (!coord || !rank_s || !world_s || !job || !report_path) {
    std::cerr << "tcp worker: missing DDF_* environment\n";
    return 2;
  }
  try {
    BenchConfig cfg = BenchConfig::from_json_string(job);
    comm::SocketOptions options;
    options.coordinator = coord;
    options.rank = std::atoi(rank_s);
    options.world_size = std::atoi(world_s);
    comm::SocketTransport transport(options);
    comm::WorkerContext ctx(transport);

    std::vector<StageTiming> mine = fold_reps(run_reps(ctx, cfg));

    // Rank 0 gathers every worker's stage list and writes the report.
    const uint32_t tag = comm::make_tag(ctx.rank(), 0, comm::kPhaseData);
    if (ctx.rank() == 0) {
      std::vector<std::vector<StageTiming>> per_rank(ctx.world_size());
      per_rank[0] = std::move(mine);
      for (int src = 1; src < ctx.world_size(); src++) {
        auto bytes = ctx.transport().recv(src, comm::make_tag(src, 0,
                                                              comm::kPhaseData));
        per_rank[src] = stages_from_json(
            json::parse(std::string(bytes.begin(), bytes.end())));
      }
      TimingReport report = aggregate_report(cfg, std::move(per_rank));
      std::ofstream out(report_path, std::ios::trunc);
      out << report.to_json_string();
    } else {
      std::string payload = stages_to_json(mine).dump();
      ctx.transport().send(0, tag,
                           std::span<const uint8_t>(
                               reinterpret_cast<const uint8_t*>(payload.data()),
                               payload.size()));
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "tcp worker failed: " << e.what() << "\n";
    return 1;
  }
}

std::vector<TimingReport> scaling_suite(ScalingKind kind, const BenchConfig& base,
                                        const std::vector<int>& workers) {
  std::vector<TimingReport> reports;
  for (int p : workers) {
    BenchConfig cfg = base;
    cfg.workers = p;
    cfg.rows = kind == ScalingKind::Strong ? base.rows : base.rows * p;
    if (p < 1 || cfg.rows < p) {
      std::cerr << "skipping infeasible parallelism " << p << " (rows "
                << cfg.rows << ")\n";
      continue;
    }
    reports.push_back(run_benchmark(cfg));
  }
  return reports;
}

std::pair<cost::PatternKind, cost::LocalOpKind> op_cost_mapping(
    const BenchConfig& cfg) {
  using cost::LocalOpKind;
  using cost::PatternKind;
  if (cfg.op == "join") {
    if (cfg.strategy == "broadcast") {
      return {PatternKind::BroadcastCompute, LocalOpKind::HashJoin};
    }
    return {PatternKind::ShuffleComputeHash, cfg.strategy == "sort"
                                                 ? LocalOpKind::SortJoin
                                                 : LocalOpKind::HashJoin};
  }
  if (cfg.op == "groupby") {
    return {cfg.strategy == "shuffle" ? PatternKind::ShuffleComputeHash
                                      : PatternKind::CombineShuffleReduce,
            LocalOpKind::GroupBy};
  }
  if (cfg.op == "sort") {
    return {cfg.strategy == "range" ? PatternKind::ShuffleComputeRange
                                    : PatternKind::SampleShuffleCompute,
            LocalOpKind::Sort};
  }
  if (cfg.op == "union") {
    return {PatternKind::ShuffleComputeHash, LocalOpKind::Union};
  }
  if (cfg.op == "difference") {
    return {PatternKind::ShuffleComputeHash, LocalOpKind::SetDifference};
  }
  if (cfg.op == "unique") {
    return {PatternKind::CombineShuffleReduce, LocalOpKind::Unique};
  }
  if (cfg.op == "select" || cfg.op == "map") {
    return {PatternKind::EmbarrassinglyParallel, LocalOpKind::SelectionMap};
  }
  if (cfg.op == "project") {
    return {PatternKind::EmbarrassinglyParallel, LocalOpKind::Projection};
  }
  if (cfg.op == "aggregate") {
    return {PatternKind::GloballyReduce, LocalOpKind::ColumnAggregation};
  }
  if (cfg.op == "window") {
    return {PatternKind::HaloExchange, LocalOpKind::RowAggregation};
  }
  throw InvalidArgument("no cost mapping for op: " + cfg.op);
}

cost::CostParams cost_params_for(const BenchConfig& cfg, double alpha, double beta,
                                 double kappa) {
  cost::CostParams params;
  params.alpha = alpha;
  params.beta = beta;
  params.gamma = beta;  // reduction priced as one transfer pass
  params.kappa = kappa;
  params.parallelism = cfg.workers;
  params.total_rows = double(cfg.rows);
  params.columns = 2;
  params.row_bytes = 16;
  params.cardinality = cfg.cardinality;
  params.window_rows = double(cfg.window);
  return params;
}

std::string predict_vs_measured(const TimingReport& measured, double alpha,
                                double beta, double kappa) {
  const BenchConfig& cfg = measured.config;
  auto [pattern, core] = op_cost_mapping(cfg);
  cost::CostParams params = cost_params_for(cfg, alpha, beta, kappa);
  cost::CostBreakdown predicted = cost::pattern_cost(pattern, params, core);

  auto is_comm_stage = [](const std::string& name) {
    return name.rfind("shuffle", 0) == 0 || name.rfind("broadcast", 0) == 0 ||
           name.rfind("allreduce", 0) == 0 || name.rfind("halo", 0) == 0 ||
           name.rfind("sample-pivots", 0) == 0 ||
           name.rfind("schema-agreement", 0) == 0;
  };
  double comm_wall = 0, compute_wall = 0;
  uint64_t measured_bytes = 0;
  for (const auto& s : measured.stages) {
    if (is_comm_stage(s.name)) {
      comm_wall += s.wall_s;
      measured_bytes += s.bytes;
    } else {
      compute_wall += s.wall_s;
    }
  }

  // Model terms are per worker; measured bytes sum over ranks.
  double predicted_bytes_total = predicted.predicted_bytes * cfg.workers;
  double predicted_comm = predicted.startup + predicted.transfer + predicted.reduce;

  json j{
      {"config", json::parse(cfg.to_json_string())},
      {"pattern", cost::to_string(pattern)},
      {"core", cost::to_string(core)},
      {"calibration", {{"alpha", alpha}, {"beta", beta}, {"kappa", kappa}}},
      {"predicted",
       {{"startup_s", predicted.startup},
        {"transfer_s", predicted.transfer},
        {"reduce_s", predicted.reduce},
        {"compute_s", predicted.compute},
        {"total_s", predicted.total()},
        {"bytes_per_worker", predicted.predicted_bytes},
        {"bytes_total", predicted_bytes_total}}},
      {"measured",
       {{"comm_wall_s", comm_wall},
        {"compute_wall_s", compute_wall},
        {"total_wall_s", measured.total_wall_s},
        {"bytes_total", measured_bytes}}},
  };
  if (predicted_comm > 0 && comm_wall > 0) {
    j["ratio"]["comm"] = comm_wall / predicted_comm;
  }
  if (predicted.compute > 0 && compute_wall > 0) {
    j["ratio"]["compute"] = compute_wall / predicted.compute;
  }
  if (predicted_bytes_total > 0) {
    j["ratio"]["bytes"] = double(measured_bytes) / predicted_bytes_total;
  }
  return j.dump(2);
}

}  // namespace ddf::bench
