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

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddf/bench/calibrate.hpp"
#include "ddf/bench/runner.hpp"
#include "ddf/costmodel.hpp"

namespace {

using ddf::bench::BenchConfig;
using ddf::bench::TimingReport;

void emit(const std::string& text, const std::string& json_out) {
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::trunc);
    if (!out) throw ddf::IoError("cannot write " + json_out);
    out << text << "\n";
  }
  std::cout << text << "\n";
}

void print_summary(const TimingReport& report) {
  std::cerr << "op=" << report.config.op << " rows=" << report.config.rows
            << " workers=" << report.config.workers
            << " transport=" << report.config.transport << "\n";
  for (const auto& s : report.stages) {
    std::cerr << "  " << s.name << ": " << s.wall_s * 1e3 << " ms, " << s.bytes
              << " B\n";
  }
  std::cerr << "  total: " << report.total_wall_s * 1e3 << " ms\n";
}

void add_config_options(CLI::App* cmd, BenchConfig& cfg, bool with_workers) {
  cmd->add_option("--op", cfg.op,
                  "join|groupby|sort|union|difference|unique|select|project|"
                  "map|aggregate|window|csv");
  cmd->add_option("--rows", cfg.rows, "total rows");
  if (with_workers) cmd->add_option("--workers", cfg.workers, "parallelism P");
  cmd->add_option("--cardinality", cfg.cardinality, "distinct-key ratio (0,1]");
  cmd->add_option("--transport", cfg.transport, "local|tcp");
  cmd->add_option("--seed", cfg.seed, "data generator seed");
  cmd->add_option("--strategy", cfg.strategy,
                  "algorithm selector (join: hash|sort|broadcast; groupby: "
                  "combine|shuffle; sort: sample|range)");
  cmd->add_option("--reps", cfg.reps, "repetitions (first is warm-up)");
  cmd->add_option("--window", cfg.window, "rolling window width (op=window)");
  cmd->add_option("--bins", cfg.bins, "histogram bins for range sort");
  cmd->add_option("--sample-size", cfg.sample_size,
                  "per-rank samples for sample sort (0 = world size)");
  cmd->add_option("--json", cfg.json_out, "write the JSON report here");
}

}  // namespace

int main(int argc, char** argv) {
  // Spawned TCP workers re-enter this binary with DDF_* set.
  if (std::getenv("DDF_RANK") != nullptr &&
      std::getenv("DDF_BENCH_JOB") != nullptr) {
    return ddf::bench::tcp_worker_main();
  }

  CLI::App app{"distributed dataframe benchmark harness"};
  app.require_subcommand(1);

  BenchConfig cfg;
  std::string workers_list = "1,2,4,8";
  std::string scaling_kind = "weak";
  double alpha = 1e-6, beta = 1e-9, kappa = 1e-8;
  bool compare = false;
  std::string calib_transport = "local";

  CLI::App* run = app.add_subcommand("run", "run one operator benchmark");
  add_config_options(run, cfg, /*with_workers=*/true);
  run->add_option("--alpha", alpha, "calibrated alpha for --compare");
  run->add_option("--beta", beta, "calibrated beta for --compare");
  run->add_option("--kappa", kappa, "calibrated kappa for --compare");
  run->add_flag("--compare", compare, "attach predicted-vs-measured analysis");

  CLI::App* scaling = app.add_subcommand("scaling", "strong/weak scaling suite");
  add_config_options(scaling, cfg, /*with_workers=*/false);
  scaling->add_option("--kind", scaling_kind, "strong|weak");
  scaling->add_option("--workers,--workers-list", workers_list,
                      "comma-separated parallelism list");

  CLI::App* predict = app.add_subcommand("predict", "evaluate the cost model");
  add_config_options(predict, cfg, /*with_workers=*/true);
  predict->add_option("--alpha", alpha, "latency, seconds per message");
  predict->add_option("--beta", beta, "transfer, seconds per byte");
  predict->add_option("--kappa", kappa, "compute, seconds per row-unit");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "fit alpha/beta/kappa on this host");
  calibrate->add_option("--transport", calib_transport, "local|tcp");
  calibrate->add_option("--json", cfg.json_out, "write the JSON result here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      TimingReport report = ddf::bench::run_benchmark(cfg);
      print_summary(report);
      nlohmann::json j = nlohmann::json::parse(report.to_json_string());
      if (compare) {
        j["prediction"] = nlohmann::json::parse(
            ddf::bench::predict_vs_measured(report, alpha, beta, kappa));
      }
      emit(j.dump(2), cfg.json_out);
    } else if (scaling->parsed()) {
      std::vector<int> workers;
      std::stringstream ss(workers_list);
      for (std::string tok; std::getline(ss, tok, ',');) {
        workers.push_back(std::stoi(tok));
      }
      auto kind = scaling_kind == "strong" ? ddf::bench::ScalingKind::Strong
                                           : ddf::bench::ScalingKind::Weak;
      auto reports = ddf::bench::scaling_suite(kind, cfg, workers);
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) {
        print_summary(r);
        arr.push_back(nlohmann::json::parse(r.to_json_string()));
      }
      emit(arr.dump(2), cfg.json_out);
    } else if (predict->parsed()) {
      auto [pattern, core] = ddf::bench::op_cost_mapping(cfg);
      ddf::cost::CostParams params =
          ddf::bench::cost_params_for(cfg, alpha, beta, kappa);
      ddf::cost::CostBreakdown b = ddf::cost::pattern_cost(pattern, params, core);
      nlohmann::json j{
          {"op", cfg.op},
          {"pattern", ddf::cost::to_string(pattern)},
          {"core", ddf::cost::to_string(core)},
          {"params",
           {{"alpha", alpha},
            {"beta", beta},
            {"kappa", kappa},
            {"workers", cfg.workers},
            {"rows", cfg.rows},
            {"cardinality", cfg.cardinality}}},
          {"breakdown",
           {{"startup_s", b.startup},
            {"transfer_s", b.transfer},
            {"reduce_s", b.reduce},
            {"compute_s", b.compute},
            {"total_s", b.total()},
            {"bytes_per_worker", b.predicted_bytes}}}};
      if (cfg.op == "groupby") {
        j["crossover_cardinality"] = ddf::cost::crossover_cardinality(
            ddf::bench::cost_params_for(cfg, alpha, beta, kappa),
            ddf::cost::LocalOpKind::GroupBy);
      }
      emit(j.dump(2), cfg.json_out);
    } else if (calibrate->parsed()) {
      ddf::bench::CalibrationResult r = ddf::bench::calibrate(calib_transport);
      nlohmann::json j{{"alpha", r.alpha},
                       {"beta", r.beta},
                       {"kappa", r.kappa},
                       {"fit_residual", r.fit_residual},
                       {"transport", calib_transport}};
      emit(j.dump(2), cfg.json_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
