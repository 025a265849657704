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

#include "ddf/bench/calibrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ddf/bench/datagen.hpp"
#include "ddf/comm/cluster.hpp"
#include "ddf/comm/transport.hpp"
#include "ddf/table.hpp"

namespace ddf::bench {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::vector<int64_t> sweep_sizes() {
  std::vector<int64_t> sizes;
  for (int64_t s = 1; s <= (4 << 20); s *= 4) sizes.push_back(s);
  return sizes;
}

}  // namespace

HockneyFit fit_hockney(std::span<const double> bytes,
                       std::span<const double> seconds) {
  if (bytes.size() != seconds.size() || bytes.size() < 2) {
    throw InvalidArgument("fit_hockney: need at least two samples");
  }
  const double n = double(bytes.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < bytes.size(); i++) {
    mx += bytes[i];
    my += seconds[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < bytes.size(); i++) {
    sxx += (bytes[i] - mx) * (bytes[i] - mx);
    sxy += (bytes[i] - mx) * (seconds[i] - my);
  }
  if (sxx == 0) throw InvalidArgument("fit_hockney: degenerate size sweep");

  HockneyFit fit;
  fit.beta = std::max(0.0, sxy / sxx);
  fit.alpha = std::max(0.0, my - fit.beta * mx);
  double ss = 0;
  for (size_t i = 0; i < bytes.size(); i++) {
    double r = seconds[i] - fit.alpha - fit.beta * bytes[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

HockneyFit calibrate_from_measure(const PingMeasure& measure) {
  std::vector<double> xs, ys;
  for (int64_t size : sweep_sizes()) {
    xs.push_back(double(size));
    ys.push_back(measure(size));
  }
  return fit_hockney(xs, ys);
}

double calibrate_kappa(int64_t rows) {
  Table t = generate_table(rows, two_int64_schema(), 1.0, 7);
  std::vector<double> samples;
  const int key_cols[1] = {0};
  for (int rep = 0; rep < 5; rep++) {
    auto start = std::chrono::steady_clock::now();
    Table sorted = take_rows(t, sort_permutation(t, key_cols));
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    if (sorted.num_rows() != rows) throw Error("sort dropped rows");
    samples.push_back(dt);
  }
  double unit = double(rows) * std::log2(double(rows));
  return median(samples) / unit;
}

CalibrationResult calibrate(const std::string& transport) {
  constexpr int kReps = 9;
  CalibrationResult result;

  auto worker = [&](comm::WorkerContext& ctx) {
    auto& tp = ctx.transport();
    const uint32_t tag = comm::make_tag(ctx.rank() == 0 ? 0 : 1, 0,
                                        comm::kPhaseData);
    if (ctx.rank() == 0) {
      std::vector<double> xs, ys;
      for (int64_t size : sweep_sizes()) {
        std::vector<uint8_t> payload(size, 0xab);
        std::vector<double> samples;
        for (int rep = 0; rep < kReps; rep++) {
          auto start = std::chrono::steady_clock::now();
          tp.send(1, comm::make_tag(0, 0, comm::kPhaseData), payload);
          auto echoed = tp.recv(1, comm::make_tag(1, 0, comm::kPhaseData));
          double rtt = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
          if (echoed.size() != payload.size()) {
            throw Error("calibration echo size mismatch");
          }
          samples.push_back(rtt / 2.0);
        }
        xs.push_back(double(size));
        ys.push_back(median(samples));
      }
      HockneyFit fit = fit_hockney(xs, ys);
      result.alpha = fit.alpha;
      result.beta = fit.beta;
      result.fit_residual = fit.residual;
    } else {
      for (size_t i = 0; i < sweep_sizes().size(); i++) {
        for (int rep = 0; rep < kReps; rep++) {
          auto payload = tp.recv(0, comm::make_tag(0, 0, comm::kPhaseData));
          tp.send(0, comm::make_tag(1, 0, comm::kPhaseData), payload);
        }
      }
    }
    (void)tag;
  };

  if (transport == "local") {
    comm::run_local_workers(2, worker);
  } else if (transport == "tcp") {
    comm::run_socket_workers(2, worker);
  } else {
    throw InvalidArgument("calibrate: unknown transport: " + transport);
  }
  result.kappa = calibrate_kappa();
  return result;
}

}  // namespace ddf::bench
