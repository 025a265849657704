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

#include <chrono>
#include <ctime>
#include <string>

#include "ddf/comm/worker_context.hpp"

namespace ddf {

/// Receives one record per operator stage: wall time, thread CPU time, and
/// the payload bytes this worker sent during the stage.
class StageSink {
 public:
  virtual ~StageSink() = default;
  virtual void record(const std::string& name, double wall_s, double cpu_s,
                      uint64_t bytes) = 0;
};

/// Scoped stage measurement; records on destruction. A null sink makes the
/// timer free.
class StageTimer {
 public:
  StageTimer(StageSink* sink, comm::WorkerContext* ctx, std::string name)
      : sink_(sink), ctx_(ctx), name_(std::move(name)) {
    if (!sink_) return;
    start_wall_ = std::chrono::steady_clock::now();
    start_cpu_ = thread_cpu_seconds();
    start_bytes_ = ctx_ ? ctx_->total_bytes_sent() : 0;
  }

  ~StageTimer() {
    if (!sink_) return;
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start_wall_)
                      .count();
    uint64_t bytes = (ctx_ ? ctx_->total_bytes_sent() : 0) - start_bytes_;
    sink_->record(name_, wall, thread_cpu_seconds() - start_cpu_, bytes);
  }

  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

  static double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return double(ts.tv_sec) + double(ts.tv_nsec) * 1e-9;
  }

 private:
  StageSink* sink_;
  comm::WorkerContext* ctx_;
  std::string name_;
  std::chrono::steady_clock::time_point start_wall_;
  double start_cpu_ = 0;
  uint64_t start_bytes_ = 0;
};

}  // namespace ddf
