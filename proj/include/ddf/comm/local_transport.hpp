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

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>

#include "ddf/comm/transport.hpp"

namespace ddf::comm {

/// In-process fabric connecting P workers running as threads. Workers hold
/// fully isolated state; the per-pair message queues here are the only thing
/// that crosses between them, and only serialized bytes travel through.
class LocalFabric {
 public:
  explicit LocalFabric(int world_size);

  int world_size() const { return world_size_; }

  void push(int src, int dst, uint32_t tag, std::span<const uint8_t> payload);
  std::vector<uint8_t> pop(int src, int dst, uint32_t expected_tag);

  /// Wakes every blocked pop with a TransportError; used when a worker dies
  /// so its peers do not wait forever.
  void abort(const std::string& reason);

 private:
  struct Frame {
    uint32_t tag;
    std::vector<uint8_t> payload;
  };
  struct Queue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<Frame> frames;
  };

  int world_size_;
  std::vector<std::unique_ptr<Queue>> owned_;  // row-major [src][dst]
  std::mutex abort_mutex_;
  bool aborted_ = false;
  std::string abort_reason_;
};

class LocalTransport final : public Transport {
 public:
  LocalTransport(LocalFabric* fabric, int rank)
      : fabric_(fabric), rank_(rank) {}

  int rank() const override { return rank_; }
  int world_size() const override { return fabric_->world_size(); }

  void send(int dst, uint32_t tag, std::span<const uint8_t> payload) override {
    fabric_->push(rank_, dst, tag, payload);
  }

  std::vector<uint8_t> recv(int src, uint32_t expected_tag) override {
    return fabric_->pop(src, rank_, expected_tag);
  }

 private:
  LocalFabric* fabric_;
  int rank_;
};

}  // namespace ddf::comm
