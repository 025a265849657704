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

#include <array>
#include <cstdint>

#include "ddf/comm/transport.hpp"
#include "ddf/comm/types.hpp"

namespace ddf::comm {

/// One worker's identity (rank, world size) plus its transport endpoint.
/// Used by exactly one logical thread of control at a time; collectives are
/// blocking to the caller.
///
/// Byte counters record remote payload bytes sent per collective kind,
/// excluding framing and metadata. Self-addressed transfers cost nothing.
class WorkerContext {
 public:
  explicit WorkerContext(Transport& transport) : transport_(transport) {
    bytes_sent_.fill(0);
  }

  int rank() const { return transport_.rank(); }
  int world_size() const { return transport_.world_size(); }
  Transport& transport() { return transport_; }

  void count_bytes(CollectiveKind kind, uint64_t payload_bytes) {
    bytes_sent_[static_cast<size_t>(kind)] += payload_bytes;
  }
  uint64_t bytes_sent(CollectiveKind kind) const {
    return bytes_sent_[static_cast<size_t>(kind)];
  }
  uint64_t total_bytes_sent() const {
    uint64_t total = 0;
    for (uint64_t b : bytes_sent_) total += b;
    return total;
  }
  void reset_byte_counters() { bytes_sent_.fill(0); }

 private:
  Transport& transport_;
  std::array<uint64_t, kNumCollectiveKinds> bytes_sent_;
};

}  // namespace ddf::comm
