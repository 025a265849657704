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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddf/error.hpp"

namespace ddf::comm {

/// Frame tag carried with every message: sender rank, buffer index (mod 256)
/// and protocol phase. Receivers assert the tag they expect, which turns any
/// out-of-order delivery bug into an immediate protocol error.
constexpr uint32_t make_tag(int sender, int buffer_index, int phase) {
  return (uint32_t(sender) << 16) | (uint32_t(buffer_index & 0xFF) << 8) |
         uint32_t(phase & 0xFF);
}

/// Metadata phase (buffer sizes) precedes the data phase on channels.
constexpr int kPhaseMetadata = 0;
constexpr int kPhaseData = 1;

/// Point-to-point byte transport between ranks of one world. Messages
/// between a fixed (sender, receiver) pair are delivered in send order.
/// A transport instance belongs to exactly one logical thread of control,
/// except that one concurrent sender thread may write while the owner
/// receives (full-duplex use during channel exchanges).
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int world_size() const = 0;

  /// Blocking framed send to dst (dst != rank()).
  virtual void send(int dst, uint32_t tag, std::span<const uint8_t> payload) = 0;

  /// Blocking framed receive from src (src != rank()). Throws TransportError
  /// if the frame's tag differs from expected_tag.
  virtual std::vector<uint8_t> recv(int src, uint32_t expected_tag) = 0;
};

}  // namespace ddf::comm
