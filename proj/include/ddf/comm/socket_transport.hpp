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
#include <string>

#include "ddf/comm/transport.hpp"

namespace ddf::comm {

struct SocketOptions {
  /// Rendezvous coordinator (rank 0's listen address), "host:port".
  std::string coordinator;
  int rank = 0;
  int world_size = 1;
  /// Per-operation socket timeout; expiry is a TransportError.
  std::chrono::milliseconds timeout{30000};
  /// Pre-bound listening socket for rank 0; -1 to bind `coordinator`.
  int listen_fd = -1;
};

/// TCP transport over a full mesh of loopback/LAN connections. Rank 0
/// listens at the coordinator address; other ranks dial it, advertise their
/// own ephemeral listener, receive the address book, and then higher ranks
/// dial lower ranks to complete the mesh. Frames are `u32 tag | u64 length |
/// payload`, all little-endian.
class SocketTransport final : public Transport {
 public:
  explicit SocketTransport(const SocketOptions& options);
  ~SocketTransport() override;

  SocketTransport(const SocketTransport&) = delete;
  SocketTransport& operator=(const SocketTransport&) = delete;

  int rank() const override { return rank_; }
  int world_size() const override { return world_; }

  void send(int dst, uint32_t tag, std::span<const uint8_t> payload) override;
  std::vector<uint8_t> recv(int src, uint32_t expected_tag) override;

 private:
  void rendezvous(const SocketOptions& options);

  int rank_;
  int world_;
  std::chrono::milliseconds timeout_;
  std::vector<int> peer_fd_;  // per rank, -1 for self
};

/// Parses "host:port"; throws InvalidArgument on malformed input.
std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint);

/// Binds a listening TCP socket. Port 0 picks an ephemeral port; the chosen
/// port is written back through `port`.
int bind_listener(const std::string& host, uint16_t& port);

}  // namespace ddf::comm
