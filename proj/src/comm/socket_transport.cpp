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

#include "ddf/comm/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "ddf/bytes.hpp"

namespace ddf::comm {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

void set_socket_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = timeout.count() / 1000;
  tv.tv_usec = (timeout.count() % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void write_exact(int fd, const uint8_t* data, size_t len, const char* what) {
  size_t done = 0;
  while (done < len) {
    ssize_t n = ::send(fd, data + done, len - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw TransportError(std::string("send timeout during ") + what);
      }
      throw_errno(std::string("send failed during ") + what);
    }
    done += size_t(n);
  }
}

void read_exact(int fd, uint8_t* data, size_t len, const char* what) {
  size_t done = 0;
  while (done < len) {
    ssize_t n = ::recv(fd, data + done, len - done, 0);
    if (n == 0) {
      throw TransportError(std::string("peer disconnected during ") + what);
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw TransportError(std::string("recv timeout during ") + what);
      }
      throw_errno(std::string("recv failed during ") + what);
    }
    done += size_t(n);
  }
}

int dial(const std::string& host, uint16_t port, std::chrono::milliseconds timeout) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw InvalidArgument("bad IPv4 address: " + host);
  }
  // The peer's listener may come up slightly after ours; retry until the
  // overall timeout elapses.
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
      set_nodelay(fd);
      set_socket_timeout(fd, timeout);
      return fd;
    }
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) {
      throw TransportError("connect to " + host + ":" + std::to_string(port) +
                           " timed out during rendezvous");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

struct Hello {
  uint32_t rank;
  uint16_t port;
};

void send_hello(int fd, Hello h) {
  std::vector<uint8_t> buf;
  put_u32(buf, h.rank);
  put_u16(buf, h.port);
  write_exact(fd, buf.data(), buf.size(), "rendezvous hello");
}

Hello recv_hello(int fd) {
  uint8_t buf[6];
  read_exact(fd, buf, sizeof(buf), "rendezvous hello");
  return {load_u32(buf), load_u16(buf + 4)};
}

}  // namespace

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
  auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon + 1 >= endpoint.size()) {
    throw InvalidArgument("endpoint must be host:port, got: " + endpoint);
  }
  int port = std::stoi(endpoint.substr(colon + 1));
  if (port < 0 || port > 0xFFFF) {
    throw InvalidArgument("port out of range in endpoint: " + endpoint);
  }
  return {endpoint.substr(0, colon), static_cast<uint16_t>(port)};
}

int bind_listener(const std::string& host, uint16_t& port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw InvalidArgument("bad IPv4 address: " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw_errno("bind " + host + ":" + std::to_string(port));
  }
  if (::listen(fd, 128) != 0) {
    ::close(fd);
    throw_errno("listen");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port = ntohs(bound.sin_port);
  return fd;
}

SocketTransport::SocketTransport(const SocketOptions& options)
    : rank_(options.rank),
      world_(options.world_size),
      timeout_(options.timeout),
      peer_fd_(options.world_size, -1) {
  if (rank_ < 0 || rank_ >= world_) {
    throw InvalidArgument("rank out of range");
  }
  if (world_ > 1) {
    rendezvous(options);
  } else if (options.listen_fd >= 0) {
    ::close(options.listen_fd);  // single-rank world never rendezvouses
  }
}

SocketTransport::~SocketTransport() {
  for (int fd : peer_fd_) {
    if (fd >= 0) ::close(fd);
  }
}

void SocketTransport::rendezvous(const SocketOptions& options) {
  auto [coord_host, coord_port] = parse_endpoint(options.coordinator);

  if (rank_ == 0) {
    int listener = options.listen_fd;
    if (listener < 0) listener = bind_listener(coord_host, coord_port);

    // Collect one hello per peer; the control connection doubles as the
    // mesh link for the (0, i) pair.
    std::vector<uint16_t> ports(world_, 0);
    std::vector<std::string> hosts(world_, coord_host);
    for (int i = 1; i < world_; i++) {
      sockaddr_in peer{};
      socklen_t len = sizeof(peer);
      int fd = ::accept(listener, reinterpret_cast<sockaddr*>(&peer), &len);
      if (fd < 0) throw_errno("accept during rendezvous");
      set_nodelay(fd);
      set_socket_timeout(fd, timeout_);
      Hello h = recv_hello(fd);
      if (h.rank == 0 || h.rank >= uint32_t(world_) || peer_fd_[h.rank] != -1) {
        ::close(fd);
        throw TransportError("rendezvous: bad or duplicate hello rank " +
                             std::to_string(h.rank));
      }
      char ip[INET_ADDRSTRLEN] = {0};
      inet_ntop(AF_INET, &peer.sin_addr, ip, sizeof(ip));
      hosts[h.rank] = ip;
      ports[h.rank] = h.port;
      peer_fd_[h.rank] = fd;
    }
    ::close(listener);

    // Publish the address book.
    std::vector<uint8_t> book;
    for (int r = 1; r < world_; r++) {
      put_u32(book, uint32_t(hosts[r].size()));
      book.insert(book.end(), hosts[r].begin(), hosts[r].end());
      put_u16(book, ports[r]);
    }
    for (int r = 1; r < world_; r++) {
      write_exact(peer_fd_[r], book.data(), book.size(), "address book");
    }
    return;
  }

  // Non-root: advertise own listener, dial the coordinator.
  uint16_t my_port = 0;
  int listener = bind_listener("0.0.0.0", my_port);
  int coord = dial(coord_host, coord_port, timeout_);
  send_hello(coord, {uint32_t(rank_), my_port});
  peer_fd_[0] = coord;

  std::vector<std::string> hosts(world_);
  std::vector<uint16_t> ports(world_, 0);
  {
    // Address book: (host, port) for every non-root rank, in rank order.
    std::vector<uint8_t> entry;
    for (int r = 1; r < world_; r++) {
      uint8_t lenbuf[4];
      read_exact(coord, lenbuf, 4, "address book");
      uint32_t hlen = load_u32(lenbuf);
      if (hlen > 256) throw TransportError("address book entry too long");
      entry.resize(hlen + 2);
      read_exact(coord, entry.data(), entry.size(), "address book");
      hosts[r].assign(entry.begin(), entry.begin() + hlen);
      ports[r] = load_u16(entry.data() + hlen);
    }
  }

  // Mesh completion: dial every lower non-root rank, accept from every
  // higher one.
  for (int r = 1; r < rank_; r++) {
    int fd = dial(hosts[r], ports[r], timeout_);
    send_hello(fd, {uint32_t(rank_), 0});
    peer_fd_[r] = fd;
  }
  for (int r = rank_ + 1; r < world_; r++) {
    int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) throw_errno("accept during mesh completion");
    set_nodelay(fd);
    set_socket_timeout(fd, timeout_);
    Hello h = recv_hello(fd);
    if (h.rank <= uint32_t(rank_) || h.rank >= uint32_t(world_) ||
        peer_fd_[h.rank] != -1) {
      ::close(fd);
      throw TransportError("mesh completion: bad hello rank " +
                           std::to_string(h.rank));
    }
    peer_fd_[h.rank] = fd;
  }
  ::close(listener);
}

void SocketTransport::send(int dst, uint32_t tag,
                           std::span<const uint8_t> payload) {
  if (dst < 0 || dst >= world_ || dst == rank_ || peer_fd_[dst] < 0) {
    throw InvalidArgument("send: bad destination rank " + std::to_string(dst));
  }
  try {
    std::vector<uint8_t> hdr;
    hdr.reserve(12);
    put_u32(hdr, tag);
    put_u64(hdr, payload.size());
    write_exact(peer_fd_[dst], hdr.data(), hdr.size(), "frame header");
    if (!payload.empty()) {
      write_exact(peer_fd_[dst], payload.data(), payload.size(), "frame payload");
    }
  } catch (const TransportError& e) {
    throw TransportError("rank " + std::to_string(rank_) + " sending to rank " +
                         std::to_string(dst) + ": " + e.what());
  }
}

std::vector<uint8_t> SocketTransport::recv(int src, uint32_t expected_tag) {
  if (src < 0 || src >= world_ || src == rank_ || peer_fd_[src] < 0) {
    throw InvalidArgument("recv: bad source rank " + std::to_string(src));
  }
  try {
    uint8_t frame[12];
    read_exact(peer_fd_[src], frame, 12, "frame header");
    uint32_t tag = load_u32(frame);
    uint64_t len = load_u64(frame + 4);
    if (tag != expected_tag) {
      throw TransportError("protocol error: expected tag " +
                           std::to_string(expected_tag) + ", got " +
                           std::to_string(tag));
    }
    std::vector<uint8_t> payload(len);
    if (len > 0) read_exact(peer_fd_[src], payload.data(), len, "frame payload");
    return payload;
  } catch (const TransportError& e) {
    throw TransportError("rank " + std::to_string(rank_) +
                         " receiving from rank " + std::to_string(src) + ": " +
                         e.what());
  }
}

}  // namespace ddf::comm
