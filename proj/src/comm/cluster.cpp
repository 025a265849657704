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

#include "ddf/comm/cluster.hpp"

#include <thread>
#include <vector>

#include "ddf/comm/local_transport.hpp"
#include "ddf/comm/socket_transport.hpp"

namespace ddf::comm {

namespace {

void join_and_rethrow(std::vector<std::thread>& threads,
                      std::vector<std::exception_ptr>& errors) {
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void run_local_workers(int world_size, const WorkerFn& fn) {
  if (world_size < 1) throw InvalidArgument("world size must be >= 1");
  LocalFabric fabric(world_size);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(world_size);
  threads.reserve(world_size);
  for (int r = 0; r < world_size; r++) {
    threads.emplace_back([&, r] {
      try {
        LocalTransport transport(&fabric, r);
        WorkerContext ctx(transport);
        fn(ctx);
      } catch (...) {
        errors[r] = std::current_exception();
        fabric.abort("worker " + std::to_string(r) + " failed");
      }
    });
  }
  join_and_rethrow(threads, errors);
}

void run_socket_workers(int world_size, const WorkerFn& fn,
                        std::chrono::milliseconds timeout) {
  if (world_size < 1) throw InvalidArgument("world size must be >= 1");
  uint16_t port = 0;
  int listener = bind_listener("127.0.0.1", port);
  std::string coordinator = "127.0.0.1:" + std::to_string(port);

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(world_size);
  threads.reserve(world_size);
  for (int r = 0; r < world_size; r++) {
    threads.emplace_back([&, r] {
      try {
        SocketOptions options;
        options.coordinator = coordinator;
        options.rank = r;
        options.world_size = world_size;
        options.timeout = timeout;
        if (r == 0) options.listen_fd = listener;
        SocketTransport transport(options);
        WorkerContext ctx(transport);
        fn(ctx);
      } catch (...) {
        // The transport's destructor has closed this worker's sockets, which
        // unblocks any peer waiting on it.
        errors[r] = std::current_exception();
      }
    });
  }
  join_and_rethrow(threads, errors);
}

}  // namespace ddf::comm
