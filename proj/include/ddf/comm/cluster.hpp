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
#include <functional>

#include "ddf/comm/worker_context.hpp"

namespace ddf::comm {

using WorkerFn = std::function<void(WorkerContext&)>;

/// Runs `fn` on P workers as threads of this process, each with a fully
/// isolated WorkerContext over the in-process fabric. Blocks until every
/// worker finishes; if a worker throws, the fabric is aborted so peers
/// unblock, and the lowest-rank original exception is rethrown.
void run_local_workers(int world_size, const WorkerFn& fn);

/// As run_local_workers but each worker drives a real TCP mesh over
/// loopback. Exercises the exact wire path the multi-process deployment
/// uses; the bench launcher spawns separate OS processes instead.
void run_socket_workers(int world_size, const WorkerFn& fn,
                        std::chrono::milliseconds timeout =
                            std::chrono::milliseconds(30000));

}  // namespace ddf::comm
