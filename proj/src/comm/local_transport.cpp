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

#include "ddf/comm/local_transport.hpp"

namespace ddf::comm {

LocalFabric::LocalFabric(int world_size) : world_size_(world_size) {
  if (world_size < 1) throw InvalidArgument("world size must be >= 1");
  owned_.reserve(size_t(world_size) * world_size);
  for (int i = 0; i < world_size * world_size; i++) {
    owned_.push_back(std::make_unique<Queue>());
  }
}

void LocalFabric::push(int src, int dst, uint32_t tag,
                       std::span<const uint8_t> payload) {
  Queue& q = *owned_[size_t(src) * world_size_ + dst];
  {
    std::lock_guard<std::mutex> lock(q.mutex);
    q.frames.push_back({tag, {payload.begin(), payload.end()}});
  }
  q.ready.notify_one();
}

std::vector<uint8_t> LocalFabric::pop(int src, int dst, uint32_t expected_tag) {
  Queue& q = *owned_[size_t(src) * world_size_ + dst];
  std::unique_lock<std::mutex> lock(q.mutex);
  q.ready.wait(lock, [&] {
    if (!q.frames.empty()) return true;
    std::lock_guard<std::mutex> alock(abort_mutex_);
    return aborted_;
  });
  if (q.frames.empty()) {
    std::lock_guard<std::mutex> alock(abort_mutex_);
    throw TransportError("local fabric aborted: " + abort_reason_);
  }
  Frame f = std::move(q.frames.front());
  q.frames.pop_front();
  if (f.tag != expected_tag) {
    throw TransportError("protocol error: rank " + std::to_string(dst) +
                         " expected tag " + std::to_string(expected_tag) +
                         " from rank " + std::to_string(src) + ", got " +
                         std::to_string(f.tag));
  }
  return std::move(f.payload);
}

void LocalFabric::abort(const std::string& reason) {
  {
    std::lock_guard<std::mutex> alock(abort_mutex_);
    if (aborted_) return;
    aborted_ = true;
    abort_reason_ = reason;
  }
  for (auto& q : owned_) {
    std::lock_guard<std::mutex> lock(q->mutex);
    q->ready.notify_all();
  }
}

}  // namespace ddf::comm
