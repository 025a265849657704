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

namespace ddf::comm {

/// Communication routines the engine distinguishes for byte accounting and
/// cost modeling.
enum class CollectiveKind : uint8_t {
  SendRecv = 0,
  Shuffle,
  Scatter,
  Gather,
  AllGather,
  Broadcast,
  Reduce,
  AllReduce,
  Barrier,
};

constexpr int kNumCollectiveKinds = 9;

const char* to_string(CollectiveKind k);

/// Elementwise reduction operators; all associative and commutative over the
/// carried numeric type. Count combines by addition: callers supply local
/// counts.
enum class ReduceOp : uint8_t { Sum = 0, Min, Max, Count };

const char* to_string(ReduceOp op);

}  // namespace ddf::comm
