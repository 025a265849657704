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

#include "ddf/comm/collectives.hpp"
#include "ddf/ops/stage.hpp"
#include "ddf/table.hpp"

namespace ddf {

enum class JoinKind { Inner, LeftOuter, RightOuter, FullOuter };

enum class JoinAlgorithm {
  /// Hash-partition both sides on their keys, shuffle, local hash join.
  HashShuffle,
  /// Same shuffle, local sort-merge join.
  SortShuffle,
  /// Replicate the (globally) smaller side, never shuffling the larger one.
  Broadcast,
};

const char* to_string(JoinKind k);
const char* to_string(JoinAlgorithm a);

/// Distributed join on the key columns designated by each side's schema.
/// Key columns must agree in count and dtypes; that is validated before any
/// communication. Null keys join with null keys (nulls form their own key
/// class). The output carries the key columns once (left names), then left
/// non-keys, then right non-keys; a right column whose name collides gets a
/// "_right" suffix.
Table join(comm::WorkerContext& ctx, const Table& left, const Table& right,
           JoinKind kind, JoinAlgorithm algorithm, StageSink* sink = nullptr);

/// Broadcast-compute join: replicates `small` to all ranks and joins locally
/// against the untouched `large` partition, so the large side moves zero
/// bytes. `large` plays the left role. Rows of the replicated side that
/// match nothing anywhere are emitted exactly once (outer kinds).
Table broadcast_join(comm::WorkerContext& ctx, const Table& large,
                     const Table& small, JoinKind kind, StageSink* sink = nullptr);

namespace detail {

/// Serial join used by every distributed algorithm once the data is
/// colocated. sort_merge selects the sort-join path instead of the hash
/// probe.
Table local_join(const Table& left, const Table& right, JoinKind kind,
                 bool sort_merge);

/// Output schema of a join of these two inputs.
Schema join_output_schema(const Table& left, const Table& right);

}  // namespace detail

}  // namespace ddf
