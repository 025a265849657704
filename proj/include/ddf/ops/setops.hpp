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

/// Set semantics over whole rows (nulls compare equal to nulls). Both inputs
/// are shuffled by full-row hash so equal rows colocate, then resolved with
/// local hash-based set operations.

/// Distinct rows of a ∪ b.
Table union_distinct(comm::WorkerContext& ctx, const Table& a, const Table& b,
                     StageSink* sink = nullptr);

/// Distinct rows of a that do not appear in b.
Table difference(comm::WorkerContext& ctx, const Table& a, const Table& b,
                 StageSink* sink = nullptr);

/// One row per distinct key tuple, keeping the first occurrence in global
/// rank-major order. Combine-shuffle-reduce: local distinct, shuffle the
/// survivors by key hash, final local distinct.
Table unique(comm::WorkerContext& ctx, const Table& t, std::span<const int> keys,
             StageSink* sink = nullptr);

namespace detail {

/// Row indices of the first occurrence of each distinct key tuple, in order.
std::vector<int64_t> distinct_indices(const Table& t, std::span<const int> keys);

}  // namespace detail

}  // namespace ddf
