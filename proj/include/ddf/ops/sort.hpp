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

enum class SortStrategy {
  /// Sample sort with regular sampling: local sort, pivots from gathered
  /// samples at rank 0, range split + shuffle, k-way merge of the received
  /// sorted runs. Works for any key dtype.
  SampleSort,
  /// Histogram-based range partition, shuffle, then local sort. Numeric key
  /// columns only.
  HistogramRange,
};

const char* to_string(SortStrategy s);

/// Globally orders the distributed table by one key column: each rank's
/// output is locally sorted and max(rank r) <= min(rank r+1) over the key,
/// with nulls first on rank 0. The global row multiset is preserved; ties
/// may land in any order. `bins` sizes the histogram of the range strategy;
/// `sample_size` is the per-rank regular-sample count of the sample strategy
/// (0 = one sample per rank in the world).
Table sort(comm::WorkerContext& ctx, const Table& t, int key_column,
           SortStrategy strategy, StageSink* sink = nullptr, int bins = 256,
           int sample_size = 0);

namespace detail {

/// Merges locally sorted runs into one sorted table (by key column, nulls
/// first).
Table merge_sorted_runs(const Schema& schema, std::span<const Table> runs,
                        int key_column);

}  // namespace detail

}  // namespace ddf
