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
#include "ddf/ops/agg.hpp"
#include "ddf/ops/stage.hpp"

namespace ddf {

enum class GroupByStrategy {
  /// Shuffle raw rows by key, then aggregate locally.
  ShuffleCompute,
  /// Pre-aggregate locally, shuffle the intermediate results, then reduce.
  /// Shuffled payload shrinks with the data's cardinality.
  CombineShuffleReduce,
};

const char* to_string(GroupByStrategy s);

/// One output row per distinct global key tuple (null keys form their own
/// group), columns = keys then one column per aggregate. Both strategies
/// produce the same result; for Float64 sums/means they agree to rounding
/// (different summation order), integer aggregates agree exactly.
Table groupby(comm::WorkerContext& ctx, const Table& t, std::span<const int> keys,
              const AggSpec& aggs, GroupByStrategy strategy,
              StageSink* sink = nullptr);

namespace detail {

/// Serial groupby over one table; group order is first-occurrence order.
Table local_groupby(const Table& t, std::span<const int> keys, const AggSpec& aggs);

}  // namespace detail

}  // namespace ddf
