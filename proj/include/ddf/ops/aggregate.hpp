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

/// Globally-reduce pattern: local fold, allreduce, finalize. Returns one
/// replicated scalar row, byte-identical on every rank. Aggregated columns
/// must be numeric. Sum of an empty global column is 0, Min/Max are null,
/// Mean throws (zero count).
Table column_aggregate(comm::WorkerContext& ctx, const Table& t,
                       const AggSpec& aggs, StageSink* sink = nullptr);

}  // namespace ddf
