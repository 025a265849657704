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

/// Partitioned input: files are dealt round-robin (rank r reads files r,
/// r+P, ...), headers must agree across a rank's files, and the schema
/// inferred by the lowest file-holding rank is broadcast so workers without
/// files return an empty table with the agreed schema. Collective.
Table read_csv_partitioned(comm::WorkerContext& ctx,
                           const std::vector<std::string>& paths,
                           StageSink* sink = nullptr);

/// Partitioned input with an explicit rank -> files mapping.
Table read_csv_partitioned(comm::WorkerContext& ctx,
                           const std::vector<std::vector<std::string>>& per_rank,
                           StageSink* sink = nullptr);

/// Partitioned output: each rank writes its partition to
/// out_dir/part-{rank:05}.csv. Returns this rank's path. Collective (all
/// files exist when the call returns anywhere).
std::string write_csv_partitioned(comm::WorkerContext& ctx, const Table& t,
                                  const std::string& out_dir,
                                  StageSink* sink = nullptr);

}  // namespace ddf
