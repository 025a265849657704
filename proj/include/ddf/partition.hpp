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
#include "ddf/table.hpp"

namespace ddf {

/// Per-row destination ranks; length equals the table's row count and every
/// value lies in [0, world).
struct PartitionAssignment {
  std::vector<int> dest;
  int world = 1;
};

/// Ascending pivot values (world-1 of them) over the key domain. Row r goes
/// to the smallest rank whose pivot is >= the key; ties go to the lower
/// rank, so assignment is monotone non-decreasing in the key.
struct RangeBounds {
  std::vector<Scalar> pivots;
  Scalar min;
  Scalar max;
};

/// Streaming 64-bit key hash: FNV-1a accumulation over the serialized
/// key-tuple bytes with a final avalanche mix. Nulls hash as a distinct
/// sentinel byte, so null keys form their own class. Fixed constants keep
/// assignments identical across runs and platforms.
uint64_t hash_row(const Table& t, std::span<const int> key_cols, int64_t row);

/// Assignment = hash(key tuple) mod world; equal key tuples always map to
/// equal ranks (the colocation guarantee keyed operators rely on).
PartitionAssignment hash_partition(const Table& t, std::span<const int> key_cols,
                                   int world);

/// Computes balanced range pivots for a numeric key column from a global
/// histogram: allreduce of min/max, allreduce of bin counts, then pivots at
/// the histogram quantiles. Identical bounds on all ranks. Collective.
/// Throws when the key column is all-null across every rank.
RangeBounds range_partition_bounds(comm::WorkerContext& ctx, const Column& key,
                                   int world, int bins = 256);

/// Row -> smallest rank r with key <= pivots[r] (last rank when above all
/// pivots); nulls go to rank 0.
PartitionAssignment assign_by_range(const Column& key, const RangeBounds& bounds,
                                    int world);

/// Sample-sort pivot selection with regular sampling: every ceil(n/size)-th
/// key of the locally sorted column is gathered at rank 0, rank 0 sorts the
/// samples and picks world-1 pivots at regular positions, and the pivots are
/// broadcast. All ranks return identical bounds. Collective.
RangeBounds sample_pivots(comm::WorkerContext& ctx, const Column& sorted_key,
                          int sample_size);

/// Part r holds exactly the rows assigned to r, original relative order
/// preserved.
std::vector<Table> split(const Table& t, const PartitionAssignment& assignment);

/// Evens out partition sizes to floor(N/P) or ceil(N/P) rows per rank while
/// preserving global rank-major row order. Already balanced data moves no
/// bytes. Collective.
Table rebalance(comm::WorkerContext& ctx, const Table& t);

}  // namespace ddf
