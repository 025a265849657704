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

#include <optional>

#include "ddf/comm/worker_context.hpp"
#include "ddf/serialize.hpp"
#include "ddf/table.hpp"

namespace ddf::comm {

/// Buffers one rank sends to one destination during a channel exchange; the
/// outer position is the destination rank and the inner position the buffer
/// index, which together with the byte size form each request's metadata.
using BufferList = std::vector<std::vector<uint8_t>>;

/// All-to-all buffer exchange over channels, called collectively by every
/// rank in the same superstep. Two phases per destination: buffer sizes
/// first (so receivers allocate exactly), then data. Progression is driven
/// by a background sender while the caller drains sources in rank order, so
/// the call blocks until the full exchange completes. Every buffer sent to
/// rank r arrives at r in sender-buffer-index order; self-addressed buffers
/// never touch the network.
///
/// Returns received[src] = buffers sent by src, for src in [0, P).
std::vector<BufferList> channel_exchange(WorkerContext& ctx, CollectiveKind kind,
                                         const std::vector<BufferList>& outgoing);

/// All-to-all exchange of pre-split tables: parts[dst] travels to dst.
/// Returns received[src] = the sub-table src assigned here, for every src.
/// Accounted under `kind`; shuffle_table and the operator pipelines build on
/// this.
std::vector<Table> exchange_tables(WorkerContext& ctx, CollectiveKind kind,
                                   const std::vector<Table>& parts);

/// Redistributes rows so row i lands on rank dest[i]. The result is the
/// concatenation of sub-tables received from ranks 0..P-1 in rank order.
Table shuffle_table(WorkerContext& ctx, const Table& t, std::span<const int> dest);

/// As shuffle_table but keeps the per-sender sub-tables separate (the merge
/// step of a distributed sort consumes them as sorted runs).
std::vector<Table> shuffle_table_parts(WorkerContext& ctx, const Table& t,
                                       std::span<const int> dest);

/// Root receives the rank-order concatenation; non-roots receive nothing.
std::optional<Table> gather_table(WorkerContext& ctx, const Table& t, int root);

/// Every rank receives the rank-order concatenation; outputs are identical
/// on all ranks. Schemas must match across ranks.
Table allgather_table(WorkerContext& ctx, const Table& t);

/// Binomial-tree dissemination from root in broadcast_rounds(P) rounds; only
/// root's input is read.
Table broadcast_table(WorkerContext& ctx, const Table& t, int root);

/// Number of dissemination rounds the binomial tree uses: ceil(log2(P)).
int broadcast_rounds(int world_size);

/// Point-to-point table transfer, accounted under `kind`.
void send_table(WorkerContext& ctx, CollectiveKind kind, int dst, const Table& t);
Table recv_table(WorkerContext& ctx, CollectiveKind kind, int src);

/// Elementwise reduction over equal-length arrays; every rank returns the
/// same result (binomial-tree reduce to rank 0, then broadcast).
std::vector<double> allreduce(WorkerContext& ctx, std::span<const double> values,
                              ReduceOp op);
std::vector<int64_t> allreduce(WorkerContext& ctx, std::span<const int64_t> values,
                               ReduceOp op);

/// No rank returns until all ranks have entered.
void barrier(WorkerContext& ctx);

}  // namespace ddf::comm
