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

#include "ddf/comm/collectives.hpp"

#include <bit>
#include <thread>

#include "ddf/bytes.hpp"

namespace ddf::comm {

namespace {

const char* kind_names[] = {"send_recv", "shuffle",   "scatter",
                            "gather",    "allgather", "broadcast",
                            "reduce",    "allreduce", "barrier"};
const char* reduce_names[] = {"sum", "min", "max", "count"};

uint64_t buffer_bytes(const BufferList& buffers) {
  uint64_t n = 0;
  for (const auto& b : buffers) n += b.size();
  return n;
}

void send_flat(WorkerContext& ctx, CollectiveKind kind, int dst, int round,
               std::span<const uint8_t> bytes) {
  ctx.transport().send(dst, make_tag(ctx.rank(), round, kPhaseData), bytes);
  ctx.count_bytes(kind, bytes.size());
}

std::vector<uint8_t> recv_flat(WorkerContext& ctx, int src, int round) {
  return ctx.transport().recv(src, make_tag(src, round, kPhaseData));
}

Table gather_table_impl(WorkerContext& ctx, const Table& t, int root,
                        CollectiveKind kind, bool* is_root_out) {
  const int p = ctx.world_size();
  if (root < 0 || root >= p) {
    throw InvalidArgument("gather: invalid root " + std::to_string(root));
  }
  *is_root_out = ctx.rank() == root;
  if (!*is_root_out) {
    send_table(ctx, kind, root, t);
    return Table();
  }
  std::vector<Table> parts;
  parts.reserve(p);
  for (int src = 0; src < p; src++) {
    parts.push_back(src == ctx.rank() ? t : recv_table(ctx, kind, src));
  }
  return concat_tables(t.schema(), parts);
}

Table broadcast_table_impl(WorkerContext& ctx, const Table& t, int root,
                           CollectiveKind kind) {
  const int p = ctx.world_size();
  if (root < 0 || root >= p) {
    throw InvalidArgument("broadcast: invalid root " + std::to_string(root));
  }
  if (p == 1) return t;
  const int me = ctx.rank();
  const int vrank = (me - root + p) % p;
  const int rounds = broadcast_rounds(p);

  std::vector<uint8_t> bytes;
  if (vrank == 0) bytes = table_to_bytes(t);
  for (int k = 0; k < rounds; k++) {
    const int span = 1 << k;
    if (vrank < span) {
      int dst_v = vrank + span;
      if (dst_v < p) {
        send_flat(ctx, kind, (dst_v + root) % p, k, bytes);
      }
    } else if (vrank < 2 * span) {
      int src = (vrank - span + root) % p;
      bytes = ctx.transport().recv(src, make_tag(src, k, kPhaseData));
    }
  }
  return vrank == 0 ? t : table_from_bytes(bytes);
}

// Binomial reduce of opaque payloads toward rank 0. `combine` folds an
// incoming child payload into the accumulator.
template <typename Combine>
std::vector<uint8_t> reduce_to_zero(WorkerContext& ctx, CollectiveKind kind,
                                    std::vector<uint8_t> payload,
                                    Combine&& combine) {
  const int p = ctx.world_size();
  const int me = ctx.rank();
  for (int mask = 1; mask < p; mask <<= 1) {
    if (me & mask) {
      send_flat(ctx, kind, me - mask, /*round=*/mask, payload);
      return payload;  // sent up; no longer participates
    }
    int child = me + mask;
    if (child < p) {
      std::vector<uint8_t> incoming =
          ctx.transport().recv(child, make_tag(child, mask, kPhaseData));
      combine(payload, incoming);
    }
  }
  return payload;
}

// Binomial broadcast of an opaque payload from rank 0.
std::vector<uint8_t> broadcast_bytes_from_zero(WorkerContext& ctx,
                                               CollectiveKind kind,
                                               std::vector<uint8_t> bytes) {
  const int p = ctx.world_size();
  const int me = ctx.rank();
  const int rounds = broadcast_rounds(p);
  for (int k = 0; k < rounds; k++) {
    const int span = 1 << k;
    if (me < span) {
      int dst = me + span;
      if (dst < p) send_flat(ctx, kind, dst, rounds + k, bytes);
    } else if (me < 2 * span) {
      int src = me - span;
      bytes = ctx.transport().recv(src, make_tag(src, rounds + k, kPhaseData));
    }
  }
  return bytes;
}

template <typename T>
uint64_t to_wire(T v) {
  return std::bit_cast<uint64_t>(static_cast<std::conditional_t<
      std::is_same_v<T, double>, double, int64_t>>(v));
}

template <typename T>
T from_wire(uint64_t w) {
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(w);
  } else {
    return std::bit_cast<int64_t>(w);
  }
}

template <typename T>
T combine_one(T acc, T in, ReduceOp op) {
  switch (op) {
    case ReduceOp::Sum:
    case ReduceOp::Count:
      if constexpr (std::is_same_v<T, int64_t>) {
        return wrapping_add(acc, in);
      } else {
        return acc + in;
      }
    case ReduceOp::Min: return in < acc ? in : acc;
    case ReduceOp::Max: return acc < in ? in : acc;
  }
  return acc;
}

template <typename T>
std::vector<T> allreduce_impl(WorkerContext& ctx, std::span<const T> values,
                              ReduceOp op) {
  // Payload: u64 element count, then 8-byte wire elements. Binomial-tree
  // reduce to rank 0 followed by a broadcast keeps results bit-identical on
  // every rank even for floating point.
  std::vector<uint8_t> payload;
  payload.reserve(8 + values.size() * 8);
  put_u64(payload, values.size());
  for (const T& v : values) put_u64(payload, to_wire(v));

  auto combine = [&](std::vector<uint8_t>& acc, const std::vector<uint8_t>& in) {
    if (in.size() != acc.size() || load_u64(in.data()) != load_u64(acc.data())) {
      throw InvalidArgument("allreduce: array length mismatch across ranks");
    }
    for (size_t i = 0; i < values.size(); i++) {
      T a = from_wire<T>(load_u64(acc.data() + 8 + i * 8));
      T b = from_wire<T>(load_u64(in.data() + 8 + i * 8));
      T c = combine_one(a, b, op);
      uint64_t w = to_wire(c);
      for (int k = 0; k < 8; k++) acc[8 + i * 8 + k] = uint8_t(w >> (8 * k));
    }
  };

  std::vector<uint8_t> reduced =
      reduce_to_zero(ctx, CollectiveKind::AllReduce, std::move(payload), combine);
  std::vector<uint8_t> result =
      broadcast_bytes_from_zero(ctx, CollectiveKind::AllReduce, std::move(reduced));

  if (result.size() != 8 + values.size() * 8 ||
      load_u64(result.data()) != values.size()) {
    throw InvalidArgument("allreduce: array length mismatch across ranks");
  }
  std::vector<T> out(values.size());
  for (size_t i = 0; i < out.size(); i++) {
    out[i] = from_wire<T>(load_u64(result.data() + 8 + i * 8));
  }
  return out;
}

}  // namespace

const char* to_string(CollectiveKind k) {
  return kind_names[static_cast<size_t>(k)];
}
const char* to_string(ReduceOp op) { return reduce_names[static_cast<size_t>(op)]; }

int broadcast_rounds(int world_size) {
  int rounds = 0;
  while ((1 << rounds) < world_size) rounds++;
  return rounds;
}

std::vector<BufferList> channel_exchange(WorkerContext& ctx, CollectiveKind kind,
                                         const std::vector<BufferList>& outgoing) {
  const int p = ctx.world_size();
  const int me = ctx.rank();
  if (static_cast<int>(outgoing.size()) != p) {
    throw InvalidArgument("channel_exchange: need one buffer list per rank");
  }

  std::vector<BufferList> received(p);
  received[me] = outgoing[me];  // local transfer, no network phase
  if (p == 1) return received;

  // Sends progress on their own thread so that a peer blocked mid-exchange
  // can never stall our receives: the dependency graph between workers stays
  // acyclic and the whole superstep completes.
  std::exception_ptr send_error;
  std::thread sender([&] {
    try {
      for (int off = 1; off < p; off++) {
        const int dst = (me + off) % p;
        const BufferList& list = outgoing[dst];
        std::vector<uint8_t> meta;
        meta.reserve(8 + list.size() * 8);
        put_u64(meta, list.size());
        for (const auto& b : list) put_u64(meta, b.size());
        ctx.transport().send(dst, make_tag(me, 0, kPhaseMetadata), meta);
        for (size_t i = 0; i < list.size(); i++) {
          ctx.transport().send(dst, make_tag(me, int(i), kPhaseData), list[i]);
        }
        ctx.count_bytes(kind, buffer_bytes(list));
      }
    } catch (...) {
      send_error = std::current_exception();
    }
  });

  std::exception_ptr recv_error;
  try {
    for (int src = 0; src < p; src++) {
      if (src == me) continue;
      std::vector<uint8_t> meta =
          ctx.transport().recv(src, make_tag(src, 0, kPhaseMetadata));
      ByteReader r(meta);
      uint64_t count = r.u64("buffer count");
      std::vector<uint64_t> sizes(count);
      for (auto& s : sizes) s = r.u64("buffer size");
      BufferList bufs;
      bufs.reserve(count);
      for (uint64_t i = 0; i < count; i++) {
        bufs.push_back(ctx.transport().recv(src, make_tag(src, int(i), kPhaseData)));
        if (bufs.back().size() != sizes[i]) {
          throw TransportError("channel_exchange: buffer size disagrees with "
                               "metadata from rank " + std::to_string(src));
        }
      }
      received[src] = std::move(bufs);
    }
  } catch (...) {
    recv_error = std::current_exception();
  }

  sender.join();
  if (recv_error) std::rethrow_exception(recv_error);
  if (send_error) std::rethrow_exception(send_error);
  return received;
}

std::vector<Table> exchange_tables(WorkerContext& ctx, CollectiveKind kind,
                                   const std::vector<Table>& parts) {
  const int p = ctx.world_size();
  if (static_cast<int>(parts.size()) != p) {
    throw InvalidArgument("exchange_tables: need one sub-table per rank");
  }
  // Empty sub-tables travel as zero buffers: balanced data moves no bytes.
  // All exchanged parts share one schema, so receivers rebuild empty parts
  // from their own.
  std::vector<BufferList> outgoing(p);
  for (int r = 0; r < p; r++) {
    if (parts[r].num_rows() == 0) continue;
    SerializedTable st = serialize_table(parts[r]);
    BufferList list;
    list.reserve(1 + st.buffers.size());
    list.push_back(std::move(st.header));
    for (auto& b : st.buffers) list.push_back(std::move(b));
    outgoing[r] = std::move(list);
  }

  std::vector<BufferList> received = channel_exchange(ctx, kind, outgoing);
  std::vector<Table> result;
  result.reserve(p);
  for (int src = 0; src < p; src++) {
    BufferList& list = received[src];
    if (list.empty()) {
      result.push_back(Table::empty(parts[ctx.rank()].schema()));
      continue;
    }
    SerializedTable st;
    st.header = std::move(list[0]);
    st.buffers.assign(std::make_move_iterator(list.begin() + 1),
                      std::make_move_iterator(list.end()));
    result.push_back(deserialize_table(st));
  }
  return result;
}

std::vector<Table> shuffle_table_parts(WorkerContext& ctx, const Table& t,
                                       std::span<const int> dest) {
  const int p = ctx.world_size();
  if (static_cast<int64_t>(dest.size()) != t.num_rows()) {
    throw InvalidArgument("shuffle: need one destination per row");
  }
  for (int d : dest) {
    if (d < 0 || d >= p) {
      throw InvalidArgument("shuffle: destination rank out of range: " +
                            std::to_string(d));
    }
  }

  std::vector<std::vector<int64_t>> indices(p);
  for (int64_t i = 0; i < t.num_rows(); i++) {
    indices[dest[i]].push_back(i);
  }
  std::vector<Table> parts;
  parts.reserve(p);
  for (int r = 0; r < p; r++) parts.push_back(take_rows(t, indices[r]));
  return exchange_tables(ctx, CollectiveKind::Shuffle, parts);
}

Table shuffle_table(WorkerContext& ctx, const Table& t, std::span<const int> dest) {
  std::vector<Table> parts = shuffle_table_parts(ctx, t, dest);
  Table out = concat_tables(t.schema(), parts);
  return out.with_keys(t.schema().key_indices());
}

std::optional<Table> gather_table(WorkerContext& ctx, const Table& t, int root) {
  bool is_root = false;
  Table gathered = gather_table_impl(ctx, t, root, CollectiveKind::Gather, &is_root);
  if (!is_root) return std::nullopt;
  return gathered;
}

Table allgather_table(WorkerContext& ctx, const Table& t) {
  bool is_root = false;
  Table gathered =
      gather_table_impl(ctx, t, 0, CollectiveKind::AllGather, &is_root);
  Table out = broadcast_table_impl(ctx, is_root ? gathered : Table(), 0,
                                   CollectiveKind::AllGather);
  return out.with_keys(t.schema().key_indices());
}

Table broadcast_table(WorkerContext& ctx, const Table& t, int root) {
  return broadcast_table_impl(ctx, t, root, CollectiveKind::Broadcast);
}

void send_table(WorkerContext& ctx, CollectiveKind kind, int dst, const Table& t) {
  std::vector<uint8_t> bytes = table_to_bytes(t);
  send_flat(ctx, kind, dst, 0, bytes);
}

Table recv_table(WorkerContext& ctx, CollectiveKind kind, int src) {
  (void)kind;
  return table_from_bytes(recv_flat(ctx, src, 0));
}

std::vector<double> allreduce(WorkerContext& ctx, std::span<const double> values,
                              ReduceOp op) {
  return allreduce_impl<double>(ctx, values, op);
}

std::vector<int64_t> allreduce(WorkerContext& ctx, std::span<const int64_t> values,
                               ReduceOp op) {
  return allreduce_impl<int64_t>(ctx, values, op);
}

void barrier(WorkerContext& ctx) {
  auto noop = [](std::vector<uint8_t>&, const std::vector<uint8_t>&) {};
  std::vector<uint8_t> token =
      reduce_to_zero(ctx, CollectiveKind::Barrier, {}, noop);
  broadcast_bytes_from_zero(ctx, CollectiveKind::Barrier, std::move(token));
}

}  // namespace ddf::comm
