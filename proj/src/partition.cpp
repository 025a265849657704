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

#include "ddf/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace ddf {

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x00000100000001b3ULL;

constexpr uint8_t kNullSentinel = 0x00;
constexpr uint8_t kValueSentinel = 0x01;

inline uint64_t fnv_step(uint64_t h, uint8_t byte) {
  return (h ^ byte) * kFnvPrime;
}

inline uint64_t fnv_bytes(uint64_t h, const uint8_t* p, size_t n) {
  for (size_t i = 0; i < n; i++) h = fnv_step(h, p[i]);
  return h;
}

inline uint64_t fnv_u64(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; i++) h = fnv_step(h, uint8_t(v >> (8 * i)));
  return h;
}

// 64-bit finalizer from MurmurHash3 (fmix64); spreads FNV's low-bias state
// before the mod-P fold.
inline uint64_t avalanche(uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

// Scalar samples as a single-column table so pivot exchange rides the
// ordinary table collectives.
Table scalars_to_table(DataType dtype, std::span<const Scalar> values) {
  ColumnBuilder b(dtype);
  for (const auto& v : values) b.append_scalar(v);
  return Table(Schema({{"k", dtype}}), {b.finish()});
}

std::vector<Scalar> table_to_scalars(const Table& t) {
  std::vector<Scalar> out;
  out.reserve(t.num_rows());
  for (int64_t i = 0; i < t.num_rows(); i++) {
    out.push_back(t.column(0).scalar_at(i));
  }
  return out;
}

}  // namespace

uint64_t hash_row(const Table& t, std::span<const int> key_cols, int64_t row) {
  uint64_t h = kFnvOffset;
  for (int c : key_cols) {
    const Column& col = t.column(c);
    if (col.is_null(row)) {
      h = fnv_step(h, kNullSentinel);
      continue;
    }
    h = fnv_step(h, kValueSentinel);
    switch (col.dtype()) {
      case DataType::Int64:
        h = fnv_u64(h, uint64_t(col.int64_at(row)));
        break;
      case DataType::Float64: {
        double v = col.float64_at(row);
        if (v == 0.0) v = 0.0;  // fold -0.0 with +0.0, matching value equality
        h = fnv_u64(h, std::bit_cast<uint64_t>(v));
        break;
      }
      case DataType::Bool:
        h = fnv_step(h, col.bool_at(row) ? 1 : 0);
        break;
      case DataType::Utf8: {
        std::string_view s = col.utf8_at(row);
        h = fnv_u64(h, s.size());
        h = fnv_bytes(h, reinterpret_cast<const uint8_t*>(s.data()), s.size());
        break;
      }
    }
  }
  return avalanche(h);
}

PartitionAssignment hash_partition(const Table& t, std::span<const int> key_cols,
                                   int world) {
  if (key_cols.empty()) {
    throw InvalidArgument("hash_partition: key columns must not be empty");
  }
  if (world < 1) throw InvalidArgument("hash_partition: world must be >= 1");
  for (int c : key_cols) {
    if (c < 0 || c >= t.num_columns()) {
      throw InvalidArgument("hash_partition: key column out of range");
    }
  }
  PartitionAssignment a;
  a.world = world;
  a.dest.resize(t.num_rows());
  for (int64_t i = 0; i < t.num_rows(); i++) {
    a.dest[i] = int(hash_row(t, key_cols, i) % uint64_t(world));
  }
  return a;
}

RangeBounds range_partition_bounds(comm::WorkerContext& ctx, const Column& key,
                                   int world, int bins) {
  if (!is_numeric(key.dtype())) {
    throw InvalidArgument("range partition requires a numeric key column");
  }
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");

  double local_min = std::numeric_limits<double>::infinity();
  double local_max = -std::numeric_limits<double>::infinity();
  double local_count = 0;
  for (int64_t i = 0; i < key.length(); i++) {
    if (key.is_null(i)) continue;
    double v = key.numeric_at(i);
    local_min = std::min(local_min, v);
    local_max = std::max(local_max, v);
    local_count += 1;
  }

  const double extrema[2] = {local_min, -local_max};
  std::vector<double> mins = comm::allreduce(ctx, std::span(extrema, 2),
                                             comm::ReduceOp::Min);
  const double counts_in[1] = {local_count};
  std::vector<double> counts = comm::allreduce(ctx, std::span(counts_in, 1),
                                               comm::ReduceOp::Sum);
  const double global_min = mins[0];
  const double global_max = -mins[1];
  const double total = counts[0];
  if (total == 0) {
    throw InvalidArgument("range partition: key column is all-null");
  }

  RangeBounds bounds;
  bounds.min = global_min;
  bounds.max = global_max;
  if (global_min == global_max) {
    // Degenerate domain: all pivots equal, everything lands on rank 0 via
    // the <= tie rule.
    bounds.pivots.assign(world - 1, Scalar(global_max));
    // Keep collective call counts aligned across ranks.
    std::vector<double> zeros(bins, 0.0);
    comm::allreduce(ctx, std::span<const double>(zeros), comm::ReduceOp::Sum);
    return bounds;
  }

  const double width = (global_max - global_min) / bins;
  std::vector<double> hist(bins, 0.0);
  for (int64_t i = 0; i < key.length(); i++) {
    if (key.is_null(i)) continue;
    double v = key.numeric_at(i);
    auto bin = int64_t((v - global_min) / width);
    if (bin >= bins) bin = bins - 1;
    if (bin < 0) bin = 0;
    hist[bin] += 1;
  }
  std::vector<double> global_hist =
      comm::allreduce(ctx, std::span<const double>(hist), comm::ReduceOp::Sum);

  // Pivot k sits inside the first bin whose cumulative count reaches k/world
  // of the data, interpolated linearly within the bin so balance survives
  // skew coarser than the bin width. Integer-aligned bins make the quantiles
  // exact (interpolation degenerates to the bin's upper edge).
  bounds.pivots.reserve(world - 1);
  double cumulative = 0;
  int bin = 0;
  for (int k = 1; k < world; k++) {
    const double target = total * double(k) / world;
    while (bin < bins && cumulative + global_hist[bin] < target) {
      cumulative += global_hist[bin];
      bin++;
    }
    double pivot;
    if (bin >= bins) {
      pivot = global_max;
    } else {
      double left = global_min + width * bin;
      pivot = left + width * (target - cumulative) / global_hist[bin];
      pivot = std::min(pivot, global_max);
    }
    bounds.pivots.emplace_back(pivot);
  }
  return bounds;
}

PartitionAssignment assign_by_range(const Column& key, const RangeBounds& bounds,
                                    int world) {
  if (static_cast<int>(bounds.pivots.size()) != world - 1) {
    throw InvalidArgument("assign_by_range: need world-1 pivots");
  }
  PartitionAssignment a;
  a.world = world;
  a.dest.resize(key.length());
  for (int64_t i = 0; i < key.length(); i++) {
    Scalar v = key.scalar_at(i);
    if (scalar_is_null(v)) {
      a.dest[i] = 0;  // nulls sort first
      continue;
    }
    int r = 0;
    while (r < world - 1 && compare_scalars(v, bounds.pivots[r]) > 0) r++;
    a.dest[i] = r;
  }
  return a;
}

RangeBounds sample_pivots(comm::WorkerContext& ctx, const Column& sorted_key,
                          int sample_size) {
  const int world = ctx.world_size();
  if (sample_size < world - 1) {
    throw InvalidArgument("sample_pivots: sample size must be >= world-1");
  }
  RangeBounds bounds;
  if (world == 1) return bounds;

  // Regular samples over the non-null region; nulls are routed to rank 0 by
  // assign_by_range regardless of pivots.
  std::vector<Scalar> samples;
  int64_t first_valid = 0;
  while (first_valid < sorted_key.length() && sorted_key.is_null(first_valid)) {
    first_valid++;
  }
  const int64_t n = sorted_key.length() - first_valid;
  if (n > 0) {
    const int64_t stride = (n + sample_size - 1) / sample_size;
    for (int64_t i = 0; i < n; i += stride) {
      samples.push_back(sorted_key.scalar_at(first_valid + i));
    }
  }

  Table sample_table = scalars_to_table(sorted_key.dtype(), samples);
  std::optional<Table> gathered = comm::gather_table(ctx, sample_table, 0);

  Table pivot_table = Table::empty(sample_table.schema());
  if (ctx.rank() == 0) {
    std::vector<Scalar> all = table_to_scalars(*gathered);
    std::sort(all.begin(), all.end(), [](const Scalar& a, const Scalar& b) {
      return compare_scalars(a, b) < 0;
    });
    std::vector<Scalar> pivots;
    pivots.reserve(world - 1);
    const int64_t m = static_cast<int64_t>(all.size());
    for (int k = 1; k < world; k++) {
      if (m == 0) {
        pivots.emplace_back(std::monostate{});
      } else {
        int64_t pos = std::min<int64_t>(k * m / world, m - 1);
        pivots.push_back(all[pos]);
      }
    }
    pivot_table = scalars_to_table(sorted_key.dtype(), pivots);
  }
  pivot_table = comm::broadcast_table(ctx, pivot_table, 0);

  bounds.pivots = table_to_scalars(pivot_table);
  if (!bounds.pivots.empty()) {
    bounds.min = bounds.pivots.front();
    bounds.max = bounds.pivots.back();
  }
  return bounds;
}

std::vector<Table> split(const Table& t, const PartitionAssignment& assignment) {
  if (static_cast<int64_t>(assignment.dest.size()) != t.num_rows()) {
    throw InvalidArgument("split: assignment length must equal row count");
  }
  std::vector<std::vector<int64_t>> indices(assignment.world);
  for (int64_t i = 0; i < t.num_rows(); i++) {
    int d = assignment.dest[i];
    if (d < 0 || d >= assignment.world) {
      throw InvalidArgument("split: destination out of range");
    }
    indices[d].push_back(i);
  }
  std::vector<Table> parts;
  parts.reserve(assignment.world);
  for (const auto& idx : indices) parts.push_back(take_rows(t, idx));
  return parts;
}

Table rebalance(comm::WorkerContext& ctx, const Table& t) {
  const int world = ctx.world_size();
  const int me = ctx.rank();

  // All ranks learn every partition size via a one-hot allreduce.
  std::vector<int64_t> one_hot(world, 0);
  one_hot[me] = t.num_rows();
  std::vector<int64_t> counts =
      comm::allreduce(ctx, std::span<const int64_t>(one_hot), comm::ReduceOp::Sum);

  int64_t total = 0, prefix = 0;
  for (int r = 0; r < world; r++) {
    if (r < me) prefix += counts[r];
    total += counts[r];
  }
  const int64_t base = total / world;
  const int64_t remainder = total % world;

  // Global row g belongs to the rank whose [start, start+size) spans it,
  // where the first `remainder` ranks hold base+1 rows.
  auto rank_of = [&](int64_t g) {
    if (g < remainder * (base + 1)) return int(g / (base + 1));
    return int(remainder + (g - remainder * (base + 1)) / std::max<int64_t>(base, 1));
  };

  PartitionAssignment a;
  a.world = world;
  a.dest.resize(t.num_rows());
  for (int64_t i = 0; i < t.num_rows(); i++) {
    a.dest[i] = rank_of(prefix + i);
  }
  return comm::shuffle_table(ctx, t, a.dest);
}

}  // namespace ddf
