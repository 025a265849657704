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

#include "ddf/ops/setops.hpp"

#include <unordered_map>

#include "ddf/partition.hpp"

namespace ddf {

namespace detail {

std::vector<int64_t> distinct_indices(const Table& t, std::span<const int> keys) {
  std::unordered_map<uint64_t, std::vector<int64_t>> seen;
  seen.reserve(static_cast<size_t>(t.num_rows()) * 2);
  std::vector<int64_t> firsts;
  for (int64_t r = 0; r < t.num_rows(); r++) {
    auto& bucket = seen[hash_row(t, keys, r)];
    bool duplicate = false;
    for (int64_t prev : bucket) {
      if (rows_equal(t, prev, t, r, keys)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      bucket.push_back(r);
      firsts.push_back(r);
    }
  }
  return firsts;
}

}  // namespace detail

namespace {

void check_same_schema(const Table& a, const Table& b, const char* op) {
  if (!a.schema().equals(b.schema())) {
    throw InvalidArgument(std::string(op) + ": schema mismatch between inputs");
  }
}

/// Shuffles t by full-row hash; equal rows land on one rank.
Table shuffle_by_rows(comm::WorkerContext& ctx, const Table& t,
                      std::span<const int> cols, StageSink* sink,
                      const char* stage) {
  PartitionAssignment a;
  std::vector<Table> parts;
  {
    StageTimer timer(sink, &ctx, "partition");
    a = hash_partition(t, cols, ctx.world_size());
  }
  {
    StageTimer timer(sink, &ctx, "split");
    parts = split(t, a);
  }
  StageTimer timer(sink, &ctx, stage);
  return concat_tables(
      t.schema(), comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle, parts));
}

}  // namespace

Table union_distinct(comm::WorkerContext& ctx, const Table& a, const Table& b,
                     StageSink* sink) {
  check_same_schema(a, b, "union");
  std::vector<int> cols = all_columns(a);
  Table a_shuf = shuffle_by_rows(ctx, a, cols, sink, "shuffle-left");
  Table b_shuf = shuffle_by_rows(ctx, b, cols, sink, "shuffle-right");
  StageTimer timer(sink, &ctx, "local-union");
  const Table parts[2] = {a_shuf, b_shuf};
  Table both = concat_tables(a.schema(), parts);
  return take_rows(both, detail::distinct_indices(both, cols));
}

Table difference(comm::WorkerContext& ctx, const Table& a, const Table& b,
                 StageSink* sink) {
  check_same_schema(a, b, "difference");
  std::vector<int> cols = all_columns(a);
  Table a_shuf = shuffle_by_rows(ctx, a, cols, sink, "shuffle-left");
  Table b_shuf = shuffle_by_rows(ctx, b, cols, sink, "shuffle-right");

  StageTimer timer(sink, &ctx, "local-difference");
  std::unordered_map<uint64_t, std::vector<int64_t>> present;
  for (int64_t r = 0; r < b_shuf.num_rows(); r++) {
    present[hash_row(b_shuf, cols, r)].push_back(r);
  }
  std::vector<int64_t> keep;
  for (int64_t r : detail::distinct_indices(a_shuf, cols)) {
    auto it = present.find(hash_row(a_shuf, cols, r));
    bool found = false;
    if (it != present.end()) {
      for (int64_t br : it->second) {
        if (rows_equal(a_shuf, r, b_shuf, br, cols)) {
          found = true;
          break;
        }
      }
    }
    if (!found) keep.push_back(r);
  }
  return take_rows(a_shuf, keep);
}

Table unique(comm::WorkerContext& ctx, const Table& t, std::span<const int> keys,
             StageSink* sink) {
  std::vector<int> cols(keys.begin(), keys.end());
  if (cols.empty()) cols = all_columns(t);
  Table combined;
  {
    StageTimer timer(sink, &ctx, "local-distinct");
    combined = take_rows(t, detail::distinct_indices(t, cols));
  }
  Table shuffled = shuffle_by_rows(ctx, combined, cols, sink, "shuffle");
  StageTimer timer(sink, &ctx, "final-distinct");
  return take_rows(shuffled, detail::distinct_indices(shuffled, cols));
}

}  // namespace ddf
