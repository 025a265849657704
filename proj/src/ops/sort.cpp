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

#include "ddf/ops/sort.hpp"

#include <queue>

#include "ddf/partition.hpp"

namespace ddf {

namespace {

const char* strategy_names[] = {"sample_sort", "histogram_range"};

}  // namespace

const char* to_string(SortStrategy s) {
  return strategy_names[static_cast<int>(s)];
}

namespace detail {

Table merge_sorted_runs(const Schema& schema, std::span<const Table> runs,
                        int key_column) {
  // Cursor priority queue keyed by the runs' current front cells.
  struct Cursor {
    int run;
    int64_t row;
  };
  auto greater = [&](const Cursor& a, const Cursor& b) {
    int cmp = compare_cells(runs[a.run].column(key_column), a.row,
                            runs[b.run].column(key_column), b.row);
    if (cmp != 0) return cmp > 0;
    return a.run > b.run;  // stable across runs for determinism
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(greater)> heap(greater);
  for (size_t r = 0; r < runs.size(); r++) {
    if (runs[r].num_rows() > 0) heap.push({int(r), 0});
  }

  std::vector<ColumnBuilder> builders;
  for (const auto& f : schema.fields()) builders.emplace_back(f.dtype);
  while (!heap.empty()) {
    Cursor c = heap.top();
    heap.pop();
    for (int col = 0; col < schema.num_fields(); col++) {
      builders[col].append_from(runs[c.run].column(col), c.row);
    }
    if (c.row + 1 < runs[c.run].num_rows()) heap.push({c.run, c.row + 1});
  }
  std::vector<Column> cols;
  cols.reserve(builders.size());
  for (auto& b : builders) cols.push_back(b.finish());
  return Table(schema, std::move(cols));
}

}  // namespace detail

Table sort(comm::WorkerContext& ctx, const Table& t, int key_column,
           SortStrategy strategy, StageSink* sink, int bins, int sample_size) {
  if (key_column < 0 || key_column >= t.num_columns()) {
    throw InvalidArgument("sort: unknown key column");
  }
  const int p = ctx.world_size();
  const int key_cols[1] = {key_column};
  if (sample_size <= 0) sample_size = p;

  if (strategy == SortStrategy::HistogramRange) {
    // Sample -> allreduce range -> binning & range partition -> shuffle ->
    // local sort.
    RangeBounds bounds;
    {
      StageTimer timer(sink, &ctx, "allreduce-range");
      bounds = range_partition_bounds(ctx, t.column(key_column), p, bins);
    }
    PartitionAssignment assignment;
    std::vector<Table> parts;
    {
      StageTimer timer(sink, &ctx, "range-partition");
      assignment = assign_by_range(t.column(key_column), bounds, p);
      parts = split(t, assignment);
    }
    Table shuffled;
    {
      StageTimer timer(sink, &ctx, "shuffle");
      shuffled = concat_tables(
          t.schema(),
          comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle, parts));
    }
    StageTimer timer(sink, &ctx, "local-sort");
    return take_rows(shuffled, sort_permutation(shuffled, key_cols));
  }

  // Sample sort: local sort -> sample -> gather samples at rank 0 -> pivots
  // at rank 0 -> broadcast pivots -> split -> shuffle -> local merge.
  Table sorted;
  {
    StageTimer timer(sink, &ctx, "local-sort");
    sorted = take_rows(t, sort_permutation(t, key_cols));
  }
  RangeBounds bounds;
  {
    StageTimer timer(sink, &ctx, "sample-pivots");
    bounds = sample_pivots(ctx, sorted.column(key_column), sample_size);
  }
  std::vector<Table> parts;
  {
    StageTimer timer(sink, &ctx, "split");
    if (p == 1) {
      parts.push_back(sorted);
    } else {
      parts = split(sorted, assign_by_range(sorted.column(key_column), bounds, p));
    }
  }
  std::vector<Table> runs;
  {
    StageTimer timer(sink, &ctx, "shuffle");
    runs = comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle, parts);
  }
  StageTimer timer(sink, &ctx, "local-merge");
  return detail::merge_sorted_runs(t.schema(), runs, key_column);
}

}  // namespace ddf
