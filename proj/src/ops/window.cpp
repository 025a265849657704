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

#include "ddf/ops/window.hpp"

#include "ddf/ops/local_ops.hpp"

namespace ddf {

Table rolling_window(comm::WorkerContext& ctx, const Table& t, int value_column,
                     int64_t window, StageSink* sink) {
  if (window <= 0) throw InvalidArgument("rolling window must be >= 1");
  if (value_column < 0 || value_column >= t.num_columns()) {
    throw InvalidArgument("rolling_window: unknown value column");
  }
  const Column& col = t.column(value_column);
  if (!is_numeric(col.dtype())) {
    throw InvalidArgument("rolling_window requires a numeric value column");
  }
  const int p = ctx.world_size();
  const int me = ctx.rank();

  // Global prefix: how many rows precede this rank.
  std::vector<int64_t> one_hot(p, 0);
  one_hot[me] = t.num_rows();
  std::vector<int64_t> counts =
      comm::allreduce(ctx, std::span<const int64_t>(one_hot), comm::ReduceOp::Sum);
  int64_t prefix = 0;
  for (int r = 0; r < me; r++) prefix += counts[r];

  // Halo chain, left to right: each rank forwards the last window-1 rows of
  // its extended sequence, so a short neighbor transparently relays older
  // history.
  Schema value_schema({{t.schema().field(value_column).name, col.dtype()}});
  Table halo = Table::empty(value_schema);
  {
    StageTimer timer(sink, &ctx, "halo-exchange");
    const int value_cols[1] = {value_column};
    Table local_values = project(t, value_cols);
    for (int step = 0; step + 1 < p; step++) {
      if (me == step + 1) {
        halo = comm::recv_table(ctx, comm::CollectiveKind::SendRecv, step);
      } else if (me == step) {
        const Table ext_parts[2] = {halo, local_values};
        Table ext = concat_tables(value_schema, ext_parts);
        int64_t take = std::min<int64_t>(window - 1, ext.num_rows());
        std::vector<int64_t> tail(take);
        for (int64_t i = 0; i < take; i++) {
          tail[i] = ext.num_rows() - take + i;
        }
        comm::send_table(ctx, comm::CollectiveKind::SendRecv, step + 1,
                         take_rows(ext, tail));
      }
    }
  }

  StageTimer timer(sink, &ctx, "local-window");
  const Column& halo_col = halo.column(0);
  const int64_t h = halo.num_rows();
  const bool int_lane = col.dtype() == DataType::Int64;
  ColumnBuilder out(int_lane ? DataType::Int64 : DataType::Float64);
  out.reserve(t.num_rows());

  auto cell = [&](int64_t ext_index) -> const Column& {
    return ext_index < h ? halo_col : col;
  };
  auto cell_row = [&](int64_t ext_index) {
    return ext_index < h ? ext_index : ext_index - h;
  };

  for (int64_t i = 0; i < t.num_rows(); i++) {
    const int64_t global = prefix + i;
    if (global < window - 1) {
      out.append_null();
      continue;
    }
    // Window covers ext indices [h+i-window+1, h+i]; nulls contribute 0.
    int64_t sum_i = 0;
    double sum_f = 0;
    for (int64_t e = h + i - window + 1; e <= h + i; e++) {
      const Column& c = cell(e);
      int64_t r = cell_row(e);
      if (c.is_null(r)) continue;
      if (int_lane) sum_i = wrapping_add(sum_i, c.int64_at(r));
      else sum_f += c.numeric_at(r);
    }
    if (int_lane) out.append_int64(sum_i);
    else out.append_float64(sum_f);
  }

  std::string name = t.schema().field(value_column).name + "_rolling_sum";
  return Table(Schema({{name, out.dtype()}}), {out.finish()});
}

}  // namespace ddf
