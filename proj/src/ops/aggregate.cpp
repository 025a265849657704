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

#include "ddf/ops/aggregate.hpp"

#include <cmath>
#include <limits>

namespace ddf {

namespace {

struct Slot {
  // Every aggregate reduces as (value, count) pairs of doubles; Int64
  // columns fold through int64 lanes to stay exact.
  double value;
  int64_t ivalue;
  int64_t count;
  bool use_int;
};

}  // namespace

Table column_aggregate(comm::WorkerContext& ctx, const Table& t,
                       const AggSpec& aggs, StageSink* sink) {
  for (const auto& a : aggs) {
    validate_agg(t, a);
    if (!is_numeric(t.column(a.column).dtype())) {
      throw InvalidArgument("column_aggregate requires numeric columns, got " +
                            std::string(to_string(t.column(a.column).dtype())));
    }
  }

  // Local fold: one (value, count) slot per aggregate.
  std::vector<Slot> slots(aggs.size());
  {
    StageTimer timer(sink, &ctx, "local-op");
    for (size_t j = 0; j < aggs.size(); j++) {
      const Aggregate& a = aggs[j];
      const Column& col = t.column(a.column);
      Slot s{};
      s.use_int = col.dtype() == DataType::Int64 && a.kind != AggKind::Mean;
      switch (a.kind) {
        case AggKind::Sum:
        case AggKind::Count:
        case AggKind::Mean:
          s.value = 0;
          s.ivalue = 0;
          break;
        case AggKind::Min:
          s.value = std::numeric_limits<double>::infinity();
          s.ivalue = std::numeric_limits<int64_t>::max();
          break;
        case AggKind::Max:
          s.value = -std::numeric_limits<double>::infinity();
          s.ivalue = std::numeric_limits<int64_t>::min();
          break;
      }
      for (int64_t r = 0; r < col.length(); r++) {
        if (col.is_null(r)) continue;
        s.count++;
        switch (a.kind) {
          case AggKind::Sum:
            if (s.use_int) s.ivalue = wrapping_add(s.ivalue, col.int64_at(r));
            else s.value += col.numeric_at(r);
            break;
          case AggKind::Mean:
            s.value += col.numeric_at(r);
            break;
          case AggKind::Count:
            break;
          case AggKind::Min:
            if (s.use_int) s.ivalue = std::min(s.ivalue, col.int64_at(r));
            else s.value = std::min(s.value, col.numeric_at(r));
            break;
          case AggKind::Max:
            if (s.use_int) s.ivalue = std::max(s.ivalue, col.int64_at(r));
            else s.value = std::max(s.value, col.numeric_at(r));
            break;
        }
      }
      slots[j] = s;
    }
  }

  // Global reduction: group slots by reduce op so each lane carries one
  // allreduce. Counts always fold by Sum.
  std::vector<double> fsum, fmin, fmax;
  std::vector<int64_t> icounts, isum, imin, imax;
  for (size_t j = 0; j < aggs.size(); j++) {
    const Slot& s = slots[j];
    icounts.push_back(s.count);
    switch (aggs[j].kind) {
      case AggKind::Sum:
      case AggKind::Mean:
        if (s.use_int) isum.push_back(s.ivalue);
        else fsum.push_back(s.value);
        break;
      case AggKind::Min:
        if (s.use_int) imin.push_back(s.ivalue);
        else fmin.push_back(s.value);
        break;
      case AggKind::Max:
        if (s.use_int) imax.push_back(s.ivalue);
        else fmax.push_back(s.value);
        break;
      case AggKind::Count:
        break;
    }
  }

  std::vector<double> gfsum, gfmin, gfmax;
  std::vector<int64_t> gicounts, gisum, gimin, gimax;
  {
    StageTimer timer(sink, &ctx, "allreduce");
    gicounts = comm::allreduce(ctx, std::span<const int64_t>(icounts),
                               comm::ReduceOp::Sum);
    if (!fsum.empty())
      gfsum = comm::allreduce(ctx, std::span<const double>(fsum), comm::ReduceOp::Sum);
    if (!isum.empty())
      gisum = comm::allreduce(ctx, std::span<const int64_t>(isum), comm::ReduceOp::Sum);
    if (!fmin.empty())
      gfmin = comm::allreduce(ctx, std::span<const double>(fmin), comm::ReduceOp::Min);
    if (!imin.empty())
      gimin = comm::allreduce(ctx, std::span<const int64_t>(imin), comm::ReduceOp::Min);
    if (!fmax.empty())
      gfmax = comm::allreduce(ctx, std::span<const double>(fmax), comm::ReduceOp::Max);
    if (!imax.empty())
      gimax = comm::allreduce(ctx, std::span<const int64_t>(imax), comm::ReduceOp::Max);
  }

  StageTimer timer(sink, &ctx, "finalize");
  std::vector<Field> fields;
  std::vector<Column> cols;
  size_t nfsum = 0, nisum = 0, nfmin = 0, nimin = 0, nfmax = 0, nimax = 0;
  for (size_t j = 0; j < aggs.size(); j++) {
    const Aggregate& a = aggs[j];
    const Slot& s = slots[j];
    const int64_t count = gicounts[j];
    ColumnBuilder b(agg_output_dtype(t, a));
    switch (a.kind) {
      case AggKind::Sum:
        if (s.use_int) b.append_int64(gisum[nisum++]);
        else b.append_float64(gfsum[nfsum++]);
        break;
      case AggKind::Mean: {
        double total = gfsum[nfsum++];
        if (count == 0) {
          throw InvalidArgument("mean of an empty column (zero global count)");
        }
        b.append_float64(total / double(count));
        break;
      }
      case AggKind::Count:
        b.append_int64(count);
        break;
      case AggKind::Min: {
        int64_t iv = s.use_int ? gimin[nimin++] : 0;
        double fv = s.use_int ? 0 : gfmin[nfmin++];
        if (count == 0) b.append_null();
        else if (s.use_int) b.append_int64(iv);
        else b.append_float64(fv);
        break;
      }
      case AggKind::Max: {
        int64_t iv = s.use_int ? gimax[nimax++] : 0;
        double fv = s.use_int ? 0 : gfmax[nfmax++];
        if (count == 0) b.append_null();
        else if (s.use_int) b.append_int64(iv);
        else b.append_float64(fv);
        break;
      }
    }
    fields.push_back({agg_output_name(t, a), b.dtype()});
    cols.push_back(b.finish());
  }
  return Table(Schema(std::move(fields)), std::move(cols));
}

}  // namespace ddf
