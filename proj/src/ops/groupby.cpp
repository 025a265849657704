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

#include "ddf/ops/groupby.hpp"

#include <algorithm>
#include <unordered_map>

#include "ddf/partition.hpp"

namespace ddf {

namespace {

const char* agg_names[] = {"sum", "min", "max", "count", "mean"};
const char* strategy_names[] = {"shuffle_compute", "combine_shuffle_reduce"};

/// Groups rows by key tuple, first-occurrence order.
struct GroupIndex {
  std::vector<int64_t> representative;  // first row of each group
  std::vector<int32_t> group_of_row;
};

GroupIndex build_groups(const Table& t, std::span<const int> keys) {
  GroupIndex g;
  g.group_of_row.resize(t.num_rows());
  std::unordered_map<uint64_t, std::vector<int32_t>> buckets;
  buckets.reserve(static_cast<size_t>(t.num_rows()) * 2);
  for (int64_t r = 0; r < t.num_rows(); r++) {
    auto& bucket = buckets[hash_row(t, keys, r)];
    int32_t group = -1;
    for (int32_t gid : bucket) {
      if (rows_equal(t, g.representative[gid], t, r, keys)) {
        group = gid;
        break;
      }
    }
    if (group < 0) {
      group = static_cast<int32_t>(g.representative.size());
      g.representative.push_back(r);
      bucket.push_back(group);
    }
    g.group_of_row[r] = group;
  }
  return g;
}

/// Accumulator state for one aggregate over a set of groups.
struct AggState {
  Aggregate spec;
  DataType col_dtype;
  std::vector<double> fsum;
  std::vector<int64_t> isum;
  std::vector<int64_t> count;     // non-null contributions
  std::vector<Scalar> extremum;   // Min/Max, monostate until a value arrives

  void init(const Table& t, const Aggregate& a, size_t groups) {
    spec = a;
    col_dtype = t.column(a.column).dtype();
    switch (a.kind) {
      case AggKind::Sum:
        if (col_dtype == DataType::Int64) {
          isum.assign(groups, 0);
        } else {
          fsum.assign(groups, 0.0);
        }
        break;
      case AggKind::Mean:
        fsum.assign(groups, 0.0);
        count.assign(groups, 0);
        break;
      case AggKind::Count:
        count.assign(groups, 0);
        break;
      case AggKind::Min:
      case AggKind::Max:
        extremum.assign(groups, std::monostate{});
        break;
    }
  }

  void accumulate(const Table& t, int64_t row, int32_t group) {
    const Column& col = t.column(spec.column);
    if (col.is_null(row)) return;
    switch (spec.kind) {
      case AggKind::Sum:
        if (col_dtype == DataType::Int64) {
          isum[group] = wrapping_add(isum[group], col.int64_at(row));
        } else {
          fsum[group] += col.float64_at(row);
        }
        break;
      case AggKind::Mean:
        fsum[group] += col.numeric_at(row);
        count[group] += 1;
        break;
      case AggKind::Count:
        count[group] += 1;
        break;
      case AggKind::Min:
      case AggKind::Max: {
        Scalar v = col.scalar_at(row);
        if (scalar_is_null(extremum[group])) {
          extremum[group] = std::move(v);
        } else {
          int cmp = compare_scalars(v, extremum[group]);
          if ((spec.kind == AggKind::Min && cmp < 0) ||
              (spec.kind == AggKind::Max && cmp > 0)) {
            extremum[group] = std::move(v);
          }
        }
        break;
      }
    }
  }

  /// Appends the final value for `group` to `b`.
  void finish_into(ColumnBuilder& b, size_t group) const {
    switch (spec.kind) {
      case AggKind::Sum:
        if (col_dtype == DataType::Int64) {
          b.append_int64(isum[group]);
        } else {
          b.append_float64(fsum[group]);
        }
        break;
      case AggKind::Mean:
        if (count[group] == 0) {
          b.append_null();
        } else {
          b.append_float64(fsum[group] / double(count[group]));
        }
        break;
      case AggKind::Count:
        b.append_int64(count[group]);
        break;
      case AggKind::Min:
      case AggKind::Max:
        b.append_scalar(extremum[group]);
        break;
    }
  }
};

Table fold_groups(const Table& t, std::span<const int> keys, const AggSpec& aggs) {
  for (const auto& a : aggs) validate_agg(t, a);
  GroupIndex groups = build_groups(t, keys);
  const size_t n_groups = groups.representative.size();

  std::vector<AggState> states(aggs.size());
  for (size_t j = 0; j < aggs.size(); j++) states[j].init(t, aggs[j], n_groups);
  for (int64_t r = 0; r < t.num_rows(); r++) {
    for (auto& s : states) s.accumulate(t, r, groups.group_of_row[r]);
  }

  std::vector<Field> fields;
  std::vector<Column> cols;
  for (int k : keys) {
    ColumnBuilder b(t.column(k).dtype());
    for (int64_t rep : groups.representative) b.append_from(t.column(k), rep);
    fields.push_back(t.schema().field(k));
    cols.push_back(b.finish());
  }
  for (size_t j = 0; j < aggs.size(); j++) {
    ColumnBuilder b(agg_output_dtype(t, aggs[j]));
    for (size_t g = 0; g < n_groups; g++) states[j].finish_into(b, g);
    std::string name = agg_output_name(t, aggs[j]);
    while (std::any_of(fields.begin(), fields.end(),
                       [&](const Field& f) { return f.name == name; })) {
      name += "_";  // duplicate agg on one column (e.g. mean's sum + sum)
    }
    fields.push_back({std::move(name), b.dtype()});
    cols.push_back(b.finish());
  }
  return Table(Schema(std::move(fields)), std::move(cols));
}

/// Fold spec applied to the shuffled intermediate table: every partial
/// column folds with plain Sum/Min/Max (a Mean travels as sum + count, both
/// folded by Sum).
AggSpec partial_fold_spec(const AggSpec& aggs, int n_keys) {
  AggSpec partials;
  int next = n_keys;
  for (const auto& a : aggs) {
    switch (a.kind) {
      case AggKind::Sum:
      case AggKind::Count:
        partials.push_back({next++, AggKind::Sum});
        break;
      case AggKind::Min:
        partials.push_back({next++, AggKind::Min});
        break;
      case AggKind::Max:
        partials.push_back({next++, AggKind::Max});
        break;
      case AggKind::Mean:
        partials.push_back({next++, AggKind::Sum});
        partials.push_back({next++, AggKind::Sum});
        break;
    }
  }
  return partials;
}

}  // namespace

const char* to_string(AggKind k) { return agg_names[static_cast<int>(k)]; }
const char* to_string(GroupByStrategy s) {
  return strategy_names[static_cast<int>(s)];
}

std::string agg_output_name(const Table& t, const Aggregate& a) {
  return std::string(to_string(a.kind)) + "_" + t.schema().field(a.column).name;
}

DataType agg_output_dtype(const Table& t, const Aggregate& a) {
  switch (a.kind) {
    case AggKind::Count: return DataType::Int64;
    case AggKind::Mean: return DataType::Float64;
    default: return t.column(a.column).dtype();
  }
}

void validate_agg(const Table& t, const Aggregate& a) {
  if (a.column < 0 || a.column >= t.num_columns()) {
    throw InvalidArgument("aggregate column out of range");
  }
  DataType dtype = t.column(a.column).dtype();
  if ((a.kind == AggKind::Sum || a.kind == AggKind::Mean) && !is_numeric(dtype)) {
    throw InvalidArgument(std::string(to_string(a.kind)) +
                          " requires a numeric column, got " + to_string(dtype) +
                          " for " + t.schema().field(a.column).name);
  }
}

namespace detail {

Table local_groupby(const Table& t, std::span<const int> keys, const AggSpec& aggs) {
  return fold_groups(t, keys, aggs);
}

}  // namespace detail

Table groupby(comm::WorkerContext& ctx, const Table& t, std::span<const int> keys,
              const AggSpec& aggs, GroupByStrategy strategy, StageSink* sink) {
  if (keys.empty()) throw InvalidArgument("groupby: need at least one key");
  for (const auto& a : aggs) validate_agg(t, a);
  const int p = ctx.world_size();

  if (strategy == GroupByStrategy::ShuffleCompute) {
    PartitionAssignment assignment;
    std::vector<Table> parts;
    {
      StageTimer timer(sink, &ctx, "partition");
      assignment = hash_partition(t, keys, p);
    }
    {
      StageTimer timer(sink, &ctx, "split");
      parts = split(t, assignment);
    }
    Table shuffled;
    {
      StageTimer timer(sink, &ctx, "shuffle");
      shuffled = concat_tables(
          t.schema(),
          comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle, parts));
    }
    StageTimer timer(sink, &ctx, "local-groupby");
    return fold_groups(shuffled, keys, aggs);
  }

  // Combine-shuffle-reduce: local partials, shuffle the intermediate table,
  // fold partials, then finalize (Mean divides after the global fold).
  AggSpec combine_aggs;
  for (const auto& a : aggs) {
    if (a.kind == AggKind::Mean) {
      combine_aggs.push_back({a.column, AggKind::Sum});
      combine_aggs.push_back({a.column, AggKind::Count});
    } else {
      combine_aggs.push_back(a);
    }
  }
  Table partial;
  {
    StageTimer timer(sink, &ctx, "combine");
    // Rename intermediate columns positionally to dodge collisions between
    // e.g. sum_v and the pair backing mean_v.
    Table folded = fold_groups(t, keys, combine_aggs);
    std::vector<Field> fields;
    for (int c = 0; c < folded.num_columns(); c++) {
      Field f = folded.schema().field(c);
      if (c >= static_cast<int>(keys.size())) {
        f.name = "p" + std::to_string(c);
        while (folded.schema().index_of(f.name) >= 0) f.name += "_";
      }
      fields.push_back(std::move(f));
    }
    std::vector<Column> cols;
    for (int c = 0; c < folded.num_columns(); c++) cols.push_back(folded.column(c));
    partial = Table(Schema(std::move(fields)), std::move(cols));
  }

  std::vector<int> partial_keys(keys.size());
  for (size_t i = 0; i < keys.size(); i++) partial_keys[i] = static_cast<int>(i);

  PartitionAssignment assignment;
  std::vector<Table> parts;
  {
    StageTimer timer(sink, &ctx, "partition");
    assignment = hash_partition(partial, partial_keys, p);
  }
  {
    StageTimer timer(sink, &ctx, "split");
    parts = split(partial, assignment);
  }
  Table shuffled;
  {
    StageTimer timer(sink, &ctx, "shuffle");
    shuffled = concat_tables(
        partial.schema(),
        comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle, parts));
  }

  StageTimer timer(sink, &ctx, "reduce");
  AggSpec fold_spec = partial_fold_spec(aggs, static_cast<int>(keys.size()));
  Table folded = fold_groups(shuffled, partial_keys, fold_spec);

  // Finalize: rename to the public output names; Mean divides sum by count.
  std::vector<Field> fields;
  std::vector<Column> cols;
  auto push_field = [&](std::string name, DataType dtype) {
    while (std::any_of(fields.begin(), fields.end(),
                       [&](const Field& f) { return f.name == name; })) {
      name += "_";
    }
    fields.push_back({std::move(name), dtype});
  };
  for (size_t i = 0; i < keys.size(); i++) {
    fields.push_back({t.schema().field(keys[i]).name,
                      folded.schema().field(int(i)).dtype});
    cols.push_back(folded.column(int(i)));
  }
  int folded_col = static_cast<int>(keys.size());
  for (size_t j = 0; j < aggs.size(); j++) {
    const Aggregate& a = aggs[j];
    if (a.kind == AggKind::Mean) {
      const Column& sums = folded.column(folded_col++);
      const Column& counts = folded.column(folded_col++);
      ColumnBuilder b(DataType::Float64);
      for (int64_t g = 0; g < folded.num_rows(); g++) {
        if (counts.int64_at(g) == 0) {
          b.append_null();
        } else {
          b.append_float64(sums.numeric_at(g) / double(counts.int64_at(g)));
        }
      }
      push_field(agg_output_name(t, a), DataType::Float64);
      cols.push_back(b.finish());
    } else {
      push_field(agg_output_name(t, a), folded.schema().field(folded_col).dtype);
      cols.push_back(folded.column(folded_col));
      folded_col++;
    }
  }
  return Table(Schema(std::move(fields)), std::move(cols));
}

}  // namespace ddf
