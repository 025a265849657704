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

#include "ddf/ops/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddf/csv.hpp"

namespace ddf {

namespace {

CsvData read_csv_data(const std::string& path, int rank) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("rank " + std::to_string(rank) + ": cannot open file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

/// Per-column dtype votes: which dtypes each rank's non-null cells admit.
/// The lattice join across ranks widens Int64 -> Float64 -> Utf8, with Bool
/// only surviving when every rank saw pure booleans.
DataType join_dtype(int64_t ints, int64_t floats, int64_t bools, int64_t utf8s) {
  if (utf8s > 0) return DataType::Utf8;
  if (bools > 0) return (ints + floats) > 0 ? DataType::Utf8 : DataType::Bool;
  if (floats > 0) return DataType::Float64;
  if (ints > 0) return DataType::Int64;
  return DataType::Utf8;  // no rank saw a value at all
}

Table read_assigned_files(comm::WorkerContext& ctx,
                          const std::vector<std::string>& mine, StageSink* sink) {
  const int me = ctx.rank();
  const int p = ctx.world_size();

  CsvData merged;
  bool have_file = false;
  {
    StageTimer timer(sink, &ctx, "read-files");
    std::vector<CsvData> datas;
    for (const auto& path : mine) {
      datas.push_back(read_csv_data(path, me));
      if (datas.size() > 1 && datas.back().header != datas.front().header) {
        throw IoError("rank " + std::to_string(me) +
                      ": inconsistent csv headers across files (" + mine.front() +
                      " vs " + path + ")");
      }
    }
    if (!datas.empty()) {
      // Joint inference over all local rows so one file's all-null column
      // can be typed by another file's values.
      merged.header = datas.front().header;
      for (auto& d : datas) {
        for (auto& row : d.rows) merged.rows.push_back(std::move(row));
      }
      have_file = true;
    }
  }

  // Schema agreement: per-column dtype votes are combined globally, then the
  // lowest file-holding rank broadcasts the joined schema. Ranks without
  // files return an empty table with the agreed schema.
  StageTimer timer(sink, &ctx, "schema-agreement");
  int64_t holder[1] = {have_file ? int64_t(me) : int64_t(p)};
  std::vector<int64_t> lowest =
      comm::allreduce(ctx, std::span<const int64_t>(holder, 1), comm::ReduceOp::Min);
  if (lowest[0] == p) {
    throw InvalidArgument("read_csv_partitioned: no input files at all");
  }
  const int root = static_cast<int>(lowest[0]);

  int64_t local_cols[1] = {have_file ? int64_t(merged.header.size()) : 0};
  std::vector<int64_t> max_cols = comm::allreduce(
      ctx, std::span<const int64_t>(local_cols, 1), comm::ReduceOp::Max);
  const int64_t ncols = max_cols[0];
  if (have_file && int64_t(merged.header.size()) != ncols) {
    throw IoError("rank " + std::to_string(me) +
                  ": csv header arity disagrees across ranks");
  }

  std::vector<int64_t> votes(ncols * 4, 0);
  if (have_file) {
    Schema inferred = infer_csv_schema(merged);
    for (int64_t c = 0; c < ncols; c++) {
      bool any_value = false;
      for (const auto& row : merged.rows) {
        if (row[c]) {
          any_value = true;
          break;
        }
      }
      if (!any_value) continue;  // all-null column casts no vote
      switch (inferred.field(int(c)).dtype) {
        case DataType::Int64: votes[c * 4 + 0] = 1; break;
        case DataType::Float64: votes[c * 4 + 1] = 1; break;
        case DataType::Bool: votes[c * 4 + 2] = 1; break;
        case DataType::Utf8: votes[c * 4 + 3] = 1; break;
      }
    }
  }
  std::vector<int64_t> tally =
      comm::allreduce(ctx, std::span<const int64_t>(votes), comm::ReduceOp::Sum);

  Table probe;
  if (me == root) {
    std::vector<Field> fields;
    for (int64_t c = 0; c < ncols; c++) {
      fields.push_back({merged.header[c],
                        join_dtype(tally[c * 4 + 0], tally[c * 4 + 1],
                                   tally[c * 4 + 2], tally[c * 4 + 3])});
    }
    probe = Table::empty(Schema(std::move(fields)));
  }
  Table agreed = comm::broadcast_table(ctx, probe, root);
  if (!have_file) {
    return Table::empty(agreed.schema());
  }
  for (int c = 0; c < agreed.num_columns(); c++) {
    if (agreed.schema().field(c).name != merged.header[c]) {
      throw IoError("rank " + std::to_string(me) +
                    ": csv header disagrees with rank " + std::to_string(root) +
                    " ('" + merged.header[c] + "' vs '" +
                    agreed.schema().field(c).name + "')");
    }
  }
  return csv_to_table(merged, agreed.schema());
}

}  // namespace

Table read_csv_partitioned(comm::WorkerContext& ctx,
                           const std::vector<std::string>& paths, StageSink* sink) {
  // Round-robin file assignment: rank r takes files r, r+P, ...
  std::vector<std::string> mine;
  for (size_t i = ctx.rank(); i < paths.size(); i += ctx.world_size()) {
    mine.push_back(paths[i]);
  }
  return read_assigned_files(ctx, mine, sink);
}

Table read_csv_partitioned(comm::WorkerContext& ctx,
                           const std::vector<std::vector<std::string>>& per_rank,
                           StageSink* sink) {
  if (static_cast<int>(per_rank.size()) != ctx.world_size()) {
    throw InvalidArgument("read_csv_partitioned: need one file list per rank");
  }
  return read_assigned_files(ctx, per_rank[ctx.rank()], sink);
}

std::string write_csv_partitioned(comm::WorkerContext& ctx, const Table& t,
                                  const std::string& out_dir, StageSink* sink) {
  std::string path;
  {
    StageTimer timer(sink, &ctx, "write-file");
    std::filesystem::create_directories(out_dir);
    char name[32];
    snprintf(name, sizeof(name), "part-%05d.csv", ctx.rank());
    path = out_dir + "/" + name;
    write_csv_file(t, path);
  }
  // Every file is on disk once any rank returns.
  comm::barrier(ctx);
  return path;
}

}  // namespace ddf
