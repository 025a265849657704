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

#include "ddf/ops/join.hpp"

#include <unordered_map>
#include <unordered_set>

#include "ddf/partition.hpp"

namespace ddf {

namespace {

const char* kind_names[] = {"inner", "left_outer", "right_outer", "full_outer"};
const char* algo_names[] = {"hash_shuffle", "sort_shuffle", "broadcast"};

struct JoinKeys {
  std::vector<int> left;
  std::vector<int> right;
};

JoinKeys validate_keys(const Table& left, const Table& right) {
  JoinKeys keys{left.schema().key_indices(), right.schema().key_indices()};
  if (keys.left.empty() || keys.right.empty()) {
    throw InvalidArgument("join: both sides need designated key columns");
  }
  if (keys.left.size() != keys.right.size()) {
    throw InvalidArgument("join: key column counts differ");
  }
  for (size_t i = 0; i < keys.left.size(); i++) {
    DataType lt = left.schema().field(keys.left[i]).dtype;
    DataType rt = right.schema().field(keys.right[i]).dtype;
    if (lt != rt) {
      throw InvalidArgument(std::string("join: key dtype mismatch: ") +
                            to_string(lt) + " vs " + to_string(rt));
    }
  }
  return keys;
}

bool in(std::span<const int> cols, int c) {
  for (int x : cols) {
    if (x == c) return true;
  }
  return false;
}

/// Emits join output rows given (left row, right row) pairs where -1 marks
/// the null side.
class JoinEmitter {
 public:
  JoinEmitter(const Table& left, const Table& right, const JoinKeys& keys)
      : left_(left), right_(right), keys_(keys),
        schema_(detail::join_output_schema(left, right)) {
    for (int i = 0; i < schema_.num_fields(); i++) {
      builders_.emplace_back(schema_.field(i).dtype);
    }
    for (int c = 0; c < left_.num_columns(); c++) {
      if (!in(keys_.left, c)) left_rest_.push_back(c);
    }
    for (int c = 0; c < right_.num_columns(); c++) {
      if (!in(keys_.right, c)) right_rest_.push_back(c);
    }
  }

  void emit(int64_t lrow, int64_t rrow) {
    size_t b = 0;
    for (size_t k = 0; k < keys_.left.size(); k++, b++) {
      if (lrow >= 0) {
        builders_[b].append_from(left_.column(keys_.left[k]), lrow);
      } else {
        builders_[b].append_from(right_.column(keys_.right[k]), rrow);
      }
    }
    for (int c : left_rest_) {
      if (lrow >= 0) {
        builders_[b].append_from(left_.column(c), lrow);
      } else {
        builders_[b].append_null();
      }
      b++;
    }
    for (int c : right_rest_) {
      if (rrow >= 0) {
        builders_[b].append_from(right_.column(c), rrow);
      } else {
        builders_[b].append_null();
      }
      b++;
    }
  }

  Table finish() {
    std::vector<Column> cols;
    cols.reserve(builders_.size());
    for (auto& b : builders_) cols.push_back(b.finish());
    return Table(schema_, std::move(cols));
  }

 private:
  const Table& left_;
  const Table& right_;
  JoinKeys keys_;
  Schema schema_;
  std::vector<int> left_rest_;
  std::vector<int> right_rest_;
  std::vector<ColumnBuilder> builders_;
};

bool keys_match(const Table& a, int64_t ia, std::span<const int> a_cols,
                const Table& b, int64_t ib, std::span<const int> b_cols) {
  for (size_t k = 0; k < a_cols.size(); k++) {
    if (compare_cells(a.column(a_cols[k]), ia, b.column(b_cols[k]), ib) != 0) {
      return false;
    }
  }
  return true;
}

int compare_keys(const Table& a, int64_t ia, std::span<const int> a_cols,
                 const Table& b, int64_t ib, std::span<const int> b_cols) {
  for (size_t k = 0; k < a_cols.size(); k++) {
    int c = compare_cells(a.column(a_cols[k]), ia, b.column(b_cols[k]), ib);
    if (c != 0) return c;
  }
  return 0;
}

Table local_hash_join(const Table& left, const Table& right, const JoinKeys& keys,
                      JoinKind kind) {
  JoinEmitter emitter(left, right, keys);

  // Build on the smaller side, probe with the larger. Bucket vectors keep
  // insertion order, so output order is deterministic.
  const bool build_left = left.num_rows() <= right.num_rows();
  const Table& build = build_left ? left : right;
  const Table& probe = build_left ? right : left;
  std::span<const int> build_keys = build_left ? keys.left : keys.right;
  std::span<const int> probe_keys = build_left ? keys.right : keys.left;

  std::unordered_map<uint64_t, std::vector<int64_t>> index;
  index.reserve(static_cast<size_t>(build.num_rows()) * 2);
  for (int64_t r = 0; r < build.num_rows(); r++) {
    index[hash_row(build, build_keys, r)].push_back(r);
  }

  const bool keep_left = kind == JoinKind::LeftOuter || kind == JoinKind::FullOuter;
  const bool keep_right = kind == JoinKind::RightOuter || kind == JoinKind::FullOuter;
  const bool keep_probe = build_left ? keep_right : keep_left;
  const bool keep_build = build_left ? keep_left : keep_right;

  std::vector<uint8_t> matched(build.num_rows(), 0);
  for (int64_t pr = 0; pr < probe.num_rows(); pr++) {
    auto it = index.find(hash_row(probe, probe_keys, pr));
    bool any = false;
    if (it != index.end()) {
      for (int64_t br : it->second) {
        if (!keys_match(build, br, build_keys, probe, pr, probe_keys)) continue;
        any = true;
        matched[br] = 1;
        if (build_left) {
          emitter.emit(br, pr);
        } else {
          emitter.emit(pr, br);
        }
      }
    }
    if (!any && keep_probe) {
      if (build_left) {
        emitter.emit(-1, pr);
      } else {
        emitter.emit(pr, -1);
      }
    }
  }
  if (keep_build) {
    for (int64_t br = 0; br < build.num_rows(); br++) {
      if (matched[br]) continue;
      if (build_left) {
        emitter.emit(br, -1);
      } else {
        emitter.emit(-1, br);
      }
    }
  }
  return emitter.finish();
}

Table local_sort_merge_join(const Table& left, const Table& right,
                            const JoinKeys& keys, JoinKind kind) {
  JoinEmitter emitter(left, right, keys);
  std::vector<int64_t> lp = sort_permutation(left, keys.left);
  std::vector<int64_t> rp = sort_permutation(right, keys.right);

  const bool keep_left = kind == JoinKind::LeftOuter || kind == JoinKind::FullOuter;
  const bool keep_right = kind == JoinKind::RightOuter || kind == JoinKind::FullOuter;

  size_t i = 0, j = 0;
  while (i < lp.size() && j < rp.size()) {
    int cmp = compare_keys(left, lp[i], keys.left, right, rp[j], keys.right);
    if (cmp < 0) {
      if (keep_left) emitter.emit(lp[i], -1);
      i++;
    } else if (cmp > 0) {
      if (keep_right) emitter.emit(-1, rp[j]);
      j++;
    } else {
      // Equal-key runs on both sides; emit the cross product.
      size_t i_end = i + 1;
      while (i_end < lp.size() &&
             compare_keys(left, lp[i], keys.left, left, lp[i_end], keys.left) == 0) {
        i_end++;
      }
      size_t j_end = j + 1;
      while (j_end < rp.size() &&
             compare_keys(right, rp[j], keys.right, right, rp[j_end], keys.right) ==
                 0) {
        j_end++;
      }
      for (size_t a = i; a < i_end; a++) {
        for (size_t b = j; b < j_end; b++) emitter.emit(lp[a], rp[b]);
      }
      i = i_end;
      j = j_end;
    }
  }
  if (keep_left) {
    for (; i < lp.size(); i++) emitter.emit(lp[i], -1);
  }
  if (keep_right) {
    for (; j < rp.size(); j++) emitter.emit(-1, rp[j]);
  }
  return emitter.finish();
}

}  // namespace

const char* to_string(JoinKind k) { return kind_names[static_cast<int>(k)]; }
const char* to_string(JoinAlgorithm a) { return algo_names[static_cast<int>(a)]; }

namespace detail {

Schema join_output_schema(const Table& left, const Table& right) {
  JoinKeys keys{left.schema().key_indices(), right.schema().key_indices()};
  std::vector<Field> fields;
  std::unordered_set<std::string> used;
  for (int k : keys.left) {
    fields.push_back(left.schema().field(k));
    used.insert(fields.back().name);
  }
  for (int c = 0; c < left.num_columns(); c++) {
    if (in(keys.left, c)) continue;
    fields.push_back(left.schema().field(c));
    used.insert(fields.back().name);
  }
  for (int c = 0; c < right.num_columns(); c++) {
    if (in(keys.right, c)) continue;
    Field f = right.schema().field(c);
    if (!used.insert(f.name).second) {
      f.name += "_right";
      used.insert(f.name);
    }
    fields.push_back(f);
  }
  return Schema(std::move(fields));
}

Table local_join(const Table& left, const Table& right, JoinKind kind,
                 bool sort_merge) {
  JoinKeys keys = validate_keys(left, right);
  return sort_merge ? local_sort_merge_join(left, right, keys, kind)
                    : local_hash_join(left, right, keys, kind);
}

}  // namespace detail

Table join(comm::WorkerContext& ctx, const Table& left, const Table& right,
           JoinKind kind, JoinAlgorithm algorithm, StageSink* sink) {
  JoinKeys keys = validate_keys(left, right);

  if (algorithm == JoinAlgorithm::Broadcast) {
    // Replicate whichever side is globally smaller.
    int64_t local[2] = {left.num_rows(), right.num_rows()};
    std::vector<int64_t> total =
        comm::allreduce(ctx, std::span<const int64_t>(local, 2),
                        comm::ReduceOp::Sum);
    if (total[1] <= total[0]) {
      return broadcast_join(ctx, left, right, kind, sink);
    }
    // Swap sides, then restore the output column layout of join(left, right).
    JoinKind swapped = kind;
    if (kind == JoinKind::LeftOuter) swapped = JoinKind::RightOuter;
    if (kind == JoinKind::RightOuter) swapped = JoinKind::LeftOuter;
    Table flipped = broadcast_join(ctx, right, left, swapped, sink);

    Schema want = detail::join_output_schema(left, right);
    Schema got = flipped.schema();  // right keys, right rest, left rest
    const int nk = static_cast<int>(keys.left.size());
    const int right_rest = right.num_columns() - nk;
    std::vector<Field> fields;
    std::vector<Column> cols;
    auto push = [&](int from, const Field& f) {
      fields.push_back(f);
      cols.push_back(flipped.column(from));
    };
    for (int k = 0; k < nk; k++) push(k, want.field(k));
    int out = nk;
    for (int c = 0; c < left.num_columns() - nk; c++, out++) {
      push(nk + right_rest + c, want.field(out));
    }
    for (int c = 0; c < right_rest; c++, out++) push(nk + c, want.field(out));
    (void)got;
    return Table(Schema(std::move(fields)), std::move(cols));
  }

  const int p = ctx.world_size();
  PartitionAssignment la, ra;
  {
    StageTimer timer(sink, &ctx, "partition");
    la = hash_partition(left, keys.left, p);
    ra = hash_partition(right, keys.right, p);
  }
  std::vector<Table> lparts, rparts;
  {
    StageTimer timer(sink, &ctx, "split");
    lparts = split(left, la);
    rparts = split(right, ra);
  }
  Table lshuf, rshuf;
  {
    StageTimer timer(sink, &ctx, "shuffle-left");
    lshuf = concat_tables(left.schema(),
                          comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle,
                                                lparts));
  }
  {
    StageTimer timer(sink, &ctx, "shuffle-right");
    rshuf = concat_tables(right.schema(),
                          comm::exchange_tables(ctx, comm::CollectiveKind::Shuffle,
                                                rparts));
  }
  StageTimer timer(sink, &ctx, "local-join");
  lshuf = lshuf.with_keys(keys.left);
  rshuf = rshuf.with_keys(keys.right);
  return detail::local_join(lshuf, rshuf, kind,
                            algorithm == JoinAlgorithm::SortShuffle);
}

Table broadcast_join(comm::WorkerContext& ctx, const Table& large,
                     const Table& small, JoinKind kind, StageSink* sink) {
  JoinKeys keys = validate_keys(large, small);

  Table small_global;
  {
    StageTimer timer(sink, &ctx, "broadcast");
    small_global = comm::allgather_table(ctx, small).with_keys(keys.right);
  }

  StageTimer timer(sink, &ctx, "local-join");
  const bool keep_small =
      kind == JoinKind::RightOuter || kind == JoinKind::FullOuter;
  if (!keep_small) {
    return detail::local_join(large, small_global, kind, false);
  }

  // The replicated side matches locally on some ranks and not others; an
  // unmatched-anywhere row may be emitted only once. Join inner/left first,
  // combine match flags globally, and let rank 0 emit the global leftovers.
  JoinKind inner_part =
      kind == JoinKind::FullOuter ? JoinKind::LeftOuter : JoinKind::Inner;
  Table matched_part = detail::local_join(large, small_global, inner_part, false);

  std::vector<int64_t> local_matched(small_global.num_rows(), 0);
  std::unordered_map<uint64_t, std::vector<int64_t>> index;
  for (int64_t r = 0; r < large.num_rows(); r++) {
    index[hash_row(large, keys.left, r)].push_back(r);
  }
  for (int64_t r = 0; r < small_global.num_rows(); r++) {
    auto it = index.find(hash_row(small_global, keys.right, r));
    if (it == index.end()) continue;
    for (int64_t lr : it->second) {
      if (keys_match(large, lr, keys.left, small_global, r, keys.right)) {
        local_matched[r] = 1;
        break;
      }
    }
  }
  std::vector<int64_t> global_matched =
      comm::allreduce(ctx, std::span<const int64_t>(local_matched),
                      comm::ReduceOp::Max);

  if (ctx.rank() != 0) return matched_part;

  JoinEmitter leftovers(large, small_global, keys);
  for (int64_t r = 0; r < small_global.num_rows(); r++) {
    if (!global_matched[r]) leftovers.emit(-1, r);
  }
  Table extra = leftovers.finish();
  const Table parts[2] = {matched_part, extra};
  return concat_tables(matched_part.schema(), parts);
}

}  // namespace ddf
