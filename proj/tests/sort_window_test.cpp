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

#include <doctest.h>

#include "ddf/ops/local_ops.hpp"
#include "ddf/ops/sort.hpp"
#include "ddf/ops/window.hpp"
#include "ddf/serialize.hpp"
#include "support/oracles.hpp"
#include "support/random_tables.hpp"

using namespace ddf;
using testing::Rng;

namespace {

Table kv(const std::vector<int64_t>& ks, const std::vector<int64_t>& vs) {
  ColumnBuilder k(DataType::Int64), v(DataType::Int64);
  for (int64_t x : ks) k.append_int64(x);
  for (int64_t x : vs) v.append_int64(x);
  return Table(Schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0}),
               {k.finish(), v.finish()});
}

void check_sorted_distributed(const Table& global, int world,
                              SortStrategy strategy) {
  auto parts = testing::partition_rows(global, world);
  std::vector<Table> outputs(world);
  testing::run_world(world, "local", [&](comm::WorkerContext& ctx) {
    outputs[ctx.rank()] = sort(ctx, parts[ctx.rank()], 0, strategy);
  });
  // boundary property: concatenation sorted by the key
  CHECK(testing::concatenation_sorted_by(outputs, 0));
  // multiset preserved
  Table got = concat_tables(global.schema(), outputs);
  CHECK(testing::tables_equal_unordered(got, global));
  // key sequence equals the serial sort's key sequence
  const int key_cols[1] = {0};
  Table serial = take_rows(global, sort_permutation(global, key_cols));
  int64_t i = 0;
  for (const auto& part : outputs) {
    for (int64_t r = 0; r < part.num_rows(); r++, i++) {
      CHECK(compare_cells(part.column(0), r, serial.column(0), i) == 0);
    }
  }
}

}  // namespace

TEST_CASE("single rank sort is a plain sort") {
  testing::run_world(1, "local", [](comm::WorkerContext& ctx) {
    Table t = kv({3, 1, 2}, {30, 10, 20});
    for (auto strategy : {SortStrategy::SampleSort, SortStrategy::HistogramRange}) {
      Table out = sort(ctx, t, 0, strategy);
      CHECK(out.column(0).int64_at(0) == 1);
      CHECK(out.column(0).int64_at(1) == 2);
      CHECK(out.column(0).int64_at(2) == 3);
      CHECK(out.column(1).int64_at(0) == 10);
    }
  });
}

TEST_CASE("all-equal keys sort correctly at any parallelism") {
  Table t = kv(std::vector<int64_t>(40, 7),
               [] {
                 std::vector<int64_t> v(40);
                 for (int i = 0; i < 40; i++) v[i] = i;
                 return v;
               }());
  check_sorted_distributed(t, 4, SortStrategy::SampleSort);
  check_sorted_distributed(t, 4, SortStrategy::HistogramRange);
}

TEST_CASE("distributed sort matches the serial sort for both strategies") {
  Rng rng(9091);
  for (int world : {2, 4, 8}) {
    // uniform keys
    Schema schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
    Table uniform = testing::random_table(rng, schema, 3000, 0.0, 500);
    check_sorted_distributed(uniform, world, SortStrategy::SampleSort);
    check_sorted_distributed(uniform, world, SortStrategy::HistogramRange);

    // skewed keys: squares cluster low values
    Table skewed = map_column(uniform, 0, [](const Scalar& s) -> Scalar {
      int64_t v = std::get<int64_t>(s) % 70;
      return v * v;
    });
    check_sorted_distributed(skewed, world, SortStrategy::SampleSort);
    check_sorted_distributed(skewed, world, SortStrategy::HistogramRange);
  }
}

TEST_CASE("sample sort stays correct at fifty thousand rows") {
  Schema schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
  Rng rng(1212);
  Table t = testing::random_table(rng, schema, 50000, 0.0, 45000);
  check_sorted_distributed(t, 8, SortStrategy::SampleSort);
}

TEST_CASE("sort handles null keys first") {
  Rng rng(55);
  Schema schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
  Table t = testing::random_table(rng, schema, 200, 0.2, 25);
  check_sorted_distributed(t, 4, SortStrategy::SampleSort);
}

TEST_CASE("sample sort orders strings too") {
  Rng rng(66);
  Schema schema({{"s", DataType::Utf8}, {"v", DataType::Int64}}, {0});
  Table t = testing::random_table(rng, schema, 400, 0.05, 60);
  check_sorted_distributed(t, 4, SortStrategy::SampleSort);
}

TEST_CASE("histogram range sort rejects non-numeric keys") {
  ColumnBuilder s(DataType::Utf8);
  s.append_utf8("b");
  Table t(Schema({{"s", DataType::Utf8}}, {0}), {s.finish()});
  CHECK_THROWS_AS(
      testing::run_world(1, "local",
                         [&](comm::WorkerContext& ctx) {
                           sort(ctx, t, 0, SortStrategy::HistogramRange);
                         }),
      InvalidArgument);
}

TEST_CASE("sort rejects unknown key columns") {
  testing::run_world(1, "local", [](comm::WorkerContext& ctx) {
    Table t = kv({1}, {2});
    CHECK_THROWS_AS(sort(ctx, t, 9, SortStrategy::SampleSort), InvalidArgument);
  });
}

TEST_CASE("merge of sorted runs is sorted and complete") {
  Rng rng(77);
  Schema schema({{"k", DataType::Int64}}, {0});
  std::vector<Table> runs;
  std::vector<Table> sorted_runs;
  for (int i = 0; i < 5; i++) {
    Table t = testing::random_table(rng, schema, rng.range(0, 50), 0.1, 30);
    sorted_runs.push_back(canonical_sort(t));
    runs.push_back(t);
  }
  Table merged = detail::merge_sorted_runs(schema, sorted_runs, 0);
  Table all = concat_tables(schema, runs);
  CHECK(testing::tables_equal_unordered(merged, all));
  CHECK(testing::concatenation_sorted_by({merged}, 0));
}

TEST_CASE("rolling window w=1 is the identity aggregate") {
  testing::run_world(2, "local", [](comm::WorkerContext& ctx) {
    Table t = ctx.rank() == 0 ? kv({0, 0}, {5, 6}) : kv({0, 0}, {7, 8});
    Table out = rolling_window(ctx, t, 1, 1);
    REQUIRE(out.num_rows() == 2);
    CHECK(out.column(0).int64_at(0) == (ctx.rank() == 0 ? 5 : 7));
    CHECK(out.column(0).int64_at(1) == (ctx.rank() == 0 ? 6 : 8));
  });
}

TEST_CASE("two-rank window fetches exactly one halo row") {
  std::vector<Table> outputs(2);
  std::vector<uint64_t> halo_bytes(2);
  testing::run_world(2, "local", [&](comm::WorkerContext& ctx) {
    Table t = ctx.rank() == 0 ? kv({0, 0}, {1, 2}) : kv({0, 0}, {3, 4});
    outputs[ctx.rank()] = rolling_window(ctx, t, 1, 2);
    halo_bytes[ctx.rank()] = ctx.bytes_sent(comm::CollectiveKind::SendRecv);
  });
  // global sums [null, 3, 5, 7]
  CHECK(outputs[0].column(0).is_null(0));
  CHECK(outputs[0].column(0).int64_at(1) == 3);
  CHECK(outputs[1].column(0).int64_at(0) == 5);
  CHECK(outputs[1].column(0).int64_at(1) == 7);

  // halo = one row (the value 2) from rank 0 to rank 1
  ColumnBuilder b(DataType::Int64);
  b.append_int64(2);
  Table halo(Schema({{"v", DataType::Int64}}), {b.finish()});
  CHECK(halo_bytes[0] == serialize_table(halo).total_bytes());
  CHECK(halo_bytes[1] == 0);
}

TEST_CASE("rolling window matches the serial oracle") {
  Rng rng(88);
  Schema schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
  for (int64_t w : {2, 5, 16}) {
    for (int world : {2, 4}) {
      Table global = testing::random_table(rng, schema, 300, 0.1, 1000);
      Table expected = testing::oracle_rolling_sum(global, 1, w);
      auto parts = testing::partition_rows(global, world);
      std::vector<Table> outputs(world);
      testing::run_world(world, "local", [&](comm::WorkerContext& ctx) {
        outputs[ctx.rank()] = rolling_window(ctx, parts[ctx.rank()], 1, w);
      });
      Table got = concat_tables(outputs[0].schema(), outputs);
      CHECK(table_equals(got, expected));
    }
  }
}

TEST_CASE("window shorter ranks relay older history through the chain") {
  // rank1 holds a single row, so rank2's window must reach rank0's rows
  std::vector<Table> inputs = {kv({0, 0, 0}, {1, 2, 3}), kv({0}, {4}),
                               kv({0, 0}, {5, 6})};
  Table global = concat_tables(inputs[0].schema(), inputs);
  Table expected = testing::oracle_rolling_sum(global, 1, 4);
  std::vector<Table> outputs(3);
  testing::run_world(3, "local", [&](comm::WorkerContext& ctx) {
    outputs[ctx.rank()] = rolling_window(ctx, inputs[ctx.rank()], 1, 4);
  });
  CHECK(table_equals(concat_tables(outputs[0].schema(), outputs), expected));
}

TEST_CASE("window passes history through empty ranks") {
  std::vector<Table> inputs = {kv({0, 0}, {1, 2}), kv({}, {}), kv({0}, {3})};
  Table global = concat_tables(inputs[0].schema(), inputs);
  Table expected = testing::oracle_rolling_sum(global, 1, 3);
  std::vector<Table> outputs(3);
  testing::run_world(3, "local", [&](comm::WorkerContext& ctx) {
    outputs[ctx.rank()] = rolling_window(ctx, inputs[ctx.rank()], 1, 3);
  });
  CHECK(table_equals(concat_tables(outputs[0].schema(), outputs), expected));
}

TEST_CASE("invalid windows are rejected") {
  testing::run_world(1, "local", [](comm::WorkerContext& ctx) {
    Table t = kv({0}, {1});
    CHECK_THROWS_AS(rolling_window(ctx, t, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(rolling_window(ctx, t, 9, 2), InvalidArgument);
  });
}
