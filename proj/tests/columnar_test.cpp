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

#include "ddf/table.hpp"
#include "support/random_tables.hpp"

using namespace ddf;
using testing::Rng;

namespace {

Table int64_table(const std::string& name, const std::vector<int64_t>& values) {
  ColumnBuilder b(DataType::Int64);
  for (int64_t v : values) b.append_int64(v);
  return Table(Schema({{name, DataType::Int64}}), {b.finish()});
}

}  // namespace

TEST_CASE("builder produces valid columns with nulls") {
  ColumnBuilder b(DataType::Utf8);
  b.append_utf8("hello");
  b.append_null();
  b.append_utf8("");
  Column col = b.finish();
  CHECK(col.length() == 3);
  CHECK(col.has_validity());
  CHECK(col.utf8_at(0) == "hello");
  CHECK(col.is_null(1));
  CHECK_FALSE(col.is_null(2));
  CHECK(col.utf8_at(2) == "");
  CHECK(col.null_count() == 1);
  // offsets monotone, start 0, end = data size
  CHECK(col.offsets().front() == 0);
  CHECK(col.offsets().back() == int64_t(col.data().size()));
}

TEST_CASE("column invariants are enforced") {
  CHECK_THROWS_AS(Column(DataType::Int64, 2, {}, {}, std::vector<uint8_t>(8)),
                  InvalidArgument);
  CHECK_THROWS_AS(Column(DataType::Utf8, 1, {}, {0, 5}, std::vector<uint8_t>(3)),
                  InvalidArgument);
  CHECK_THROWS_AS(Column(DataType::Utf8, 1, {}, {0, -1}, {}), InvalidArgument);
  // a one-byte bitmap cannot cover nine rows
  CHECK_THROWS_AS(Column(DataType::Int64, 9, std::vector<uint8_t>(1), {},
                         std::vector<uint8_t>(72)),
                  InvalidArgument);
}

TEST_CASE("schema rejects duplicates and bad keys") {
  CHECK_THROWS_AS(Schema({{"a", DataType::Int64}, {"a", DataType::Bool}}),
                  InvalidArgument);
  CHECK_THROWS_AS(Schema({{"a", DataType::Int64}}, {3}), InvalidArgument);
  Schema s({{"a", DataType::Int64}, {"b", DataType::Utf8}}, {1});
  CHECK(s.index_of("b") == 1);
  CHECK(s.index_of("zz") == -1);
  CHECK_THROWS_AS(s.require("zz"), InvalidArgument);
}

TEST_CASE("concat of empty list yields empty table with schema") {
  Schema s({{"k", DataType::Int64}});
  Table out = concat_tables(s, {});
  CHECK(out.num_rows() == 0);
  CHECK(out.schema().equals(s));
}

TEST_CASE("concat preserves order and counts") {
  Table a = int64_table("k", {1, 2});
  Table b = int64_table("k", {3});
  const Table parts[2] = {a, b};
  Table out = concat_tables(a.schema(), parts);
  REQUIRE(out.num_rows() == 3);
  CHECK(out.column(0).int64_at(0) == 1);
  CHECK(out.column(0).int64_at(1) == 2);
  CHECK(out.column(0).int64_at(2) == 3);
}

TEST_CASE("concat rejects mismatched schemas") {
  Table a = int64_table("k", {1});
  Table b = int64_table("other", {2});
  const Table parts[2] = {a, b};
  CHECK_THROWS_AS(concat_tables(a.schema(), parts), InvalidArgument);
}

TEST_CASE("concat of random parts preserves the row multiset") {
  Rng rng(77);
  Schema schema = testing::random_schema(rng);
  std::vector<Table> parts;
  for (int i = 0; i < 8; i++) {
    parts.push_back(testing::random_table(rng, schema, rng.range(0, 40), 0.1, 50));
  }
  Table all = concat_tables(schema, parts);
  int64_t total = 0;
  for (const auto& p : parts) total += p.num_rows();
  CHECK(all.num_rows() == total);
  // Multiset check: canonical sort of concat equals canonical sort of
  // manual append in any other order.
  std::vector<Table> reversed(parts.rbegin(), parts.rend());
  Table all_rev = concat_tables(schema, reversed);
  CHECK(testing::tables_equal_unordered(all, all_rev));
}

TEST_CASE("take_rows basics") {
  Table t = int64_table("k", {10, 20, 30});
  CHECK(take_rows(t, {}).num_rows() == 0);
  const int64_t idx[2] = {2, 0};
  Table out = take_rows(t, idx);
  REQUIRE(out.num_rows() == 2);
  CHECK(out.column(0).int64_at(0) == 30);
  CHECK(out.column(0).int64_at(1) == 10);
  const int64_t bad[1] = {3};
  CHECK_THROWS_AS(take_rows(t, bad), InvalidArgument);
}

TEST_CASE("take_rows round-trips through a permutation and its inverse") {
  Rng rng(5);
  Schema schema = testing::random_schema(rng);
  Table t = testing::random_table(rng, schema, 64, 0.15, 30);
  std::vector<int64_t> perm(t.num_rows());
  for (size_t i = 0; i < perm.size(); i++) perm[i] = int64_t(i);
  for (size_t i = perm.size(); i > 1; i--) {
    std::swap(perm[i - 1], perm[rng.range(0, int64_t(i - 1))]);
  }
  std::vector<int64_t> inverse(perm.size());
  for (size_t i = 0; i < perm.size(); i++) inverse[perm[i]] = int64_t(i);
  Table back = take_rows(take_rows(t, perm), inverse);
  CHECK(table_equals(back, t));
}

TEST_CASE("canonical_sort orders rows lexicographically, nulls first") {
  ColumnBuilder k(DataType::Int64), v(DataType::Utf8);
  k.append_int64(2);
  v.append_utf8("b");
  k.append_int64(1);
  v.append_utf8("a");
  k.append_int64(2);
  v.append_utf8("a");
  Table t(Schema({{"k", DataType::Int64}, {"v", DataType::Utf8}}),
          {k.finish(), v.finish()});
  Table sorted = canonical_sort(t);
  CHECK(sorted.column(0).int64_at(0) == 1);
  CHECK(sorted.column(0).int64_at(1) == 2);
  CHECK(sorted.column(1).utf8_at(1) == "a");
  CHECK(sorted.column(1).utf8_at(2) == "b");

  // already sorted -> unchanged
  CHECK(table_equals(canonical_sort(sorted), sorted));
}

TEST_CASE("canonical_sort puts nulls before values") {
  ColumnBuilder k(DataType::Int64);
  k.append_int64(5);
  k.append_null();
  k.append_int64(-1);
  Table t(Schema({{"k", DataType::Int64}}), {k.finish()});
  Table sorted = canonical_sort(t);
  CHECK(sorted.column(0).is_null(0));
  CHECK(sorted.column(0).int64_at(1) == -1);
  CHECK(sorted.column(0).int64_at(2) == 5);
}

TEST_CASE("canonical_sort is permutation invariant") {
  Rng rng(11);
  for (int seed = 0; seed < 20; seed++) {
    Schema schema = testing::random_schema(rng);
    Table t = testing::random_table(rng, schema, 50, 0.2, 10);
    std::vector<int64_t> perm(t.num_rows());
    for (size_t i = 0; i < perm.size(); i++) perm[i] = int64_t(i);
    for (size_t i = perm.size(); i > 1; i--) {
      std::swap(perm[i - 1], perm[rng.range(0, int64_t(i - 1))]);
    }
    Table shuffled = take_rows(t, perm);
    CHECK(table_equals(canonical_sort(shuffled), canonical_sort(t)));
  }
}

TEST_CASE("utf8 offsets stay monotone through take and concat") {
  Rng rng(13);
  Schema schema({{"s", DataType::Utf8}});
  for (int seed = 0; seed < 10; seed++) {
    Table t = testing::random_table(rng, schema, 40, 0.3, 20);
    std::vector<int64_t> idx;
    for (int64_t i = 0; i < t.num_rows(); i += 2) idx.push_back(i);
    Table taken = take_rows(t, idx);
    const Table parts[2] = {taken, t};
    Table merged = concat_tables(schema, parts);
    auto offsets = merged.column(0).offsets();
    for (size_t i = 1; i < offsets.size(); i++) {
      CHECK(offsets[i] >= offsets[i - 1]);
    }
  }
}
