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

#include "ddf/table.hpp"

#include <algorithm>
#include <numeric>

namespace ddf {

Table::Table(Schema schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (static_cast<int>(columns_.size()) != schema_.num_fields()) {
    throw InvalidArgument("column count does not match schema arity");
  }
  for (int i = 0; i < num_columns(); i++) {
    if (columns_[i].dtype() != schema_.field(i).dtype) {
      throw InvalidArgument("column dtype does not match schema: " +
                            schema_.field(i).name);
    }
    if (columns_[i].length() != columns_[0].length()) {
      throw InvalidArgument("all columns must share one length");
    }
  }
}

Table Table::empty(const Schema& schema) {
  std::vector<Column> cols;
  cols.reserve(schema.num_fields());
  for (const auto& f : schema.fields()) {
    cols.push_back(ColumnBuilder(f.dtype).finish());
  }
  return Table(schema, std::move(cols));
}

Table Table::with_keys(std::vector<int> key_indices) const {
  return Table(schema_.with_keys(std::move(key_indices)), columns_);
}

Table concat_tables(const Schema& schema, std::span<const Table> parts) {
  for (const auto& p : parts) {
    if (!p.schema().equals(schema)) {
      throw InvalidArgument("concat_tables: schema mismatch");
    }
  }
  std::vector<Column> cols;
  cols.reserve(schema.num_fields());
  for (int c = 0; c < schema.num_fields(); c++) {
    ColumnBuilder b(schema.field(c).dtype);
    for (const auto& p : parts) {
      for (int64_t r = 0; r < p.num_rows(); r++) b.append_from(p.column(c), r);
    }
    cols.push_back(b.finish());
  }
  return Table(schema, std::move(cols));
}

Table take_rows(const Table& t, std::span<const int64_t> indices) {
  for (int64_t i : indices) {
    if (i < 0 || i >= t.num_rows()) {
      throw InvalidArgument("take_rows: index out of range: " + std::to_string(i));
    }
  }
  std::vector<Column> cols;
  cols.reserve(t.num_columns());
  for (int c = 0; c < t.num_columns(); c++) {
    ColumnBuilder b(t.schema().field(c).dtype);
    b.reserve(static_cast<int64_t>(indices.size()));
    for (int64_t i : indices) b.append_from(t.column(c), i);
    cols.push_back(b.finish());
  }
  return Table(t.schema(), std::move(cols));
}

int compare_rows(const Table& a, int64_t ia, const Table& b, int64_t ib,
                 std::span<const int> cols) {
  for (int c : cols) {
    int cmp = compare_cells(a.column(c), ia, b.column(c), ib);
    if (cmp != 0) return cmp;
  }
  return 0;
}

bool rows_equal(const Table& a, int64_t ia, const Table& b, int64_t ib,
                std::span<const int> cols) {
  return compare_rows(a, ia, b, ib, cols) == 0;
}

std::vector<int> all_columns(const Table& t) {
  std::vector<int> cols(t.num_columns());
  std::iota(cols.begin(), cols.end(), 0);
  return cols;
}

std::vector<int64_t> sort_permutation(const Table& t, std::span<const int> cols) {
  std::vector<int> all;
  if (cols.empty()) {
    all = all_columns(t);
    cols = all;
  }
  std::vector<int64_t> perm(t.num_rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int64_t i, int64_t j) {
    return compare_rows(t, i, t, j, cols) < 0;
  });
  return perm;
}

Table canonical_sort(const Table& t) {
  return take_rows(t, sort_permutation(t, {}));
}

double average_row_bytes(const Table& t) {
  double bytes = 0;
  for (int c = 0; c < t.num_columns(); c++) {
    const Column& col = t.column(c);
    if (is_fixed_width(col.dtype())) {
      bytes += fixed_width(col.dtype());
    } else if (t.num_rows() > 0) {
      bytes += double(col.data().size()) / double(t.num_rows());
    }
  }
  return bytes;
}

bool table_equals(const Table& a, const Table& b) {
  if (!a.schema().equals(b.schema()) || a.num_rows() != b.num_rows()) {
    return false;
  }
  for (int c = 0; c < a.num_columns(); c++) {
    for (int64_t r = 0; r < a.num_rows(); r++) {
      if (!cells_equal(a.column(c), r, b.column(c), r)) return false;
    }
  }
  return true;
}

}  // namespace ddf
