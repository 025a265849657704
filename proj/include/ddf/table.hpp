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

#pragma once

#include <span>
#include <vector>

#include "ddf/schema.hpp"

namespace ddf {

/// Immutable columnar table. A Table held by one worker is one partition of
/// the virtual distributed dataframe; operators never mutate it in place, so
/// concurrent reads are always safe.
class Table {
 public:
  Table() = default;
  Table(Schema schema, std::vector<Column> columns);

  /// Zero-row table carrying the given schema.
  static Table empty(const Schema& schema);

  const Schema& schema() const { return schema_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  int64_t num_rows() const { return columns_.empty() ? 0 : columns_[0].length(); }
  const Column& column(int i) const { return columns_[i]; }

  /// Same table data with different key designation.
  Table with_keys(std::vector<int> key_indices) const;

 private:
  Schema schema_;
  std::vector<Column> columns_;
};

/// Concatenates parts in order; row order within a part is preserved. All
/// parts must match `schema`. An empty part list yields Table::empty(schema).
Table concat_tables(const Schema& schema, std::span<const Table> parts);

/// Output row i equals input row indices[i]; nulls and strings preserved.
/// Throws InvalidArgument on out-of-range indices.
Table take_rows(const Table& t, std::span<const int64_t> indices);

/// Rows ordered by total lexicographic order over all columns, nulls first.
/// Deterministic; used as the order-insensitive comparison canon.
Table canonical_sort(const Table& t);

/// Lexicographic comparison of row ia of a vs row ib of b over `cols`
/// (column positions, identical in both tables). Nulls sort first and
/// compare equal.
int compare_rows(const Table& a, int64_t ia, const Table& b, int64_t ib,
                 std::span<const int> cols);
bool rows_equal(const Table& a, int64_t ia, const Table& b, int64_t ib,
                std::span<const int> cols);

/// Stable sort permutation of t's rows over `cols` (all columns when empty).
std::vector<int64_t> sort_permutation(const Table& t, std::span<const int> cols);

/// Structural equality: schema names/dtypes, row count, and cell-level
/// values with null == null. Key designation is ignored.
bool table_equals(const Table& a, const Table& b);

/// All column positions of t, in order.
std::vector<int> all_columns(const Table& t);

/// Bytes per row for transfer accounting: fixed widths plus the average
/// string payload of Utf8 columns. Zero-row tables count fixed widths only.
double average_row_bytes(const Table& t);

}  // namespace ddf
