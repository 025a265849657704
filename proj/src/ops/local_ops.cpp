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

#include "ddf/ops/local_ops.hpp"

namespace ddf {

Table select(const Table& t, const RowPredicate& predicate) {
  std::vector<int64_t> keep;
  for (int64_t r = 0; r < t.num_rows(); r++) {
    if (predicate(t, r)) keep.push_back(r);
  }
  return take_rows(t, keep);
}

Table project(const Table& t, std::span<const int> columns) {
  std::vector<Field> fields;
  std::vector<Column> cols;
  for (int c : columns) {
    if (c < 0 || c >= t.num_columns()) {
      throw InvalidArgument("project: column out of range: " + std::to_string(c));
    }
    fields.push_back(t.schema().field(c));
    cols.push_back(t.column(c));
  }
  return Table(Schema(std::move(fields)), std::move(cols));
}

Table project(const Table& t, std::span<const std::string> columns) {
  std::vector<int> indices;
  indices.reserve(columns.size());
  for (const auto& name : columns) indices.push_back(t.schema().require(name));
  return project(t, indices);
}

Table map_column(const Table& t, int column,
                 const std::function<Scalar(const Scalar&)>& fn) {
  if (column < 0 || column >= t.num_columns()) {
    throw InvalidArgument("map_column: column out of range");
  }
  const Column& src = t.column(column);
  ColumnBuilder b(src.dtype());
  b.reserve(src.length());
  for (int64_t r = 0; r < src.length(); r++) {
    b.append_scalar(fn(src.scalar_at(r)));
  }
  std::vector<Column> cols;
  for (int c = 0; c < t.num_columns(); c++) {
    cols.push_back(c == column ? b.finish() : t.column(c));
  }
  return Table(t.schema(), std::move(cols));
}

}  // namespace ddf
