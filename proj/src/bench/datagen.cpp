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

#include "ddf/bench/datagen.hpp"

#include <cmath>

namespace ddf::bench {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Schema two_int64_schema() {
  return Schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
}

Table generate_table(int64_t rows, const Schema& schema, double cardinality,
                     uint64_t seed) {
  if (rows < 0) throw InvalidArgument("generate_table: negative row count");
  if (cardinality <= 0.0 || cardinality > 1.0) {
    throw InvalidArgument("generate_table: cardinality must be in (0, 1]");
  }
  const int64_t pool = static_cast<int64_t>(std::ceil(double(rows) * cardinality));
  if (rows > 0 && pool < 1) {
    throw InvalidArgument("generate_table: rows * cardinality < 1");
  }

  std::vector<int> key_cols = schema.key_indices();
  if (key_cols.empty() && schema.num_fields() > 0) key_cols.push_back(0);
  auto is_key = [&](int c) {
    for (int k : key_cols) {
      if (k == c) return true;
    }
    return false;
  };

  std::vector<Column> cols;
  for (int c = 0; c < schema.num_fields(); c++) {
    // Independent stream per column keeps values stable if columns are
    // added or reordered.
    uint64_t state = seed * 0x9e3779b97f4a7c15ULL + uint64_t(c) + 1;
    ColumnBuilder b(schema.field(c).dtype);
    b.reserve(rows);
    const bool key = is_key(c);

    // Key columns carry exactly min(pool, rows) distinct values so the
    // empirical cardinality is the requested ratio (cardinality C means C of
    // the rows are unique): the first pool slots enumerate the pool, the
    // rest repeat uniformly, and a shuffle hides the layout.
    std::vector<uint64_t> key_values;
    if (key) {
      key_values.resize(rows);
      for (int64_t r = 0; r < rows; r++) {
        key_values[r] = r < pool ? uint64_t(r)
                                 : splitmix64(state) % uint64_t(pool);
      }
      for (int64_t r = rows - 1; r > 0; r--) {
        std::swap(key_values[r], key_values[splitmix64(state) % uint64_t(r + 1)]);
      }
    }

    for (int64_t r = 0; r < rows; r++) {
      uint64_t x = key ? key_values[r] : splitmix64(state);
      switch (schema.field(c).dtype) {
        case DataType::Int64:
          b.append_int64(key ? int64_t(x) : int64_t(x & 0x7fffffffffffffffULL));
          break;
        case DataType::Float64:
          if (key) {
            b.append_float64(double(x));
          } else {
            b.append_float64(double(x >> 11) * 0x1.0p-53);
          }
          break;
        case DataType::Bool:
          b.append_bool((x & 1) != 0);
          break;
        case DataType::Utf8: {
          char buf[24];
          int len = snprintf(buf, sizeof(buf), "s%llx",
                             static_cast<unsigned long long>(x));
          b.append_utf8(std::string_view(buf, len));
          break;
        }
      }
    }
    cols.push_back(b.finish());
  }
  return Table(schema, std::move(cols));
}

}  // namespace ddf::bench
