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

#include "support/random_tables.hpp"

namespace ddf::testing {

uint64_t Rng::next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int64_t Rng::range(int64_t lo, int64_t hi) {
  return lo + int64_t(next() % uint64_t(hi - lo + 1));
}

double Rng::uniform() { return double(next() >> 11) * 0x1.0p-53; }

bool Rng::chance(double p) { return uniform() < p; }

Schema random_schema(Rng& rng) {
  static const DataType kTypes[] = {DataType::Int64, DataType::Float64,
                                    DataType::Bool, DataType::Utf8};
  int n = int(rng.range(1, 5));
  std::vector<Field> fields;
  for (int i = 0; i < n; i++) {
    fields.push_back({"c" + std::to_string(i), kTypes[rng.range(0, 3)]});
  }
  return Schema(std::move(fields));
}

Table random_table(Rng& rng, const Schema& schema, int64_t rows,
                   double null_ratio, int64_t key_pool) {
  std::vector<int> keys = schema.key_indices();
  auto is_key = [&](int c) {
    if (keys.empty()) return true;
    for (int k : keys) {
      if (k == c) return true;
    }
    return false;
  };
  std::vector<Column> cols;
  for (int c = 0; c < schema.num_fields(); c++) {
    ColumnBuilder b(schema.field(c).dtype);
    for (int64_t r = 0; r < rows; r++) {
      if (null_ratio > 0 && rng.chance(null_ratio)) {
        b.append_null();
        continue;
      }
      uint64_t raw = rng.next();
      int64_t v = is_key(c) ? int64_t(raw % uint64_t(key_pool)) : int64_t(raw % 100000);
      switch (schema.field(c).dtype) {
        case DataType::Int64: b.append_int64(v); break;
        case DataType::Float64: b.append_float64(double(v) * 0.5); break;
        case DataType::Bool: b.append_bool((v & 1) != 0); break;
        case DataType::Utf8: {
          // Occasional awkward strings keep the quoting paths honest.
          switch (v % 7) {
            case 0: b.append_utf8(""); break;
            case 1: b.append_utf8("a,b\"c"); break;
            case 2: b.append_utf8("line\nbreak"); break;
            default: b.append_utf8("s" + std::to_string(v)); break;
          }
          break;
        }
      }
    }
    cols.push_back(b.finish());
  }
  return Table(schema, std::move(cols));
}

std::vector<Table> partition_rows(const Table& t, int world) {
  std::vector<Table> parts;
  const int64_t n = t.num_rows();
  const int64_t base = n / world;
  const int64_t rem = n % world;
  int64_t start = 0;
  for (int r = 0; r < world; r++) {
    int64_t len = base + (r < rem ? 1 : 0);
    std::vector<int64_t> idx(len);
    for (int64_t i = 0; i < len; i++) idx[i] = start + i;
    start += len;
    parts.push_back(take_rows(t, idx).with_keys(t.schema().key_indices()));
  }
  return parts;
}

bool tables_equal_unordered(const Table& a, const Table& b) {
  return table_equals(canonical_sort(a), canonical_sort(b));
}

void run_world(int world, const std::string& transport, const comm::WorkerFn& fn) {
  if (transport == "tcp") {
    comm::run_socket_workers(world, fn);
  } else {
    comm::run_local_workers(world, fn);
  }
}

std::vector<Table> run_collecting(
    int world, const std::string& transport,
    const std::function<Table(comm::WorkerContext&)>& fn) {
  std::vector<Table> results(world);
  run_world(world, transport, [&](comm::WorkerContext& ctx) {
    results[ctx.rank()] = fn(ctx);
  });
  return results;
}

}  // namespace ddf::testing
