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

#include <functional>

#include "ddf/comm/cluster.hpp"
#include "ddf/table.hpp"

namespace ddf::testing {

/// Deterministic pseudo-random stream for test data.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed * 0x9e3779b97f4a7c15ULL + 1) {}

  uint64_t next();
  int64_t range(int64_t lo, int64_t hi);  // inclusive bounds
  double uniform();                       // [0, 1)
  bool chance(double p);

 private:
  uint64_t state_;
};

/// Random schema mixing all four dtypes, 1..5 columns.
Schema random_schema(Rng& rng);

/// Random table over `schema`: keys (schema key columns, or all columns when
/// none designated) draw from a pool of `key_pool` values, every cell is
/// null with probability null_ratio.
Table random_table(Rng& rng, const Schema& schema, int64_t rows,
                   double null_ratio, int64_t key_pool);

/// Contiguous rank-major slices: concat(slices) == t.
std::vector<Table> partition_rows(const Table& t, int world);

/// Order-insensitive table equality via the canonical sort.
bool tables_equal_unordered(const Table& a, const Table& b);

/// Runs `fn` on every rank over the named transport ("local" or "tcp").
void run_world(int world, const std::string& transport,
               const comm::WorkerFn& fn);

/// Distributed run collecting one result table per rank.
std::vector<Table> run_collecting(int world, const std::string& transport,
                                  const std::function<Table(comm::WorkerContext&)>& fn);

}  // namespace ddf::testing
