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

#include <cstdint>

#include "ddf/table.hpp"

namespace ddf::bench {

/// splitmix64 step; the entire generator pipeline is pinned to fixed integer
/// arithmetic so identical seeds produce bit-identical tables on every
/// platform.
uint64_t splitmix64(uint64_t& state);

/// Cardinality-controlled random table: key columns (per the schema's key
/// designation, or column 0) draw uniformly from ceil(rows * cardinality)
/// distinct values; remaining columns are unconstrained uniform values of
/// their dtype. Deterministic per seed. Throws when rows * cardinality < 1.
Table generate_table(int64_t rows, const Schema& schema, double cardinality,
                     uint64_t seed);

/// The experiments' usual shape: two Int64 columns (key designated, value
/// free).
Schema two_int64_schema();

}  // namespace ddf::bench
