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

#include <string>
#include <vector>

#include "ddf/table.hpp"

namespace ddf {

/// Aggregation kinds. Mean decomposes into Sum + Count and divides after the
/// global reduction. Count counts non-null values; Sum over no values yields
/// the additive identity; Min/Max over no values yield null.
enum class AggKind { Sum, Min, Max, Count, Mean };

const char* to_string(AggKind k);

struct Aggregate {
  int column;     // value column position
  AggKind kind;
};

using AggSpec = std::vector<Aggregate>;

/// Output column name for an aggregate, e.g. "sum_price".
std::string agg_output_name(const Table& t, const Aggregate& a);

/// Output dtype: Sum/Min/Max keep the column dtype, Count is Int64, Mean is
/// Float64.
DataType agg_output_dtype(const Table& t, const Aggregate& a);

/// Validates column range and dtype (Sum/Mean require a numeric column).
void validate_agg(const Table& t, const Aggregate& a);

}  // namespace ddf
