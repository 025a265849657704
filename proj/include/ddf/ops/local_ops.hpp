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

#include "ddf/table.hpp"

namespace ddf {

/// Embarrassingly parallel operators: purely local, the distributed result
/// stays partitioned and no communicator is ever touched.

using RowPredicate = std::function<bool(const Table&, int64_t row)>;

/// Rows where the predicate holds, order preserved.
Table select(const Table& t, const RowPredicate& predicate);

/// Keeps `columns` (by position) in the given order.
Table project(const Table& t, std::span<const int> columns);
Table project(const Table& t, std::span<const std::string> columns);

/// Rewrites one column elementwise; the function receives each cell (null
/// included) and must return a scalar of the same dtype or null.
Table map_column(const Table& t, int column,
                 const std::function<Scalar(const Scalar&)>& fn);

}  // namespace ddf
