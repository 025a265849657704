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

#include "ddf/comm/collectives.hpp"
#include "ddf/ops/stage.hpp"
#include "ddf/table.hpp"

namespace ddf {

/// Halo-exchange pattern: rolling sum over a fixed window of `window` rows
/// ending at each row, with rows globally ordered rank-major. The first
/// window-1 global rows yield null. Boundary rows are fetched from the left
/// neighbor chain via point-to-point send-recv; when every left neighbor
/// holds at least window-1 rows that is exactly min(window-1, neighbor rows)
/// halo rows per boundary. Nulls in the value column add nothing to a
/// window's sum.
///
/// Returns a one-column table "<col>_rolling_sum" aligned with the local
/// rows (Int64 column for Int64 input, Float64 otherwise).
Table rolling_window(comm::WorkerContext& ctx, const Table& t, int value_column,
                     int64_t window, StageSink* sink = nullptr);

}  // namespace ddf
