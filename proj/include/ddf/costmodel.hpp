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

#include <optional>
#include <string>

#include "ddf/comm/types.hpp"
#include "ddf/error.hpp"

namespace ddf::cost {

/// Inputs to the analytic estimator. alpha/beta are the point-to-point
/// latency and per-byte transfer time (T = alpha + n*beta); gamma prices
/// reduction work per byte and kappa prices one row-unit of local compute.
/// Asymptotic terms evaluate with unit constants, so predictions are shapes
/// and orderings unless alpha/beta/kappa come from calibration.
struct CostParams {
  double alpha = 0;      // seconds per message
  double beta = 0;       // seconds per byte
  double gamma = 0;      // seconds per byte of reduction work
  double kappa = 0;      // seconds per row-unit of local compute
  int parallelism = 1;   // P
  double total_rows = 0; // N
  int columns = 1;       // c
  double row_bytes = 0;
  std::optional<double> cardinality;  // C in [1/N, 1]
  double window_rows = 1;             // halo width for windowed patterns

  double rows_per_worker() const { return total_rows / parallelism; }
  double payload_bytes() const { return rows_per_worker() * row_bytes; }
};

struct CostBreakdown {
  double startup = 0;   // seconds
  double transfer = 0;  // seconds
  double reduce = 0;    // seconds
  double compute = 0;   // seconds
  double predicted_bytes = 0;

  double total() const { return startup + transfer + reduce + compute; }
};

/// Collective algorithms with tabulated complexities. Validity depends on
/// the collective: AllToAll admits IsendIrecv/Ring/PairwiseExchange/Bruck,
/// AllGather admits Ring/RecursiveDoubling/Bruck, Broadcast admits
/// BinomialTree/ScatterAllGather, Reduce admits BinomialTree/
/// ReduceScatterGather, AllReduce admits BinomialTree/RecursiveDoubling/
/// ReduceScatterAllGather.
enum class AlgorithmKind {
  IsendIrecv,
  Ring,
  PairwiseExchange,
  Bruck,
  RecursiveDoubling,
  BinomialTree,
  ScatterAllGather,
  ReduceScatterGather,
  ReduceScatterAllGather,
};

const char* to_string(AlgorithmKind a);

/// Core local operators with known cost and output-size rows.
enum class LocalOpKind {
  SelectionMap,
  RowAggregation,
  Projection,
  Union,
  SetDifference,
  HashJoin,
  SortJoin,
  Transpose,
  Unique,
  GroupBy,
  ColumnAggregation,
  Sort,
};

const char* to_string(LocalOpKind op);
LocalOpKind local_op_from_string(const std::string& name);

enum class PatternKind {
  EmbarrassinglyParallel,
  ShuffleComputeHash,
  ShuffleComputeRange,
  SampleShuffleCompute,
  CombineShuffleReduce,
  GloballyReduce,
  BroadcastCompute,
  HaloExchange,
};

const char* to_string(PatternKind p);

/// Point-to-point message time: alpha + msg_bytes * beta.
double p2p_time(double msg_bytes, const CostParams& params);

/// Non-blocking send/receive shuffle: startup (P-1)*alpha, transfer
/// ((P-1)/P) * n * row_bytes * beta. One of the P iterations is a local
/// transfer, so P=1 costs nothing.
CostBreakdown shuffle_time(const CostParams& params);

/// Evaluates one tabulated (collective, algorithm) complexity row at
/// msg_bytes of per-worker payload, using ceil(log2 P) for log terms and
/// P-1 for linear terms so single-worker worlds cost zero. Throws listing
/// the valid rows when the pair is not tabulated.
CostBreakdown collective_time(comm::CollectiveKind kind, AlgorithmKind algo,
                              double msg_bytes, const CostParams& params);

struct LocalOpCost {
  double compute = 0;     // seconds
  double output_rows = 0;
};

/// kappa-scaled local operator cost and output size. Cardinality-dependent
/// rows (Union, HashJoin, SortJoin, Unique, GroupBy) require
/// params.cardinality.
LocalOpCost local_op_cost(LocalOpKind op, const CostParams& params);

/// Total cost of one operator pattern around the given core local operator,
/// composed stage by stage (partition/aux compute, the pattern's collective
/// terms, core local cost). Throws on pairings the pattern taxonomy does
/// not admit (e.g. a join core under EmbarrassinglyParallel).
CostBreakdown pattern_cost(PatternKind pattern, const CostParams& params,
                           LocalOpKind core);

/// Cardinality where CombineShuffleReduce and ShuffleComputeHash cost the
/// same for this core, by bisection on C in [1/N, 1]; returns 1 when combine
/// never loses and 1/N when it never wins. Combine wins below the returned
/// value.
double crossover_cardinality(const CostParams& params, LocalOpKind core);

}  // namespace ddf::cost
