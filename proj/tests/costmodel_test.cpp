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

#include <doctest.h>

#include <cmath>

#include "ddf/costmodel.hpp"

using namespace ddf;
using namespace ddf::cost;
using comm::CollectiveKind;

namespace {

CostParams base_params() {
  CostParams p;
  p.alpha = 1e-6;
  p.beta = 1e-9;
  p.gamma = 1e-9;
  p.kappa = 1e-8;
  p.parallelism = 4;
  p.total_rows = 4000;
  p.columns = 2;
  p.row_bytes = 16;
  p.cardinality = 0.9;
  return p;
}

}  // namespace

TEST_CASE("p2p time is alpha plus bytes times beta") {
  CostParams p;
  p.alpha = 1e-6;
  p.beta = 1e-9;
  CHECK(p2p_time(0, p) == 1e-6);
  p.alpha = 0;
  CHECK(p2p_time(1e9, p) == doctest::Approx(1.0));
  // monotone in the message size
  p.alpha = 1e-6;
  CHECK(p2p_time(2000, p) > p2p_time(1000, p));
  CHECK_THROWS_AS(p2p_time(-1, p), InvalidArgument);
}

TEST_CASE("shuffle time matches the closed form") {
  // P=1: no remote transfer at all
  CostParams solo = base_params();
  solo.parallelism = 1;
  CostBreakdown none = shuffle_time(solo);
  CHECK(none.startup == 0);
  CHECK(none.transfer == 0);
  CHECK(none.predicted_bytes == 0);

  // P=4, 1000-byte payload, alpha=1e-6, beta=1e-9:
  // startup 3e-6, transfer 7.5e-7, total 3.75e-6
  CostParams p = base_params();
  p.parallelism = 4;
  p.total_rows = 4000;  // 1000 rows/worker
  p.row_bytes = 1.0;    // 1000 B payload per worker
  p.kappa = 0;
  CostBreakdown b = shuffle_time(p);
  CHECK(b.startup == doctest::Approx(3e-6).epsilon(1e-12));
  CHECK(b.transfer == doctest::Approx(7.5e-7).epsilon(1e-12));
  CHECK(b.total() == doctest::Approx(3.75e-6).epsilon(1e-12));
  CHECK(b.predicted_bytes == doctest::Approx(750.0));
}

TEST_CASE("bruck all-to-all evaluates its tabulated row") {
  CostParams p = base_params();
  p.parallelism = 8;
  CostBreakdown b =
      collective_time(CollectiveKind::Shuffle, AlgorithmKind::Bruck, 1024, p);
  CHECK(b.startup == doctest::Approx(3e-6));             // ceil(log2 8) = 3
  CHECK(b.transfer == doctest::Approx(3 * 512 * 1e-9));  // log P * n/2 * beta
}

TEST_CASE("single-worker worlds cost nothing for every algorithm") {
  CostParams p = base_params();
  p.parallelism = 1;
  struct Row {
    CollectiveKind kind;
    AlgorithmKind algo;
  };
  const Row rows[] = {
      {CollectiveKind::Shuffle, AlgorithmKind::IsendIrecv},
      {CollectiveKind::Shuffle, AlgorithmKind::Ring},
      {CollectiveKind::Shuffle, AlgorithmKind::PairwiseExchange},
      {CollectiveKind::Shuffle, AlgorithmKind::Bruck},
      {CollectiveKind::AllGather, AlgorithmKind::Ring},
      {CollectiveKind::AllGather, AlgorithmKind::RecursiveDoubling},
      {CollectiveKind::AllGather, AlgorithmKind::Bruck},
      {CollectiveKind::Broadcast, AlgorithmKind::BinomialTree},
      {CollectiveKind::Broadcast, AlgorithmKind::ScatterAllGather},
      {CollectiveKind::Reduce, AlgorithmKind::BinomialTree},
      {CollectiveKind::Reduce, AlgorithmKind::ReduceScatterGather},
      {CollectiveKind::AllReduce, AlgorithmKind::BinomialTree},
      {CollectiveKind::AllReduce, AlgorithmKind::RecursiveDoubling},
      {CollectiveKind::AllReduce, AlgorithmKind::ReduceScatterAllGather},
  };
  for (const auto& row : rows) {
    CostBreakdown b = collective_time(row.kind, row.algo, 4096, p);
    CHECK(b.total() == 0);
  }
}

TEST_CASE("linear startup dominates log startup from P=4 up") {
  for (int p_val : {4, 8, 16, 64}) {
    CostParams p = base_params();
    p.parallelism = p_val;
    double linear = collective_time(CollectiveKind::Shuffle,
                                    AlgorithmKind::IsendIrecv, 0, p)
                        .startup;
    double lg = collective_time(CollectiveKind::Shuffle, AlgorithmKind::Bruck, 0, p)
                    .startup;
    CHECK(linear > lg);
  }
}

TEST_CASE("startup growth classes match the tabulated complexity") {
  enum class Growth { Linear, Log, LogPlusLinear };
  struct Row {
    CollectiveKind kind;
    AlgorithmKind algo;
    Growth growth;
  };
  const Row rows[] = {
      {CollectiveKind::Shuffle, AlgorithmKind::IsendIrecv, Growth::Linear},
      {CollectiveKind::Shuffle, AlgorithmKind::Ring, Growth::Linear},
      {CollectiveKind::Shuffle, AlgorithmKind::PairwiseExchange, Growth::Linear},
      {CollectiveKind::Shuffle, AlgorithmKind::Bruck, Growth::Log},
      {CollectiveKind::AllGather, AlgorithmKind::Ring, Growth::Linear},
      {CollectiveKind::AllGather, AlgorithmKind::RecursiveDoubling, Growth::Log},
      {CollectiveKind::AllGather, AlgorithmKind::Bruck, Growth::Log},
      {CollectiveKind::Broadcast, AlgorithmKind::BinomialTree, Growth::Log},
      {CollectiveKind::Broadcast, AlgorithmKind::ScatterAllGather,
       Growth::LogPlusLinear},
      {CollectiveKind::Reduce, AlgorithmKind::BinomialTree, Growth::Log},
      {CollectiveKind::Reduce, AlgorithmKind::ReduceScatterGather, Growth::Log},
      {CollectiveKind::AllReduce, AlgorithmKind::BinomialTree, Growth::Log},
      {CollectiveKind::AllReduce, AlgorithmKind::RecursiveDoubling, Growth::Log},
      {CollectiveKind::AllReduce, AlgorithmKind::ReduceScatterAllGather,
       Growth::Log},
  };
  for (const auto& row : rows) {
    for (int p_val : {4, 8, 16, 64}) {
      CostParams pa = base_params();
      pa.parallelism = p_val;
      CostParams pb = pa;
      pb.parallelism = 2 * p_val;
      double sa = collective_time(row.kind, row.algo, 0, pa).startup;
      double sb = collective_time(row.kind, row.algo, 0, pb).startup;
      double ratio = sb / sa;
      int k = int(std::log2(p_val));
      double expected = 0;
      switch (row.growth) {
        case Growth::Linear:
          expected = double(2 * p_val - 1) / double(p_val - 1);
          break;
        case Growth::Log:
          expected = double(k + 1) / k;
          break;
        case Growth::LogPlusLinear:
          expected = double(k + 1 + 2 * p_val - 1) / double(k + p_val - 1);
          break;
      }
      CHECK(ratio == doctest::Approx(expected).epsilon(0.05));
    }
  }
}

TEST_CASE("invalid collective-algorithm pairs list the valid rows") {
  CostParams p = base_params();
  CHECK_THROWS_WITH_AS(
      collective_time(CollectiveKind::Broadcast, AlgorithmKind::Bruck, 10, p),
      doctest::Contains("valid rows"), InvalidArgument);
  CHECK_THROWS_AS(
      collective_time(CollectiveKind::Barrier, AlgorithmKind::Bruck, 10, p),
      InvalidArgument);
}

TEST_CASE("local operator rows evaluate their formulas") {
  CostParams p = base_params();
  p.parallelism = 1;
  p.kappa = 1.0;

  p.total_rows = 1e6;
  LocalOpCost sort_cost = local_op_cost(LocalOpKind::Sort, p);
  CHECK(sort_cost.compute ==
        doctest::Approx(1e6 * std::log2(1e6)).epsilon(1e-6));
  CHECK(sort_cost.compute == doctest::Approx(1.993e7).epsilon(1e-3));

  p.total_rows = 1000;
  p.cardinality = 0.5;
  LocalOpCost hj = local_op_cost(LocalOpKind::HashJoin, p);
  CHECK(hj.output_rows == doctest::Approx(2000));
  CHECK(hj.compute == doctest::Approx(1000 + 2000));

  p.cardinality = 0.1;
  LocalOpCost uq = local_op_cost(LocalOpKind::Unique, p);
  CHECK(uq.output_rows == doctest::Approx(100));

  p.cardinality.reset();
  CHECK_THROWS_AS(local_op_cost(LocalOpKind::Unique, p), InvalidArgument);
  CHECK_THROWS_AS(local_op_cost(LocalOpKind::GroupBy, p), InvalidArgument);
}

TEST_CASE("embarrassingly parallel pattern is compute only") {
  CostParams p = base_params();
  CostBreakdown b =
      pattern_cost(PatternKind::EmbarrassinglyParallel, p, LocalOpKind::SelectionMap);
  CHECK(b.startup == 0);
  CHECK(b.transfer == 0);
  CHECK(b.reduce == 0);
  CHECK(b.compute == doctest::Approx(p.kappa * p.rows_per_worker()));
  CHECK_THROWS_AS(
      pattern_cost(PatternKind::EmbarrassinglyParallel, p, LocalOpKind::HashJoin),
      InvalidArgument);
}

TEST_CASE("shuffle-compute decomposes exactly into aux, comm, and core") {
  CostParams p = base_params();
  CostBreakdown whole =
      pattern_cost(PatternKind::ShuffleComputeHash, p, LocalOpKind::HashJoin);
  CostBreakdown comm_only = shuffle_time(p);
  double aux_plus_core = whole.total() - comm_only.total();
  double expected = p.kappa * p.rows_per_worker() +
                    local_op_cost(LocalOpKind::HashJoin, p).compute;
  CHECK(aux_plus_core == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("combine never beats shuffle-compute at full cardinality") {
  for (double kappa : {1e-9, 1e-8, 1e-6}) {
    CostParams p = base_params();
    p.kappa = kappa;
    p.cardinality = 1.0;
    double combine =
        pattern_cost(PatternKind::CombineShuffleReduce, p, LocalOpKind::GroupBy)
            .total();
    double shuffle =
        pattern_cost(PatternKind::ShuffleComputeHash, p, LocalOpKind::GroupBy)
            .total();
    CHECK(combine >= shuffle);
  }
}

TEST_CASE("strong scaling has an interior optimum") {
  // With N fixed, total(P) falls with n = N/P until the (P-1) startup term
  // overtakes the gains.
  CostParams p;
  p.alpha = 1e-5;
  p.beta = 1e-9;
  p.kappa = 1e-8;
  p.total_rows = 1e9;
  p.row_bytes = 16;
  p.columns = 2;
  p.cardinality = 0.9;

  double best = 1e300;
  int best_p = 0;
  double first = 0, last = 0;
  for (int lg = 1; lg <= 14; lg++) {
    p.parallelism = 1 << lg;
    double total =
        pattern_cost(PatternKind::ShuffleComputeHash, p, LocalOpKind::HashJoin)
            .total();
    if (lg == 1) first = total;
    last = total;
    if (total < best) {
      best = total;
      best_p = p.parallelism;
    }
  }
  CHECK(best < first);
  CHECK(best < last);
  CHECK(best_p > 2);
  CHECK(best_p < (1 << 14));
}

TEST_CASE("all breakdown components stay non-negative") {
  for (int seed = 0; seed < 50; seed++) {
    CostParams p;
    p.alpha = (seed % 7) * 1e-6;
    p.beta = (seed % 5) * 1e-10;
    p.gamma = (seed % 3) * 1e-10;
    p.kappa = (seed % 4) * 1e-9;
    p.parallelism = 1 + (seed % 16);
    p.total_rows = 100.0 * (1 + seed);
    p.row_bytes = 8.0 * (1 + seed % 4);
    p.columns = 1 + seed % 5;
    p.cardinality = 0.05 + 0.9 * (seed % 10) / 10.0;
    p.window_rows = 1 + seed % 9;
    for (PatternKind pattern :
         {PatternKind::ShuffleComputeHash, PatternKind::CombineShuffleReduce,
          PatternKind::SampleShuffleCompute, PatternKind::GloballyReduce,
          PatternKind::BroadcastCompute, PatternKind::HaloExchange}) {
      LocalOpKind core = LocalOpKind::GroupBy;
      if (pattern == PatternKind::SampleShuffleCompute) core = LocalOpKind::Sort;
      if (pattern == PatternKind::GloballyReduce) {
        core = LocalOpKind::ColumnAggregation;
      }
      if (pattern == PatternKind::BroadcastCompute) core = LocalOpKind::HashJoin;
      if (pattern == PatternKind::HaloExchange) core = LocalOpKind::RowAggregation;
      if (pattern == PatternKind::ShuffleComputeHash) core = LocalOpKind::HashJoin;
      CostBreakdown b = pattern_cost(pattern, p, core);
      CHECK(b.startup >= 0);
      CHECK(b.transfer >= 0);
      CHECK(b.reduce >= 0);
      CHECK(b.compute >= 0);
      CHECK(b.total() ==
            doctest::Approx(b.startup + b.transfer + b.reduce + b.compute));
    }
  }
}

TEST_CASE("crossover cardinality behaves at the boundaries") {
  CostParams p = base_params();

  // kappa = 0: transfer scales with C <= 1, combine never loses
  CostParams free_compute = p;
  free_compute.kappa = 0;
  CHECK(crossover_cardinality(free_compute, LocalOpKind::GroupBy) == 1.0);

  // with kappa > 0 there is an interior crossover; re-evaluating on both
  // sides flips the ordering
  CostParams mid = p;
  mid.kappa = 1e-8;
  double cstar = crossover_cardinality(mid, LocalOpKind::GroupBy);
  CHECK(cstar > 1.0 / mid.total_rows);
  CHECK(cstar < 1.0);
  auto diff_at = [&](double c) {
    CostParams q = mid;
    q.cardinality = c;
    return pattern_cost(PatternKind::CombineShuffleReduce, q, LocalOpKind::GroupBy)
               .total() -
           pattern_cost(PatternKind::ShuffleComputeHash, q, LocalOpKind::GroupBy)
               .total();
  };
  CHECK(diff_at(cstar - 1e-4) < 0);  // combine cheaper below
  CHECK(diff_at(cstar + 1e-4) > 0);  // shuffle-compute cheaper above
  // bisection residual is tiny relative to the totals
  CostParams at = mid;
  at.cardinality = cstar;
  double total = pattern_cost(PatternKind::ShuffleComputeHash, at,
                              LocalOpKind::GroupBy)
                     .total();
  CHECK(std::fabs(diff_at(cstar)) < 1e-9 * total);
}

TEST_CASE("crossover falls as compute gets more expensive") {
  CostParams p = base_params();
  double previous = 1.1;
  for (double kappa : {1e-10, 1e-9, 1e-8, 1e-7}) {
    CostParams q = p;
    q.kappa = kappa;
    double cstar = crossover_cardinality(q, LocalOpKind::GroupBy);
    CHECK(cstar <= previous);
    previous = cstar;
  }
}
