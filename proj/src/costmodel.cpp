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

#include "ddf/costmodel.hpp"

#include <cmath>

namespace ddf::cost {

namespace {

const char* algo_names[] = {
    "isend_irecv",        "ring",
    "pairwise_exchange",  "bruck",
    "recursive_doubling", "binomial_tree",
    "scatter_allgather",  "reduce_scatter_gather",
    "reduce_scatter_allgather",
};

const char* op_names[] = {
    "selection_map", "row_aggregation", "projection", "union",
    "set_difference", "hash_join",      "sort_join",  "transpose",
    "unique",         "groupby",        "column_aggregation", "sort",
};

const char* pattern_names[] = {
    "embarrassingly_parallel", "shuffle_compute_hash", "shuffle_compute_range",
    "sample_shuffle_compute",  "combine_shuffle_reduce", "globally_reduce",
    "broadcast_compute",       "halo_exchange",
};

/// ceil(log2 P); zero for P = 1 so degenerate worlds cost nothing.
double log2_ceil(int p) {
  int rounds = 0;
  while ((1 << rounds) < p) rounds++;
  return double(rounds);
}

/// Continuous log2 clamped at zero for the n*log(n) compute terms.
double log2_pos(double n) { return n > 1 ? std::log2(n) : 0.0; }

double linear(int p) { return double(p - 1); }
double frac(int p) { return double(p - 1) / double(p); }
double remote(int p) { return p > 1 ? 1.0 : 0.0; }

double require_cardinality(const CostParams& params, LocalOpKind op) {
  if (!params.cardinality.has_value()) {
    throw InvalidArgument(std::string("local_op_cost: ") + to_string(op) +
                          " requires params.cardinality");
  }
  return *params.cardinality;
}

CostBreakdown add(CostBreakdown a, const CostBreakdown& b) {
  a.startup += b.startup;
  a.transfer += b.transfer;
  a.reduce += b.reduce;
  a.compute += b.compute;
  a.predicted_bytes += b.predicted_bytes;
  return a;
}

/// Shuffle terms for an arbitrary payload (used by the combine pattern where
/// the shuffled payload shrinks to n*C rows).
CostBreakdown shuffle_terms(const CostParams& params, double payload_bytes) {
  CostBreakdown out;
  const int p = params.parallelism;
  out.startup = linear(p) * params.alpha;
  out.transfer = frac(p) * payload_bytes * params.beta;
  out.predicted_bytes = frac(p) * payload_bytes;
  return out;
}

}  // namespace

const char* to_string(AlgorithmKind a) { return algo_names[static_cast<int>(a)]; }
const char* to_string(LocalOpKind op) { return op_names[static_cast<int>(op)]; }
const char* to_string(PatternKind p) { return pattern_names[static_cast<int>(p)]; }

LocalOpKind local_op_from_string(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(LocalOpKind::Sort); i++) {
    if (name == op_names[i]) return static_cast<LocalOpKind>(i);
  }
  throw InvalidArgument("unknown local op: " + name);
}

double p2p_time(double msg_bytes, const CostParams& params) {
  if (msg_bytes < 0) throw InvalidArgument("p2p_time: negative message size");
  return params.alpha + msg_bytes * params.beta;
}

CostBreakdown shuffle_time(const CostParams& params) {
  return shuffle_terms(params, params.payload_bytes());
}

CostBreakdown collective_time(comm::CollectiveKind kind, AlgorithmKind algo,
                              double msg_bytes, const CostParams& params) {
  using comm::CollectiveKind;
  const int p = params.parallelism;
  const double lg = log2_ceil(p);
  const double n = msg_bytes;

  // f_startup(P), f_transfer(P) * n, f_reduce(P) * n per the tabulated
  // complexity rows; n is per-worker payload bytes throughout (AllGather
  // rows tabulate against total data N = P*n).
  double startup = -1, transfer = 0, reduce = 0;
  switch (kind) {
    case CollectiveKind::Shuffle:
      switch (algo) {
        case AlgorithmKind::IsendIrecv:
          startup = linear(p); transfer = frac(p) * n; break;
        case AlgorithmKind::Ring:
          startup = linear(p); transfer = linear(p) * n; break;
        case AlgorithmKind::PairwiseExchange:
          startup = linear(p); transfer = remote(p) * n; break;
        case AlgorithmKind::Bruck:
          startup = lg; transfer = lg * n / 2; break;
        default: break;
      }
      break;
    case CollectiveKind::AllGather:
      switch (algo) {
        case AlgorithmKind::Ring:
          startup = linear(p); transfer = frac(p) * (p * n); break;
        case AlgorithmKind::RecursiveDoubling:
        case AlgorithmKind::Bruck:
          startup = lg; transfer = frac(p) * (p * n); break;
        default: break;
      }
      break;
    case CollectiveKind::Broadcast:
      switch (algo) {
        case AlgorithmKind::BinomialTree:
          startup = lg; transfer = lg * n; break;
        case AlgorithmKind::ScatterAllGather:
          startup = lg + linear(p); transfer = frac(p) * n; break;
        default: break;
      }
      break;
    case CollectiveKind::Reduce:
      switch (algo) {
        case AlgorithmKind::BinomialTree:
          startup = lg; transfer = lg * n; reduce = lg * n; break;
        case AlgorithmKind::ReduceScatterGather:
          startup = lg; transfer = frac(p) * n; reduce = frac(p) * n; break;
        default: break;
      }
      break;
    case CollectiveKind::AllReduce:
      switch (algo) {
        case AlgorithmKind::BinomialTree:
        case AlgorithmKind::RecursiveDoubling:
          startup = lg; transfer = lg * n; reduce = lg * n; break;
        case AlgorithmKind::ReduceScatterAllGather:
          startup = lg; transfer = frac(p) * n; reduce = frac(p) * n; break;
        default: break;
      }
      break;
    default:
      break;
  }
  if (startup < 0) {
    throw InvalidArgument(
        std::string("no tabulated complexity for ") + comm::to_string(kind) +
        " with " + to_string(algo) +
        "; valid rows: shuffle{isend_irecv,ring,pairwise_exchange,bruck}, "
        "allgather{ring,recursive_doubling,bruck}, "
        "broadcast{binomial_tree,scatter_allgather}, "
        "reduce{binomial_tree,reduce_scatter_gather}, "
        "allreduce{binomial_tree,recursive_doubling,reduce_scatter_allgather}");
  }

  CostBreakdown out;
  out.startup = startup * params.alpha;
  out.transfer = transfer * params.beta;
  out.reduce = reduce * params.gamma;
  out.predicted_bytes = transfer;
  return out;
}

LocalOpCost local_op_cost(LocalOpKind op, const CostParams& params) {
  const double n = params.rows_per_worker();
  const double c = params.columns;
  const double k = params.kappa;
  LocalOpCost out;
  switch (op) {
    case LocalOpKind::SelectionMap:
      out.compute = k * n;
      out.output_rows = n;
      break;
    case LocalOpKind::RowAggregation:
      out.compute = k * n * c;
      out.output_rows = n;
      break;
    case LocalOpKind::Projection:
      out.compute = k * c;
      out.output_rows = n;
      break;
    case LocalOpKind::Union: {
      double card = require_cardinality(params, op);
      out.compute = k * n * c;
      out.output_rows = n * card;
      break;
    }
    case LocalOpKind::SetDifference:
      out.compute = k * n * c;
      out.output_rows = n;
      break;
    case LocalOpKind::HashJoin: {
      double card = require_cardinality(params, op);
      out.compute = k * (n + n / card);
      out.output_rows = n / card;
      break;
    }
    case LocalOpKind::SortJoin: {
      double card = require_cardinality(params, op);
      out.compute = k * (n * log2_pos(n) + n / card);
      out.output_rows = n / card;
      break;
    }
    case LocalOpKind::Transpose:
      out.compute = k * n * c;
      out.output_rows = n;
      break;
    case LocalOpKind::Unique: {
      double card = require_cardinality(params, op);
      out.compute = k * n * c;
      out.output_rows = n * card;
      break;
    }
    case LocalOpKind::GroupBy: {
      double card = require_cardinality(params, op);
      out.compute = k * n;
      out.output_rows = n * card;
      break;
    }
    case LocalOpKind::ColumnAggregation:
      out.compute = k * n * c;
      out.output_rows = 1;
      break;
    case LocalOpKind::Sort:
      out.compute = k * n * log2_pos(n);
      out.output_rows = n;
      break;
  }
  return out;
}

namespace {

void require_core(PatternKind pattern, LocalOpKind core,
                  std::initializer_list<LocalOpKind> allowed) {
  for (LocalOpKind k : allowed) {
    if (k == core) return;
  }
  throw InvalidArgument(std::string("pattern ") + to_string(pattern) +
                        " does not admit core " + to_string(core));
}

}  // namespace

CostBreakdown pattern_cost(PatternKind pattern, const CostParams& params,
                           LocalOpKind core) {
  using comm::CollectiveKind;
  const int p = params.parallelism;
  const double n = params.rows_per_worker();
  const double k = params.kappa;
  CostBreakdown out;

  switch (pattern) {
    case PatternKind::EmbarrassinglyParallel: {
      require_core(pattern, core,
                   {LocalOpKind::SelectionMap, LocalOpKind::RowAggregation,
                    LocalOpKind::Projection});
      out.compute = local_op_cost(core, params).compute;
      return out;
    }

    case PatternKind::ShuffleComputeHash:
    case PatternKind::ShuffleComputeRange: {
      require_core(pattern, core,
                   {LocalOpKind::Union, LocalOpKind::SetDifference,
                    LocalOpKind::HashJoin, LocalOpKind::SortJoin,
                    LocalOpKind::GroupBy, LocalOpKind::Sort});
      // Partition + split pass over the rows, then shuffle, then the core.
      out.compute = k * n + local_op_cost(core, params).compute;
      out = add(out, shuffle_terms(params, params.payload_bytes()));
      if (pattern == PatternKind::ShuffleComputeRange) {
        // Range insight exchange ahead of the shuffle.
        out.startup += log2_ceil(p) * params.alpha;
      }
      return out;
    }

    case PatternKind::SampleShuffleCompute: {
      require_core(pattern, core, {LocalOpKind::Sort});
      // Local sort, regular sampling + split, pivot exchange (gather of P
      // samples per rank at rank 0, binomial broadcast of P-1 pivots),
      // shuffle, final P-way merge of sorted runs.
      out.compute = local_op_cost(core, params).compute;  // local sort
      out.compute += k * n;                               // sample + split
      out.compute += k * n * log2_ceil(p);                // merge
      const double sample_bytes = double(p) * 8.0;
      const double pivot_bytes = double(p - 1) * 8.0;
      CostBreakdown gather;
      gather.startup = linear(p) * params.alpha;
      gather.transfer = frac(p) * sample_bytes * params.beta;
      gather.predicted_bytes = frac(p) * sample_bytes;
      out = add(out, gather);
      out = add(out, collective_time(CollectiveKind::Broadcast,
                                     AlgorithmKind::BinomialTree, pivot_bytes,
                                     params));
      out = add(out, shuffle_terms(params, params.payload_bytes()));
      return out;
    }

    case PatternKind::CombineShuffleReduce: {
      require_core(pattern, core, {LocalOpKind::Unique, LocalOpKind::GroupBy});
      const double card = require_cardinality(params, core);
      // T_core(n) + partition/split over the n*C intermediate + shuffle of
      // n*C rows + T_core(n*C).
      LocalOpCost first = local_op_cost(core, params);
      CostParams reduced = params;
      reduced.total_rows = first.output_rows * p;
      LocalOpCost second = local_op_cost(core, reduced);
      out.compute = first.compute + k * (n * card) + second.compute;
      out = add(out, shuffle_terms(params, n * card * params.row_bytes));
      return out;
    }

    case PatternKind::GloballyReduce: {
      require_core(pattern, core,
                   {LocalOpKind::ColumnAggregation, LocalOpKind::RowAggregation});
      out.compute = local_op_cost(core, params).compute;
      out.compute += k * params.columns;  // finalize
      const double scalar_bytes = double(params.columns) * 8.0;
      out = add(out, collective_time(CollectiveKind::AllReduce,
                                     AlgorithmKind::BinomialTree, scalar_bytes,
                                     params));
      return out;
    }

    case PatternKind::BroadcastCompute: {
      require_core(pattern, core, {LocalOpKind::HashJoin, LocalOpKind::SortJoin});
      // n/row_bytes describe the broadcast (small) relation here.
      out = collective_time(CollectiveKind::Broadcast, AlgorithmKind::BinomialTree,
                            params.payload_bytes(), params);
      out.compute = local_op_cost(core, params).compute;
      return out;
    }

    case PatternKind::HaloExchange: {
      require_core(pattern, core,
                   {LocalOpKind::SelectionMap, LocalOpKind::RowAggregation});
      const double halo_bytes = (params.window_rows - 1) * params.row_bytes;
      if (p > 1) {
        out.startup = params.alpha;
        out.transfer = halo_bytes * params.beta;
        out.predicted_bytes = halo_bytes;
      }
      out.compute = local_op_cost(core, params).compute;
      return out;
    }
  }
  throw InvalidArgument("unknown pattern");
}

double crossover_cardinality(const CostParams& params, LocalOpKind core) {
  if (params.total_rows < 1) {
    throw InvalidArgument("crossover_cardinality: need total_rows >= 1");
  }
  auto diff = [&](double card) {
    CostParams with = params;
    with.cardinality = card;
    return pattern_cost(PatternKind::CombineShuffleReduce, with, core).total() -
           pattern_cost(PatternKind::ShuffleComputeHash, with, core).total();
  };

  const double lo_bound = 1.0 / params.total_rows;
  double lo = lo_bound, hi = 1.0;
  if (diff(hi) <= 0) return 1.0;       // combine never loses
  if (diff(lo) >= 0) return lo_bound;  // combine never wins

  // diff is monotone in C for the admitted cores; bisect to machine-level
  // residual (comfortably below the 1e-6 bracket the callers rely on).
  for (int it = 0; it < 200 && hi - lo > 1e-12; it++) {
    double mid = 0.5 * (lo + hi);
    if (diff(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ddf::cost
