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

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <thread>

#include "ddf/comm/cluster.hpp"
#include "ddf/comm/collectives.hpp"
#include "ddf/comm/socket_transport.hpp"
#include "ddf/partition.hpp"
#include "support/oracles.hpp"
#include "support/random_tables.hpp"

using namespace ddf;
using namespace ddf::comm;
using testing::Rng;

namespace {

Table int64_table(const std::vector<int64_t>& values) {
  ColumnBuilder b(DataType::Int64);
  for (int64_t v : values) b.append_int64(v);
  return Table(Schema({{"k", DataType::Int64}}, {0}), {b.finish()});
}

void channel_exchange_suite(const std::string& transport) {
  // P=1: self-addressed buffers come back without a network phase
  testing::run_world(1, transport, [](WorkerContext& ctx) {
    std::vector<BufferList> out(1);
    out[0].push_back({1, 2, 3});
    auto in = channel_exchange(ctx, CollectiveKind::Shuffle, out);
    REQUIRE(in[0].size() == 1);
    CHECK(in[0][0] == std::vector<uint8_t>{1, 2, 3});
    CHECK(ctx.bytes_sent(CollectiveKind::Shuffle) == 0);
  });

  // P=2: each rank sends 8 bytes to the other
  testing::run_world(2, transport, [](WorkerContext& ctx) {
    std::vector<BufferList> out(2);
    std::vector<uint8_t> mine(8, uint8_t(0x10 + ctx.rank()));
    out[1 - ctx.rank()].push_back(mine);
    auto in = channel_exchange(ctx, CollectiveKind::Shuffle, out);
    REQUIRE(in[1 - ctx.rank()].size() == 1);
    CHECK(in[1 - ctx.rank()][0] ==
          std::vector<uint8_t>(8, uint8_t(0x10 + (1 - ctx.rank()))));
    CHECK(ctx.bytes_sent(CollectiveKind::Shuffle) == 8);
  });

  // P=4 randomized sizes: the received byte matrix is the transpose of the
  // sent matrix
  constexpr int kWorld = 4;
  std::vector<std::vector<std::vector<uint8_t>>> sent(kWorld);
  std::vector<std::vector<std::vector<uint8_t>>> received(kWorld);
  for (int r = 0; r < kWorld; r++) {
    Rng rng(0xc0ffee + r);
    sent[r].resize(kWorld);
    for (int dst = 0; dst < kWorld; dst++) {
      sent[r][dst].resize(rng.range(0, 64 * 1024));
      for (auto& b : sent[r][dst]) b = uint8_t(rng.next());
    }
  }
  testing::run_world(kWorld, transport, [&](WorkerContext& ctx) {
    std::vector<BufferList> out(kWorld);
    for (int dst = 0; dst < kWorld; dst++) out[dst].push_back(sent[ctx.rank()][dst]);
    auto in = channel_exchange(ctx, CollectiveKind::Shuffle, out);
    received[ctx.rank()].resize(kWorld);
    for (int src = 0; src < kWorld; src++) {
      REQUIRE(in[src].size() == 1);
      received[ctx.rank()][src] = in[src][0];
    }
  });
  for (int r = 0; r < kWorld; r++) {
    for (int s = 0; s < kWorld; s++) {
      CHECK(received[r][s] == sent[s][r]);
    }
  }
}

void shuffle_suite(const std::string& transport) {
  // P=1 identity
  testing::run_world(1, transport, [](WorkerContext& ctx) {
    Table t = int64_table({1, 2, 3});
    std::vector<int> dest(3, 0);
    Table out = shuffle_table(ctx, t, dest);
    CHECK(table_equals(out, t));
    CHECK(ctx.bytes_sent(CollectiveKind::Shuffle) == 0);
  });

  // P=2 with dest = key mod 2: rank0 ends with {2,4}, rank1 with {1,3}
  testing::run_world(2, transport, [](WorkerContext& ctx) {
    Table t = ctx.rank() == 0 ? int64_table({1, 2}) : int64_table({3, 4});
    std::vector<int> dest;
    for (int64_t r = 0; r < t.num_rows(); r++) {
      dest.push_back(int(t.column(0).int64_at(r) % 2));
    }
    Table out = shuffle_table(ctx, t, dest);
    Table expected = ctx.rank() == 0 ? int64_table({2, 4}) : int64_table({1, 3});
    CHECK(testing::tables_equal_unordered(out, expected));

    // byte counter equals the serialized size of the outgoing sub-table
    std::vector<int64_t> remote_rows;
    for (int64_t r = 0; r < t.num_rows(); r++) {
      if (dest[r] != ctx.rank()) remote_rows.push_back(r);
    }
    uint64_t expected_bytes =
        serialize_table(take_rows(t, remote_rows)).total_bytes();
    CHECK(ctx.bytes_sent(CollectiveKind::Shuffle) == expected_bytes);

    ctx.reset_byte_counters();
    CHECK(ctx.bytes_sent(CollectiveKind::Shuffle) == 0);
  });

  // dest out of range fails before any communication
  testing::run_world(2, transport, [](WorkerContext& ctx) {
    Table t = int64_table({1});
    std::vector<int> dest = {5};
    CHECK_THROWS_AS(shuffle_table(ctx, t, dest), InvalidArgument);
  });

  // P=4 random: global multiset preserved, keys colocated
  constexpr int kWorld = 4;
  std::vector<Table> inputs;
  {
    Rng rng(42);
    Schema schema({{"k", DataType::Int64}, {"v", DataType::Utf8}}, {0});
    for (int r = 0; r < kWorld; r++) {
      inputs.push_back(testing::random_table(rng, schema, 1000, 0.05, 64));
    }
  }
  const int key_cols[1] = {0};
  std::vector<Table> outputs(kWorld);
  testing::run_world(kWorld, transport, [&](WorkerContext& ctx) {
    const Table& mine = inputs[ctx.rank()];
    PartitionAssignment a = hash_partition(mine, key_cols, kWorld);
    outputs[ctx.rank()] = shuffle_table(ctx, mine, a.dest);
  });
  Table global_in = concat_tables(inputs[0].schema(), inputs);
  Table global_out = concat_tables(inputs[0].schema(), outputs);
  CHECK(testing::tables_equal_unordered(global_in, global_out));
  // colocation: every key value appears on exactly one rank
  for (int64_t key = 0; key < 64; key++) {
    int ranks_with_key = 0;
    for (int r = 0; r < kWorld; r++) {
      bool found = false;
      const Column& col = outputs[r].column(0);
      for (int64_t i = 0; i < col.length() && !found; i++) {
        if (!col.is_null(i) && col.int64_at(i) == key) found = true;
      }
      ranks_with_key += found;
    }
    CHECK(ranks_with_key <= 1);
  }
}

void table_collectives_suite(const std::string& transport) {
  Rng rng(7);
  Schema schema({{"k", DataType::Int64}, {"s", DataType::Utf8}});
  std::vector<Table> inputs;
  for (int r = 0; r < 3; r++) {
    inputs.push_back(testing::random_table(rng, schema, 5 + r, 0.2, 30));
  }

  // single-rank worlds: gather/allgather/broadcast are identities
  testing::run_world(1, transport, [&](WorkerContext& ctx) {
    auto g = gather_table(ctx, inputs[0], 0);
    REQUIRE(g.has_value());
    CHECK(table_equals(*g, inputs[0]));
    CHECK(table_equals(allgather_table(ctx, inputs[0]), inputs[0]));
    CHECK(table_equals(broadcast_table(ctx, inputs[0], 0), inputs[0]));
    CHECK(ctx.total_bytes_sent() == 0);
  });

  // gather: root receives rank-order concatenation, others nothing
  testing::run_world(3, transport, [&](WorkerContext& ctx) {
    auto out = gather_table(ctx, inputs[ctx.rank()], 1);
    if (ctx.rank() == 1) {
      REQUIRE(out.has_value());
      CHECK(table_equals(*out, concat_tables(schema, inputs)));
    } else {
      CHECK_FALSE(out.has_value());
    }
  });

  // allgather equals gather at every root; broadcast replicates root's table
  testing::run_world(3, transport, [&](WorkerContext& ctx) {
    Table all = allgather_table(ctx, inputs[ctx.rank()]);
    CHECK(table_equals(all, concat_tables(schema, inputs)));

    for (int root = 0; root < 3; root++) {
      Table b = broadcast_table(ctx, inputs[ctx.rank()], root);
      CHECK(table_equals(b, inputs[root]));
    }
  });

  // broadcast + allreduce(Sum) of an indicator = P (everyone received)
  testing::run_world(3, transport, [&](WorkerContext& ctx) {
    Table b = broadcast_table(ctx, inputs[ctx.rank()], 0);
    int64_t got = table_equals(b, inputs[0]) ? 1 : 0;
    auto total = allreduce(ctx, std::span<const int64_t>(&got, 1), ReduceOp::Sum);
    CHECK(total[0] == 3);
  });
}

void allreduce_suite(const std::string& transport) {
  // P=4 scalar sum
  testing::run_world(4, transport, [](WorkerContext& ctx) {
    int64_t v = ctx.rank() + 1;
    auto out = allreduce(ctx, std::span<const int64_t>(&v, 1), ReduceOp::Sum);
    CHECK(out[0] == 10);
  });

  // Min over [[3,9],[5,2]]
  testing::run_world(2, transport, [](WorkerContext& ctx) {
    std::vector<double> v = ctx.rank() == 0 ? std::vector<double>{3, 9}
                                            : std::vector<double>{5, 2};
    auto out = allreduce(ctx, std::span<const double>(v), ReduceOp::Min);
    CHECK(out[0] == 3);
    CHECK(out[1] == 2);
  });

  // random arrays, Sum matches a serial fold within 1e-12 relative
  constexpr int kWorld = 4;
  std::vector<std::vector<double>> values(kWorld);
  {
    Rng rng(31);
    for (auto& v : values) {
      v.resize(64);
      for (auto& x : v) x = rng.uniform() * 2000 - 1000;
    }
  }
  testing::run_world(kWorld, transport, [&](WorkerContext& ctx) {
    auto out = allreduce(ctx, std::span<const double>(values[ctx.rank()]),
                         ReduceOp::Sum);
    for (size_t i = 0; i < out.size(); i++) {
      double expected = 0;
      for (int r = 0; r < kWorld; r++) expected += values[r][i];
      CHECK(out[i] == doctest::Approx(expected).epsilon(1e-12));
    }
  });

  // mismatched lengths: the collective fails (and the failure propagates)
  std::atomic<int> failures{0};
  CHECK_THROWS_AS(
      testing::run_world(2, transport,
                         [&](WorkerContext& ctx) {
                           std::vector<int64_t> v(ctx.rank() == 0 ? 3 : 4, 1);
                           try {
                             allreduce(ctx, std::span<const int64_t>(v),
                                       ReduceOp::Sum);
                           } catch (const Error&) {
                             failures++;
                             throw;  // propagate so peers unblock
                           }
                         }),
      Error);
  CHECK(failures.load() >= 1);
}

void barrier_suite(const std::string& transport) {
  // staggered entries: nobody exits before the last entry
  constexpr int kWorld = 4;
  std::array<std::chrono::steady_clock::time_point, kWorld> entered, exited;
  testing::run_world(kWorld, transport, [&](WorkerContext& ctx) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10 * ctx.rank()));
    entered[ctx.rank()] = std::chrono::steady_clock::now();
    barrier(ctx);
    exited[ctx.rank()] = std::chrono::steady_clock::now();
  });
  auto last_entry = *std::max_element(entered.begin(), entered.end());
  for (const auto& t : exited) CHECK(t >= last_entry);

  // repeated barriers do not deadlock
  testing::run_world(4, transport, [](WorkerContext& ctx) {
    for (int i = 0; i < 25; i++) barrier(ctx);
  });
}

void random_schedule_suite(const std::string& transport, int seeds) {
  // Matched random sequences of collectives never deadlock.
  Schema schema({{"k", DataType::Int64}}, {0});
  for (int seed = 0; seed < seeds; seed++) {
    Rng seq_rng(900 + seed);
    const int world = int(seq_rng.range(2, 8));
    std::vector<int> program;
    for (int i = 0; i < 12; i++) program.push_back(int(seq_rng.range(0, 5)));

    testing::run_world(world, transport, [&](WorkerContext& ctx) {
      Rng rng(7000 + seed * 31 + ctx.rank());
      Table mine = testing::random_table(rng, schema, 20, 0.1, 10);
      for (int step : program) {
        switch (step) {
          case 0: barrier(ctx); break;
          case 1: {
            std::vector<int> dest(mine.num_rows());
            for (auto& d : dest) d = int(rng.next() % uint64_t(world));
            mine = shuffle_table(ctx, mine, dest);
            break;
          }
          case 2: gather_table(ctx, mine, 0); break;
          case 3: broadcast_table(ctx, mine, world - 1); break;
          case 4: {
            int64_t rows = mine.num_rows();
            allreduce(ctx, std::span<const int64_t>(&rows, 1), ReduceOp::Sum);
            break;
          }
          case 5: allgather_table(ctx, mine); break;
        }
      }
    });
  }
}

void byte_law_suite(const std::string& transport) {
  // Uniform shuffle moves about (P-1)/P of the serialized bytes.
  for (int world : {2, 4, 8}) {
    std::vector<Table> inputs;
    Rng rng(1234 + world);
    Schema schema({{"k", DataType::Int64}, {"v", DataType::Int64}}, {0});
    for (int r = 0; r < world; r++) {
      inputs.push_back(testing::random_table(rng, schema, 2000, 0.0, 100000));
    }
    std::vector<uint64_t> sent(world, 0);
    const int key_cols[1] = {0};
    testing::run_world(world, transport, [&](WorkerContext& ctx) {
      const Table& mine = inputs[ctx.rank()];
      PartitionAssignment a = hash_partition(mine, key_cols, world);
      shuffle_table(ctx, mine, a.dest);
      sent[ctx.rank()] = ctx.bytes_sent(CollectiveKind::Shuffle);
    });
    uint64_t total_sent = 0, total_size = 0;
    for (int r = 0; r < world; r++) {
      total_sent += sent[r];
      total_size += serialize_table(inputs[r]).total_bytes();
    }
    double expected = double(world - 1) / world * double(total_size);
    CHECK(double(total_sent) > 0.9 * expected);
    CHECK(double(total_sent) < 1.1 * expected);
  }
}

}  // namespace

TEST_CASE("local: channel exchange") { channel_exchange_suite("local"); }
TEST_CASE("local: shuffle") { shuffle_suite("local"); }
TEST_CASE("local: table collectives") { table_collectives_suite("local"); }
TEST_CASE("local: allreduce") { allreduce_suite("local"); }
TEST_CASE("local: barrier") { barrier_suite("local"); }
TEST_CASE("local: random matched schedules") { random_schedule_suite("local", 10); }
TEST_CASE("local: shuffle byte law") { byte_law_suite("local"); }

TEST_CASE("tcp: channel exchange") { channel_exchange_suite("tcp"); }
TEST_CASE("tcp: shuffle") { shuffle_suite("tcp"); }
TEST_CASE("tcp: table collectives") { table_collectives_suite("tcp"); }
TEST_CASE("tcp: allreduce") { allreduce_suite("tcp"); }
TEST_CASE("tcp: barrier") { barrier_suite("tcp"); }
TEST_CASE("tcp: random matched schedules") { random_schedule_suite("tcp", 3); }

TEST_CASE("broadcast uses ceil(log2(P)) dissemination rounds") {
  CHECK(broadcast_rounds(1) == 0);
  CHECK(broadcast_rounds(2) == 1);
  CHECK(broadcast_rounds(4) == 2);
  CHECK(broadcast_rounds(5) == 3);
  CHECK(broadcast_rounds(8) == 3);
}

TEST_CASE("invalid roots are rejected") {
  testing::run_world(2, "local", [](comm::WorkerContext& ctx) {
    Table t = int64_table({1});
    CHECK_THROWS_AS(gather_table(ctx, t, 7), InvalidArgument);
    CHECK_THROWS_AS(broadcast_table(ctx, t, -1), InvalidArgument);
  });
}

TEST_CASE("allgather with mismatched schemas fails on every rank") {
  std::atomic<int> throwers{0};
  CHECK_THROWS_AS(
      testing::run_world(2, "local",
                         [&](comm::WorkerContext& ctx) {
                           Table t =
                               ctx.rank() == 0
                                   ? int64_table({1})
                                   : Table(Schema({{"other", DataType::Int64}}),
                                           {ColumnBuilder(DataType::Int64)
                                                .finish()});
                           try {
                             allgather_table(ctx, t);
                           } catch (const Error&) {
                             throwers++;
                             throw;
                           }
                         }),
      Error);
  CHECK(throwers.load() == 2);
}

TEST_CASE("tcp: receive timeout surfaces as a transport error") {
  std::atomic<bool> timed_out{false};
  try {
    comm::run_socket_workers(
        2,
        [&](comm::WorkerContext& ctx) {
          if (ctx.rank() == 0) {
            try {
              ctx.transport().recv(1, make_tag(1, 0, kPhaseData));
            } catch (const TransportError&) {
              timed_out = true;
              throw;
            }
          } else {
            // never sends; just outlive rank 0's timeout
            std::this_thread::sleep_for(std::chrono::milliseconds(700));
          }
        },
        std::chrono::milliseconds(300));
  } catch (const TransportError&) {
    // expected propagation
  }
  CHECK(timed_out.load());
}
