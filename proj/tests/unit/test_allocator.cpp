#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ultrashare/allocator.hpp"

using namespace ushare;

namespace {

Command cmd(std::uint64_t id, std::uint32_t type = 0) {
  Command c;
  c.command_id = id;
  c.acc_type = type;
  c.rx_lists.push_back(make_sg_list(100, 0, {1}));
  c.tx_lists.push_back(make_sg_list(100, 0, {2}));
  return c;
}

std::vector<CommandQueue> queues(std::size_t t) {
  std::vector<CommandQueue> q;
  for (std::size_t i = 0; i < t; ++i) q.emplace_back(i, 8);
  return q;
}

}  // namespace

TEST(rightmost_idle, examples) {
  EXPECT_EQ(rightmost_idle({false, true, true, false}), 1u);
  EXPECT_EQ(rightmost_idle({false, false, false, true}), 3u);
  EXPECT_EQ(rightmost_idle({false, false}), std::nullopt);
  EXPECT_EQ(rightmost_idle({}), std::nullopt);
}

TEST(allocate_step, skips_empty_queue) {
  AcceleratorStatus status(4);
  GroupTable table(2, 4);
  table.set(0, 0);
  table.set(0, 1);
  table.set(1, 2);
  table.set(1, 3);
  auto qs = queues(2);
  qs[1].enqueue(cmd(5));
  RoundRobinCursor rr{0};
  auto a = allocate_step(status, table, qs, rr);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->queue, 1u);
  EXPECT_EQ(a->command.command_id, 5u);
  EXPECT_EQ(a->acc, 2u);
  EXPECT_FALSE(status.idle(2));
  EXPECT_EQ(rr.next, 0u);
}

TEST(allocate_step, busy_group_does_not_block_other_queues) {
  AcceleratorStatus status(2);
  GroupTable table(2, 2);
  table.set(0, 0);
  table.set(1, 1);
  status.mark_busy(0);
  auto qs = queues(2);
  qs[0].enqueue(cmd(1));
  qs[1].enqueue(cmd(2));
  RoundRobinCursor rr{0};
  auto a = allocate_step(status, table, qs, rr);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->queue, 1u);
  EXPECT_EQ(a->acc, 1u);
  EXPECT_EQ(qs[0].size(), 1u);
  EXPECT_FALSE(allocate_step(status, table, qs, rr));
}

TEST(allocate_step, unserved_scan_leaves_cursor) {
  AcceleratorStatus status(2);
  status.mark_busy(0);
  status.mark_busy(1);
  auto table = GroupTable::identity(2);
  auto qs = queues(2);
  qs[0].enqueue(cmd(1));
  RoundRobinCursor rr{1};
  EXPECT_FALSE(allocate_step(status, table, qs, rr));
  EXPECT_EQ(rr.next, 1u);
}

TEST(allocate_step, cursor_rotates_between_groups) {
  AcceleratorStatus status(4);
  auto table = GroupTable::all_ones(2, 4);
  auto qs = queues(2);
  for (int i = 0; i < 3; ++i) {
    qs[0].enqueue(cmd(10 + i));
    qs[1].enqueue(cmd(20 + i));
  }
  RoundRobinCursor rr{0};
  std::vector<std::size_t> served;
  while (auto a = allocate_step(status, table, qs, rr)) served.push_back(a->queue);
  EXPECT_EQ(served, (std::vector<std::size_t>{0, 1, 0, 1}));
}

TEST(allocate_step, command_mask_narrows_candidates) {
  AcceleratorStatus status(3);
  auto table = GroupTable::all_ones(1, 3);
  auto qs = queues(1);
  qs[0].enqueue(cmd(1, 1));
  const AccMask type1{false, false, true};
  RoundRobinCursor rr{0};
  auto a = allocate_step(status, table, qs, rr, [&](const Command&) { return &type1; });
  ASSERT_TRUE(a);
  EXPECT_EQ(a->acc, 2u);
}

TEST(allocate_step, rejects_inconsistent_inputs) {
  AcceleratorStatus status(2);
  auto table = GroupTable::identity(2);
  auto qs = queues(1);
  RoundRobinCursor rr{0};
  EXPECT_THROW(allocate_step(status, table, qs, rr), std::invalid_argument);
  qs = queues(2);
  rr.next = 2;
  EXPECT_THROW(allocate_step(status, table, qs, rr), std::out_of_range);
}

TEST(allocate_step, matches_brute_force_reference) {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int i = 0; i < 2000; ++i)
    if (!oracle::allocator_matches(oracle::random_instance(rng))) ++mismatches;
  EXPECT_EQ(mismatches, 0);
}

TEST(allocate_step, served_accelerator_was_idle_member) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto in = oracle::random_instance(rng);
    if (auto want = oracle::brute_force_allocate(in)) {
      EXPECT_TRUE(in.idle[want->acc]);
      EXPECT_TRUE(in.rows[want->queue][want->acc]);
    }
  }
}

TEST(accelerator_status, double_transitions_are_caught) {
  AcceleratorStatus s(2);
  s.mark_busy(1);
  EXPECT_THROW(s.mark_busy(1), SimulationError);
  s.mark_idle(1);
  EXPECT_THROW(s.mark_idle(1), SimulationError);
}

TEST(group_table, reconfigure_moves_accelerator) {
  AcceleratorStatus status(3);
  GroupTable table(2, 3);
  table.set(0, 0);
  table.set(0, 1);
  table.set(0, 2);
  auto qs = queues(2);
  qs[1].enqueue(cmd(1));
  RoundRobinCursor rr{0};
  EXPECT_FALSE(allocate_step(status, table, qs, rr));
  table.reconfigure(0, {true, true, false});
  table.reconfigure(1, {false, false, true});
  auto a = allocate_step(status, table, qs, rr);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->acc, 2u);
}

TEST(group_table, identity_update_changes_nothing) {
  auto t = GroupTable::identity(3);
  auto copy = t;
  t.reconfigure(1, t.row(1));
  EXPECT_EQ(t, copy);
}

TEST(group_table, cleared_row_never_allocates) {
  AcceleratorStatus status(2);
  auto table = GroupTable::all_ones(1, 2);
  table.reconfigure(0, {false, false});
  auto qs = queues(1);
  qs[0].enqueue(cmd(1));
  RoundRobinCursor rr{0};
  EXPECT_FALSE(allocate_step(status, table, qs, rr));
  EXPECT_EQ(qs[0].size(), 1u);
}

TEST(group_table, reconfigure_errors) {
  auto t = GroupTable::identity(3);
  EXPECT_THROW(t.reconfigure(3, {true, false, false}), std::out_of_range);
  EXPECT_THROW(t.reconfigure(0, {true}), std::invalid_argument);
  EXPECT_THROW(t.set(0, 5), std::out_of_range);
}

TEST(request_sg_fetch, completes_after_latency) {
  Simulator sim;
  std::vector<SimEvent> seen;
  sim.set_handler([&](const SimEvent& e) { seen.push_back(e); });
  sim.run_until(100);
  RequestInfoQueue infos;
  Allocation a{0, cmd(7), 3};
  request_sg_fetch(sim, infos, a, 500);
  sim.run_until(10000);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].time, 600u);
  EXPECT_EQ(seen[0].kind, EventKind::sg_fetch_complete);
  EXPECT_EQ(seen[0].payload.command_id, 7u);
  EXPECT_EQ(seen[0].payload.acc, 3u);
  ASSERT_EQ(infos.size(), 1u);
  EXPECT_EQ(infos[0].allocated_acc, 3u);
  EXPECT_EQ(infos[0].rx_list_lengths, (std::vector<std::size_t>{1}));
}

TEST(request_sg_fetch, back_to_back_allocations_keep_order) {
  Simulator sim;
  RequestInfoQueue infos;
  request_sg_fetch(sim, infos, Allocation{0, cmd(1), 0});
  request_sg_fetch(sim, infos, Allocation{1, cmd(2), 1});
  ASSERT_EQ(infos.size(), 2u);
  EXPECT_EQ(infos[0].command_id, 1u);
  EXPECT_EQ(infos[1].command_id, 2u);
  EXPECT_EQ(sim.pending(), 2u);
}
