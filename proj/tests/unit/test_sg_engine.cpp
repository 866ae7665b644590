#include <gtest/gtest.h>

#include <random>

#include "ultrashare/sg_engine.hpp"

using namespace ushare;

TEST(decode_sg, four_elements) {
  CompactSgList l;
  l.first_length = 100;
  l.last_length = 50;
  l.addresses = {0xA000, 0xB000, 0xC000, 0xD000};
  const auto e = decode_sg(l);
  const std::vector<SgElement> want{{0xA000, 100}, {0xB000, 4096}, {0xC000, 4096}, {0xD000, 50}};
  EXPECT_EQ(e, want);
  std::uint64_t sum = 0;
  for (const auto& x : e) sum += x.length;
  EXPECT_EQ(sum, 100u + 4096u + 4096u + 50u);
  EXPECT_EQ(total_bytes(l), sum);
}

TEST(decode_sg, single_address) {
  CompactSgList l;
  l.first_length = 4096;
  l.addresses = {0x7000};
  EXPECT_EQ(decode_sg(l), (std::vector<SgElement>{{0x7000, 4096}}));
}

TEST(decode_sg, empty_list_is_an_error) { EXPECT_THROW(decode_sg(CompactSgList{}), SgError); }

TEST(decode_sg, round_trips_random_lists) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t page = 4096;
    const std::size_t n = 1 + rng() % 20;
    std::vector<SgElement> in;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t len = page;
      if (j == 0 || j + 1 == n) len = 1 + rng() % page;
      in.push_back({rng() % (1ULL << 40), len});
    }
    EXPECT_EQ(decode_sg(compact_sg(in, page)), in);
  }
}

TEST(decode_stream, concatenates_lists_in_order) {
  auto a = make_sg_list(5000, 0, {1, 2});
  auto b = make_sg_list(100, 0, {3});
  auto s = decode_stream(4, Direction::tx, {a, b});
  ASSERT_EQ(s.elements.size(), 3u);
  EXPECT_EQ(s.elements[2], (SgElement{3 * 4096, 100}));
  EXPECT_EQ(s.direction, Direction::tx);
}

namespace {

Allocation allocation(std::uint64_t id, std::size_t acc) {
  Allocation a;
  a.command.command_id = id;
  a.command.rx_lists.push_back(make_sg_list(10000, 0, {1, 2, 3}));
  a.command.tx_lists.push_back(make_sg_list(5000, 0, {4, 5}));
  a.acc = acc;
  return a;
}

}  // namespace

TEST(distribute, elements_land_in_the_allocated_controller) {
  std::vector<ControllerState> ctrls;
  for (std::size_t i = 0; i < 6; ++i) ctrls.emplace_back(i, 4, 4096);
  RequestInfoQueue infos;
  auto a = allocation(8, 4);
  infos.push_back(make_request_info(a));
  EXPECT_EQ(distribute(decode_stream(8, Direction::rx, a.command.rx_lists), infos, ctrls), 4u);
  EXPECT_EQ(infos.size(), 1u);
  EXPECT_EQ(distribute(decode_stream(8, Direction::tx, a.command.tx_lists), infos, ctrls), 4u);
  EXPECT_TRUE(infos.empty());
  EXPECT_EQ(ctrls[4].rx_sg_queue.size(), 3u);
  EXPECT_EQ(ctrls[4].tx_sg_queue.size(), 2u);
  std::uint64_t rx = 0;
  for (const auto& e : ctrls[4].rx_sg_queue) rx += e.length;
  EXPECT_EQ(rx, 10000u);
  for (std::size_t i = 0; i < 6; ++i)
    if (i != 4) {
      EXPECT_TRUE(ctrls[i].rx_sg_queue.empty());
    }
}

TEST(distribute, pairs_commands_in_fetch_order) {
  std::vector<ControllerState> ctrls;
  for (std::size_t i = 0; i < 2; ++i) ctrls.emplace_back(i, 4, 4096);
  RequestInfoQueue infos;
  auto a = allocation(1, 0), b = allocation(2, 1);
  infos.push_back(make_request_info(a));
  infos.push_back(make_request_info(b));
  for (const auto* x : {&a, &b}) {
    distribute(decode_stream(x->command.command_id, Direction::rx, x->command.rx_lists), infos, ctrls);
    distribute(decode_stream(x->command.command_id, Direction::tx, x->command.tx_lists), infos, ctrls);
  }
  EXPECT_TRUE(infos.empty());
  EXPECT_EQ(ctrls[0].rx_sg_queue.size(), 3u);
  EXPECT_EQ(ctrls[1].rx_sg_queue.size(), 3u);
}

TEST(distribute, ordering_violations_are_fatal) {
  std::vector<ControllerState> ctrls;
  ctrls.emplace_back(0, 4, 4096);
  RequestInfoQueue infos;
  auto a = allocation(1, 0);
  EXPECT_THROW(distribute(decode_stream(1, Direction::rx, a.command.rx_lists), infos, ctrls), SimulationError);
  infos.push_back(make_request_info(a));
  EXPECT_THROW(distribute(decode_stream(2, Direction::rx, a.command.rx_lists), infos, ctrls), SimulationError);
  auto wrong_count = decode_stream(1, Direction::rx, a.command.rx_lists);
  wrong_count.elements.pop_back();
  EXPECT_THROW(distribute(wrong_count, infos, ctrls), SimulationError);
  auto wrong_target = decode_stream(1, Direction::rx, a.command.rx_lists);
  wrong_target.target_acc = 3;
  EXPECT_THROW(distribute(wrong_target, infos, ctrls), SimulationError);
  distribute(decode_stream(1, Direction::rx, a.command.rx_lists), infos, ctrls);
  EXPECT_THROW(distribute(decode_stream(1, Direction::rx, a.command.rx_lists), infos, ctrls), SimulationError);
}
