#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ushare;
using namespace ushare::testing;

namespace {

ControllerState controller(std::uint64_t pages = 4) { return ControllerState(0, pages, 4096); }

ActiveCommand active(std::uint64_t in, std::uint64_t out) {
  ActiveCommand a;
  a.frame = FrameShape{in, out};
  a.compute_started = true;
  return a;
}

}  // namespace

TEST(try_issue_rx, issues_when_space) {
  auto s = controller();
  EXPECT_EQ(s.buffer_capacity, 16384u);
  s.rx_sg_queue.push_back({0x1000, 4096});
  auto r = try_issue_rx(s);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->element, (SgElement{0x1000, 4096}));
  EXPECT_EQ(s.rx_outstanding, 4096u);
  EXPECT_TRUE(s.rx_sg_queue.empty());
}

TEST(try_issue_rx, waits_for_space) {
  auto s = controller();
  s.rx_buffer_fill = 10000;
  s.rx_outstanding = 4000;
  s.rx_sg_queue.push_back({0, 4096});
  EXPECT_FALSE(try_issue_rx(s));
  EXPECT_EQ(s.rx_sg_queue.size(), 1u);
}

TEST(try_issue_rx, single_page_buffer_allows_one_in_flight) {
  auto s = controller(1);
  s.rx_sg_queue.push_back({0, 4096});
  s.rx_sg_queue.push_back({4096, 4096});
  EXPECT_TRUE(try_issue_rx(s));
  EXPECT_FALSE(try_issue_rx(s));
  on_rx_complete(s, {0, 4096});
  EXPECT_FALSE(try_issue_rx(s));
  s.rx_buffer_fill = 0;
  EXPECT_TRUE(try_issue_rx(s));
}

TEST(try_issue_tx, needs_output_data) {
  auto s = controller();
  s.tx_sg_queue.push_back({0, 4096});
  s.tx_buffer_fill = 100;
  EXPECT_FALSE(try_issue_tx(s));
  s.tx_buffer_fill = 5000;
  auto r = try_issue_tx(s);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->element.length, 4096u);
  EXPECT_EQ(s.tx_buffer_fill, 5000u);
  on_tx_complete(s, {0, 4096});
  EXPECT_EQ(s.tx_buffer_fill, 904u);
}

TEST(try_issue_tx, last_short_element_drains_output) {
  auto s = controller();
  s.active = active(50, 50);
  s.active->tx_elements_left = 1;
  s.tx_sg_queue.push_back({0x9000, 50});
  s.tx_buffer_fill = 50;
  auto r = try_issue_tx(s);
  ASSERT_TRUE(r);
  on_tx_complete(s, r->element);
  EXPECT_EQ(s.tx_buffer_fill, 0u);
  EXPECT_EQ(s.active->tx_delivered, 50u);
  EXPECT_EQ(s.active->tx_elements_left, 0u);
}

TEST(on_rx_complete, moves_outstanding_into_fill) {
  auto s = controller();
  s.rx_sg_queue.push_back({0, 4096});
  try_issue_rx(s);
  on_rx_complete(s, {0, 4096});
  EXPECT_EQ(s.rx_buffer_fill, 4096u);
  EXPECT_EQ(s.rx_outstanding, 0u);
}

TEST(on_rx_complete, spurious_completion_is_fatal) {
  auto s = controller();
  EXPECT_THROW(on_rx_complete(s, {0, 4096}), SimulationError);
  EXPECT_THROW(on_tx_complete(s, {0, 4096}), SimulationError);
  s.rx_sg_queue.push_back({0, 4096});
  try_issue_rx(s);
  EXPECT_THROW(on_rx_complete(s, {8192, 4096}), SimulationError);
}

TEST(compute_model, one_to_one_output_tracks_input) {
  const auto p = accel(0, 0.3, 10000, 10000);
  const FrameShape f{10000, 10000};
  std::uint64_t consumed = 0;
  SimTime total = 0;
  for (std::uint64_t chunk : {1u, 999u, 4096u, 17u, 4887u}) {
    auto step = compute_model(p, f, consumed, chunk);
    consumed += chunk;
    total += step.duration;
    EXPECT_EQ(step.produced_after, consumed);
  }
  EXPECT_EQ(consumed, 10000u);
  EXPECT_EQ(total, bytes_to_ns(10000, 0.3));
  EXPECT_THROW(compute_model(p, f, 9000, 2000), std::invalid_argument);
}

TEST(compute_model, proportional_output_is_monotone_and_exact_at_end) {
  const FrameShape f{7777, 1234};
  std::uint64_t prev = 0;
  for (std::uint64_t c = 0; c <= 7777; ++c) {
    const auto p = produced_for(c, f);
    EXPECT_GE(p, prev);
    EXPECT_LE(p * 7777, c * 1234);
    prev = p;
  }
  EXPECT_EQ(produced_for(7777, f), 1234u);
}

TEST(next_chunk, bounded_by_tx_space) {
  auto s = controller(1);  // 4096-byte buffers
  s.active = active(8192, 16384);
  s.rx_buffer_fill = 4096;
  // 2 output bytes per input byte: only 2048 input bytes fit in an empty TX buffer
  EXPECT_EQ(next_chunk(s), 2048u);
  s.tx_buffer_fill = 4096;
  EXPECT_EQ(next_chunk(s), 0u);
  s.tx_buffer_fill = 0;
  begin_chunk(s, 2048);
  EXPECT_EQ(next_chunk(s), 0u);  // chunk running
  finish_chunk(s);
  EXPECT_EQ(s.tx_buffer_fill, 4096u);
  EXPECT_EQ(s.active->consumed, 2048u);
}

TEST(next_chunk, waits_for_compute_start_and_data) {
  auto s = controller();
  EXPECT_EQ(next_chunk(s), 0u);
  s.active = active(100, 100);
  s.active->compute_started = false;
  s.rx_buffer_fill = 100;
  EXPECT_EQ(next_chunk(s), 0u);
  s.active->compute_started = true;
  EXPECT_EQ(next_chunk(s), 100u);
  s.rx_buffer_fill = 0;
  EXPECT_EQ(next_chunk(s), 0u);
}

TEST(check_bounds, detects_overflow) {
  auto s = controller(1);
  EXPECT_NO_THROW(check_bounds(s));
  s.rx_buffer_fill = 4000;
  s.rx_outstanding = 200;
  EXPECT_THROW(check_bounds(s), SimulationError);
  s = controller(1);
  s.tx_buffer_fill = 5000;
  EXPECT_THROW(check_bounds(s), SimulationError);
  s = controller(1);
  s.tx_outstanding = 10;
  EXPECT_THROW(check_bounds(s), SimulationError);
  EXPECT_THROW(ControllerState(0, 0, 4096), std::invalid_argument);
}

namespace {

struct ComputeSpan {
  SimTime first_rx = 0;
  SimTime compute_done = 0;
};

// First RX completion and compute_done of the first command in a trace.
ComputeSpan first_command_span(const std::vector<TraceRecord>& trace) {
  ComputeSpan s;
  bool have_rx = false;
  for (const auto& r : trace) {
    if (r.kind == RecordKind::rx_complete && !have_rx) {
      s.first_rx = r.time;
      have_rx = true;
    }
    if (r.kind == RecordKind::compute_done) {
      s.compute_done = r.time;
      break;
    }
  }
  return s;
}

}  // namespace

TEST(compute_model, unstalled_frame_takes_startup_plus_bytes_over_rate) {
  for (double rate : {0.05, 0.1, 0.7}) {
    ScenarioConfig cfg;
    cfg.accelerators.push_back(accel(0, rate, 129600, 129600, 3000));
    auto a = app(0, 1);
    a.total_requests = 1;
    cfg.apps.push_back(a);
    cfg.duration = 50 * kMs;
    const auto span = first_command_span(run_traced(cfg));
    const auto expected = 3000 + static_cast<SimTime>(std::ceil(129600.0 / rate));
    EXPECT_EQ(span.compute_done - span.first_rx, expected) << "rate " << rate;
    EXPECT_EQ(unstalled_compute_time(cfg.accelerators[0], 129600), expected);
  }
}

TEST(compute_model, rx_starvation_delays_completion_by_its_duration) {
  // Compute and link run at the same rate with no per-transfer overhead, so
  // the compute drains the buffer exactly as fast as the link fills it.
  ScenarioConfig cfg;
  cfg.accelerators.push_back(accel(0, 4.0, 64 * 4096, 64 * 4096));
  cfg.pages_per_buffer = 2;
  cfg.link.per_transfer_overhead = 0;
  cfg.link.rx_bandwidth = 4.0;
  cfg.link.tx_bandwidth = 64.0;
  auto a = app(0, 1);
  a.total_requests = 1;
  cfg.apps.push_back(a);
  cfg.duration = 10 * kMs;
  const auto base_trace = run_traced(cfg);
  const auto base = first_command_span(base_trace);
  // withhold the 20th element exactly when it would have started
  const auto starts = records_of(base_trace, RecordKind::rx_start);
  ASSERT_GT(starts.size(), 40u);
  const SimTime stall_at = starts[20].time;
  for (SimTime d : {1000u, 12345u, 50000u}) {
    auto stalled = cfg;
    stalled.link.stalls.push_back({Direction::rx, stall_at, d});
    const auto s = first_command_span(run_traced(stalled));
    EXPECT_EQ(s.first_rx, base.first_rx);
    EXPECT_EQ(s.compute_done - base.compute_done, d) << "stall " << d;
  }
}

TEST(compute_model, busy_never_below_unstalled_bound) {
  ScenarioConfig cfg;
  for (int i = 0; i < 4; ++i) cfg.accelerators.push_back(accel(0, 0.8 + 0.3 * i, 50000, 30000, 700));
  cfg.link.rx_bandwidth = 1.0;
  cfg.link.tx_bandwidth = 1.0;
  auto a = app(0, 8);
  a.random_offset = true;
  cfg.apps.push_back(a);
  cfg.duration = 5 * kMs;
  const auto trace = run_traced(cfg);
  std::map<std::uint32_t, SimTime> first_rx;
  std::size_t checked = 0;
  for (const auto& r : trace) {
    if (r.kind == RecordKind::rx_complete && !first_rx.count(r.acc)) first_rx[r.acc] = r.time;
    if (r.kind == RecordKind::compute_done) {
      EXPECT_GE(r.time - first_rx.at(r.acc), unstalled_compute_time(cfg.accelerators[r.acc], 50000));
      first_rx.erase(r.acc);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10u);
}

TEST(controller, issue_order_follows_list_order) {
  ScenarioConfig cfg;
  cfg.accelerators.push_back(accel(0, 1.0, 30000, 20000));
  auto a = app(0, 1);
  a.total_requests = 3;
  a.buffer_offset = 123;
  cfg.apps.push_back(a);
  cfg.duration = 5 * kMs;
  const auto trace = run_traced(cfg);
  std::map<std::uint64_t, std::vector<std::uint64_t>> rx_starts, rx_done;
  std::map<std::uint64_t, std::uint64_t> rx_bytes, tx_bytes;
  for (const auto& r : trace) {
    if (r.kind == RecordKind::rx_start) rx_starts[r.command_id].push_back(r.aux);
    if (r.kind == RecordKind::rx_complete) {
      rx_done[r.command_id].push_back(r.aux);
      rx_bytes[r.command_id] += r.bytes;
    }
    if (r.kind == RecordKind::tx_complete) tx_bytes[r.command_id] += r.bytes;
  }
  ASSERT_EQ(rx_starts.size(), 3u);
  for (const auto& [id, starts] : rx_starts) {
    EXPECT_EQ(starts, rx_done[id]);
    EXPECT_EQ(starts.size(), pages_spanned(30000, 123));
    EXPECT_EQ(rx_bytes[id], 30000u);
    EXPECT_EQ(tx_bytes[id], 20000u);
  }
}
