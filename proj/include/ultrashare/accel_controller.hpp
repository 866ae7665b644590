#pragma once

// Per-accelerator controller: RX/TX SG queues, page-granular data buffers,
// and the streaming compute model that moves bytes from the RX buffer to the
// TX buffer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>

#include "ultrashare/command_model.hpp"

namespace ushare {

inline constexpr std::uint64_t kDefaultPagesPerBuffer = 4;

struct AccelParams {
  std::size_t acc_index = 0;
  std::uint32_t acc_type = 0;
  SimTime startup_latency = 0;
  double process_rate = 1.0;  // bytes/ns
  std::uint64_t input_bytes_per_frame = 0;
  std::uint64_t output_bytes_per_frame = 0;

  friend bool operator==(const AccelParams&, const AccelParams&) = default;
};

inline void validate(const AccelParams& p) {
  if (!(p.process_rate > 0.0) || !std::isfinite(p.process_rate))
    throw std::invalid_argument("accelerator " + std::to_string(p.acc_index) + ": process_rate must be > 0");
  if (p.input_bytes_per_frame == 0 || p.output_bytes_per_frame == 0)
    throw std::invalid_argument("accelerator " + std::to_string(p.acc_index) + ": frame sizes must be > 0");
}

struct FrameShape {
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
};

// Output produced after `consumed` input bytes: floor(consumed * out / in).
// Monotone in `consumed`, and equal to out when consumed == in.
inline std::uint64_t produced_for(std::uint64_t consumed, FrameShape f) {
  if (f.input_bytes == 0) return 0;
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(consumed) * f.output_bytes /
                                    f.input_bytes);
}

// Virtual time to stream `bytes` at `rate`, rounded up to whole ns.
inline SimTime bytes_to_ns(std::uint64_t bytes, double rate) {
  return static_cast<SimTime>(std::ceil(static_cast<double>(bytes) / rate));
}

struct ComputeStep {
  std::uint64_t produced_after = 0;
  SimTime duration = 0;
};

// Streaming compute for one chunk. Durations are differences of the rounded
// cumulative time, so an unstalled frame takes exactly bytes_to_ns(in, rate)
// regardless of how it was chunked.
inline ComputeStep compute_model(const AccelParams& params, FrameShape frame,
                                 std::uint64_t consumed_before, std::uint64_t chunk) {
  if (consumed_before + chunk > frame.input_bytes)
    throw std::invalid_argument("compute_model: consumed exceeds frame input size");
  ComputeStep s;
  s.produced_after = produced_for(consumed_before + chunk, frame);
  s.duration = bytes_to_ns(consumed_before + chunk, params.process_rate) -
               bytes_to_ns(consumed_before, params.process_rate);
  return s;
}

inline SimTime unstalled_compute_time(const AccelParams& params, std::uint64_t input_bytes) {
  return params.startup_latency + bytes_to_ns(input_bytes, params.process_rate);
}

struct DataRequest {
  std::size_t acc_index = 0;
  SgElement element;

  friend bool operator==(const DataRequest&, const DataRequest&) = default;
};

// Progress of the command an accelerator is currently serving.
struct ActiveCommand {
  std::uint64_t command_id = 0;
  FrameShape frame;
  std::uint64_t consumed = 0;
  std::uint64_t produced = 0;
  std::uint64_t chunk_bytes = 0;
  bool startup_scheduled = false;
  bool compute_started = false;
  bool chunk_running = false;
  std::uint64_t rx_elements_left = 0;
  std::uint64_t tx_elements_left = 0;
  std::uint64_t rx_delivered = 0;
  std::uint64_t tx_delivered = 0;
  SimTime first_data_time = 0;
  SimTime compute_done_time = 0;

  bool compute_done() const { return consumed == frame.input_bytes; }
  bool finished() const { return compute_done() && tx_elements_left == 0; }
};

struct ControllerState {
  std::size_t acc_index = 0;
  std::deque<SgElement> rx_sg_queue;
  std::deque<SgElement> tx_sg_queue;
  std::uint64_t rx_buffer_fill = 0;
  std::uint64_t tx_buffer_fill = 0;
  std::uint64_t buffer_capacity = kDefaultPagesPerBuffer * kDefaultPageSize;
  std::uint64_t rx_outstanding = 0;
  std::uint64_t tx_outstanding = 0;
  std::deque<SgElement> rx_in_flight;
  std::deque<SgElement> tx_in_flight;
  std::optional<ActiveCommand> active;

  ControllerState() = default;
  ControllerState(std::size_t acc, std::uint64_t pages_per_buffer, std::uint64_t page_size)
      : acc_index(acc), buffer_capacity(pages_per_buffer * page_size) {
    if (pages_per_buffer == 0) throw std::invalid_argument("pages_per_buffer must be >= 1");
  }
};

inline std::uint64_t rx_free(const ControllerState& s) {
  return s.buffer_capacity - s.rx_buffer_fill - s.rx_outstanding;
}

inline bool rx_ready(const ControllerState& s) {
  return !s.rx_sg_queue.empty() && s.rx_sg_queue.front().length <= rx_free(s);
}

inline bool tx_ready(const ControllerState& s) {
  return !s.tx_sg_queue.empty() && s.tx_buffer_fill - s.tx_outstanding >= s.tx_sg_queue.front().length;
}

inline std::optional<DataRequest> try_issue_rx(ControllerState& s) {
  if (!rx_ready(s)) return std::nullopt;
  SgElement e = s.rx_sg_queue.front();
  s.rx_sg_queue.pop_front();
  s.rx_outstanding += e.length;
  s.rx_in_flight.push_back(e);
  return DataRequest{s.acc_index, e};
}

// TX bytes stay in the buffer until the transfer completes; tx_outstanding
// keeps the same bytes from being claimed twice.
inline std::optional<DataRequest> try_issue_tx(ControllerState& s) {
  if (!tx_ready(s)) return std::nullopt;
  SgElement e = s.tx_sg_queue.front();
  s.tx_sg_queue.pop_front();
  s.tx_outstanding += e.length;
  s.tx_in_flight.push_back(e);
  return DataRequest{s.acc_index, e};
}

inline void on_rx_complete(ControllerState& s, const SgElement& e) {
  if (s.rx_in_flight.empty() || !(s.rx_in_flight.front() == e))
    throw SimulationError("accelerator " + std::to_string(s.acc_index) +
                          ": RX completion without matching in-flight request");
  s.rx_in_flight.pop_front();
  s.rx_outstanding -= e.length;
  s.rx_buffer_fill += e.length;
  if (s.active) {
    s.active->rx_delivered += e.length;
    --s.active->rx_elements_left;
  }
}

inline void on_tx_complete(ControllerState& s, const SgElement& e) {
  if (s.tx_in_flight.empty() || !(s.tx_in_flight.front() == e))
    throw SimulationError("accelerator " + std::to_string(s.acc_index) +
                          ": TX completion without matching in-flight request");
  s.tx_in_flight.pop_front();
  s.tx_outstanding -= e.length;
  s.tx_buffer_fill -= e.length;
  if (s.active) {
    s.active->tx_delivered += e.length;
    --s.active->tx_elements_left;
  }
}

// Largest chunk the compute can take right now: bounded by buffered RX data,
// by remaining input, and by the output it would produce fitting in the TX
// buffer.
inline std::uint64_t next_chunk(const ControllerState& s) {
  if (!s.active || !s.active->compute_started || s.active->chunk_running) return 0;
  const ActiveCommand& a = *s.active;
  std::uint64_t c = std::min(s.rx_buffer_fill, a.frame.input_bytes - a.consumed);
  if (c == 0) return 0;
  const std::uint64_t tx_space = s.buffer_capacity - s.tx_buffer_fill;
  // largest total consumption whose output still fits:
  // floor(x * out / in) <= produced + tx_space  <=>  x * out < (produced + tx_space + 1) * in
  const auto limit = static_cast<unsigned __int128>(a.produced + tx_space + 1) * a.frame.input_bytes - 1;
  const auto bound = limit / a.frame.output_bytes;
  const std::uint64_t max_total =
      bound > a.frame.input_bytes ? a.frame.input_bytes : static_cast<std::uint64_t>(bound);
  if (max_total <= a.consumed) return 0;
  return std::min(c, max_total - a.consumed);
}

// Input is taken out of the RX buffer when a chunk starts; output lands in
// the TX buffer when it ends.
inline void begin_chunk(ControllerState& s, std::uint64_t chunk) {
  if (!s.active || s.active->chunk_running || chunk == 0 || chunk > s.rx_buffer_fill)
    throw SimulationError("accelerator " + std::to_string(s.acc_index) + ": invalid compute chunk");
  s.rx_buffer_fill -= chunk;
  s.active->chunk_bytes = chunk;
  s.active->chunk_running = true;
}

inline void finish_chunk(ControllerState& s) {
  if (!s.active || !s.active->chunk_running)
    throw SimulationError("accelerator " + std::to_string(s.acc_index) + ": no compute chunk running");
  ActiveCommand& a = *s.active;
  a.consumed += a.chunk_bytes;
  const std::uint64_t produced = produced_for(a.consumed, a.frame);
  s.tx_buffer_fill += produced - a.produced;
  a.produced = produced;
  a.chunk_bytes = 0;
  a.chunk_running = false;
}

inline void check_bounds(const ControllerState& s) {
  if (s.rx_buffer_fill + s.rx_outstanding > s.buffer_capacity)
    throw SimulationError("accelerator " + std::to_string(s.acc_index) + ": RX buffer overflow");
  if (s.tx_buffer_fill > s.buffer_capacity)
    throw SimulationError("accelerator " + std::to_string(s.acc_index) + ": TX buffer overflow");
  if (s.tx_outstanding > s.tx_buffer_fill)
    throw SimulationError("accelerator " + std::to_string(s.acc_index) + ": TX claimed beyond fill");
}

}  // namespace ushare
