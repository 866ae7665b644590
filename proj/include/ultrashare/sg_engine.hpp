#pragma once

// Scatter-gather decoder and distributor.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ultrashare/accel_controller.hpp"
#include "ultrashare/allocator.hpp"

namespace ushare {

enum class Direction : std::uint8_t { rx, tx };

inline const char* to_string(Direction d) { return d == Direction::rx ? "rx" : "tx"; }

inline std::vector<SgElement> decode_sg(const CompactSgList& list) {
  if (list.addresses.empty()) throw SgError("decode_sg: empty address list");
  std::vector<SgElement> out;
  out.reserve(list.count());
  const std::size_t n = list.count();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t len = list.page_size;
    if (i == 0)
      len = list.first_length;
    else if (i + 1 == n)
      len = list.last_length;
    out.push_back({list.addresses[i], len});
  }
  return out;
}

struct SgStream {
  std::uint64_t command_id = 0;
  Direction direction = Direction::rx;
  std::vector<SgElement> elements;
  std::optional<std::size_t> target_acc;
};

inline SgStream decode_stream(std::uint64_t command_id, Direction dir,
                              const std::vector<CompactSgList>& lists) {
  SgStream s;
  s.command_id = command_id;
  s.direction = dir;
  for (const auto& l : lists) {
    auto elems = decode_sg(l);
    s.elements.insert(s.elements.end(), elems.begin(), elems.end());
  }
  return s;
}

// Hands decoded elements to the accelerator named by the head RequestInfo.
// The head entry is consumed once both directions have been delivered.
// Returns the accelerator index the elements went to.
inline std::size_t distribute(const SgStream& stream, RequestInfoQueue& infos,
                              std::vector<ControllerState>& controllers) {
  if (infos.empty())
    throw SimulationError("distribute: no request info for command " + std::to_string(stream.command_id));
  RequestInfo& info = infos.front();
  if (info.command_id != stream.command_id)
    throw SimulationError("distribute: command " + std::to_string(stream.command_id) +
                          " arrived but request info head is " + std::to_string(info.command_id));
  if (stream.target_acc && *stream.target_acc != info.allocated_acc)
    throw SimulationError("distribute: stream targets a different accelerator than was allocated");
  const auto& counts = stream.direction == Direction::rx ? info.rx_list_lengths : info.tx_list_lengths;
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) != stream.elements.size())
    throw SimulationError("distribute: element count mismatch for command " +
                          std::to_string(stream.command_id));
  bool& delivered = stream.direction == Direction::rx ? info.rx_delivered : info.tx_delivered;
  if (delivered)
    throw SimulationError("distribute: duplicate " + std::string(to_string(stream.direction)) +
                          " stream for command " + std::to_string(stream.command_id));

  ControllerState& ctrl = controllers.at(info.allocated_acc);
  auto& q = stream.direction == Direction::rx ? ctrl.rx_sg_queue : ctrl.tx_sg_queue;
  q.insert(q.end(), stream.elements.begin(), stream.elements.end());
  delivered = true;

  const std::size_t acc = info.allocated_acc;
  if (info.rx_delivered && info.tx_delivered) infos.pop_front();
  return acc;
}

}  // namespace ushare
