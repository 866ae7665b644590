#pragma once

// Dynamic accelerator allocation: round-robin over group queues, idle mask
// = status & group row, lowest-numbered idle accelerator wins.

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashare/command_model.hpp"

namespace ushare {

using AccMask = std::vector<bool>;

// Lowest index with the bit set (the rightmost 1 when index 0 is the LSB).
inline std::optional<std::size_t> rightmost_idle(const AccMask& idle_mask) {
  for (std::size_t i = 0; i < idle_mask.size(); ++i)
    if (idle_mask[i]) return i;
  return std::nullopt;
}

inline AccMask mask_and(const AccMask& a, const AccMask& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mask_and: width mismatch");
  AccMask r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] && b[i];
  return r;
}

class GroupTable {
 public:
  GroupTable() = default;
  GroupTable(std::size_t groups, std::size_t accelerators)
      : k_(accelerators), rows_(groups, AccMask(accelerators, false)) {}

  // Identity mapping: group i holds exactly accelerator i.
  static GroupTable identity(std::size_t k) {
    GroupTable t(k, k);
    for (std::size_t i = 0; i < k; ++i) t.rows_[i][i] = true;
    return t;
  }

  static GroupTable all_ones(std::size_t groups, std::size_t k) {
    GroupTable t(groups, k);
    for (auto& r : t.rows_) r.assign(k, true);
    return t;
  }

  std::size_t groups() const { return rows_.size(); }
  std::size_t accelerators() const { return k_; }

  const AccMask& row(std::size_t group) const { return rows_.at(group); }

  void set(std::size_t group, std::size_t acc, bool member = true) {
    if (group >= rows_.size() || acc >= k_) throw std::out_of_range("GroupTable::set out of range");
    rows_[group][acc] = member;
  }

  void reconfigure(std::size_t group, AccMask new_row) {
    if (group >= rows_.size())
      throw std::out_of_range("reconfigure: group " + std::to_string(group) + " >= " +
                              std::to_string(rows_.size()));
    if (new_row.size() != k_)
      throw std::invalid_argument("reconfigure: row width " + std::to_string(new_row.size()) +
                                  " != " + std::to_string(k_));
    rows_[group] = std::move(new_row);
  }

  friend bool operator==(const GroupTable&, const GroupTable&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<AccMask> rows_;
};

// true = idle. Busy/idle transitions are checked so a double allocation or a
// double release is caught where it happens.
class AcceleratorStatus {
 public:
  explicit AcceleratorStatus(std::size_t k = 0) : idle_(k, true) {}

  std::size_t size() const { return idle_.size(); }
  bool idle(std::size_t acc) const { return idle_.at(acc); }
  const AccMask& mask() const { return idle_; }

  void mark_busy(std::size_t acc) {
    if (!idle_.at(acc)) throw SimulationError("accelerator " + std::to_string(acc) + " allocated twice");
    idle_[acc] = false;
  }

  void mark_idle(std::size_t acc) {
    if (idle_.at(acc)) throw SimulationError("accelerator " + std::to_string(acc) + " released while idle");
    idle_[acc] = true;
  }

 private:
  AccMask idle_;
};

struct RoundRobinCursor {
  std::size_t next = 0;
};

struct Allocation {
  std::size_t queue = 0;
  Command command;
  std::size_t acc = 0;
};

// Admits every accelerator; the default per-command filter.
struct AnyAccelerator {
  const AccMask* operator()(const Command&) const { return nullptr; }
};

// One pass of the allocator. Scans at most t queues starting at the cursor
// and serves the first non-empty queue whose idle mask (status & row, further
// narrowed by `command_mask(head)` when it returns non-null) has a set bit.
// On success the accelerator is marked busy and the cursor moves past the
// served queue; otherwise the cursor is left where a full scan ends.
template <class MaskFn = AnyAccelerator>
std::optional<Allocation> allocate_step(AcceleratorStatus& status, const GroupTable& table,
                                        std::vector<CommandQueue>& queues, RoundRobinCursor& rr,
                                        MaskFn&& command_mask = {}) {
  const std::size_t t = table.groups();
  if (t == 0) return std::nullopt;
  if (queues.size() != t) throw std::invalid_argument("allocate_step: queue count != group count");
  if (status.size() != table.accelerators())
    throw std::invalid_argument("allocate_step: status width != table width");
  if (rr.next >= t) throw std::out_of_range("allocate_step: cursor out of range");

  for (std::size_t step = 0; step < t; ++step) {
    const std::size_t q = (rr.next + step) % t;
    if (queues[q].empty()) continue;
    AccMask idle = mask_and(status.mask(), table.row(q));
    if (const AccMask* extra = command_mask(queues[q].head())) idle = mask_and(idle, *extra);
    const auto acc = rightmost_idle(idle);
    if (!acc) continue;
    status.mark_busy(*acc);
    rr.next = (q + 1) % t;
    return Allocation{q, queues[q].dequeue(), *acc};
  }
  return std::nullopt;
}

struct RequestInfo {
  std::uint64_t command_id = 0;
  std::size_t allocated_acc = 0;
  std::vector<std::size_t> rx_list_lengths;
  std::vector<std::size_t> tx_list_lengths;
  bool rx_delivered = false;
  bool tx_delivered = false;
};

inline RequestInfo make_request_info(const Allocation& a) {
  RequestInfo info;
  info.command_id = a.command.command_id;
  info.allocated_acc = a.acc;
  for (const auto& l : a.command.rx_lists) info.rx_list_lengths.push_back(l.count());
  for (const auto& l : a.command.tx_lists) info.tx_list_lengths.push_back(l.count());
  return info;
}

using RequestInfoQueue = std::deque<RequestInfo>;

inline constexpr SimTime kDefaultSgFetchLatency = 500;

// Command requester: records the allocation and asks the DMA for the
// command's SG lists. The allocator is free again as soon as this returns.
inline EventHandle request_sg_fetch(Simulator& sim, RequestInfoQueue& infos, const Allocation& a,
                                    SimTime sg_fetch_latency = kDefaultSgFetchLatency) {
  infos.push_back(make_request_info(a));
  EventPayload p;
  p.command_id = a.command.command_id;
  p.acc = static_cast<std::uint32_t>(a.acc);
  return sim.schedule_in(sg_fetch_latency, EventKind::sg_fetch_complete, p);
}

}  // namespace ushare
