#pragma once

// Self-contained accelerator commands, compact scatter-gather lists, command
// classification into per-group queues, and the queues themselves.

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashare/sim_core.hpp"

namespace ushare {

inline constexpr std::uint64_t kDefaultPageSize = 4096;
inline constexpr std::size_t kDefaultQueueCapacity = 64;

class SgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SgElement {
  std::uint64_t address = 0;
  std::uint64_t length = 0;

  friend bool operator==(const SgElement&, const SgElement&) = default;
};

// Middle elements are implicitly page_size long, so only the first and last
// lengths are stored. With one address, first_length is the whole list and
// last_length is ignored.
struct CompactSgList {
  std::uint64_t first_length = 0;
  std::uint64_t last_length = 0;
  std::vector<std::uint64_t> addresses;
  std::uint64_t page_size = kDefaultPageSize;

  std::size_t count() const { return addresses.size(); }

  friend bool operator==(const CompactSgList&, const CompactSgList&) = default;
};

inline CompactSgList compact_sg(const std::vector<SgElement>& elements,
                                std::uint64_t page_size = kDefaultPageSize) {
  if (page_size == 0) throw SgError("compact_sg: page_size must be positive");
  if (elements.empty()) throw SgError("compact_sg: empty element list");
  CompactSgList out;
  out.page_size = page_size;
  out.addresses.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.length == 0 || e.length > page_size)
      throw SgError("compact_sg: element " + std::to_string(i) + " length " +
                    std::to_string(e.length) + " outside [1, page_size]");
    const bool middle = i != 0 && i + 1 != elements.size();
    if (middle && e.length != page_size)
      throw SgError("compact_sg: middle element " + std::to_string(i) + " has length " +
                    std::to_string(e.length) + ", expected " + std::to_string(page_size));
    out.addresses.push_back(e.address);
  }
  out.first_length = elements.front().length;
  out.last_length = elements.size() > 1 ? elements.back().length : 0;
  return out;
}

inline void validate(const CompactSgList& list) {
  if (list.addresses.empty()) throw SgError("sg list has no addresses");
  if (list.page_size == 0) throw SgError("sg list page_size must be positive");
  if (list.first_length == 0 || list.first_length > list.page_size)
    throw SgError("sg list first_length outside [1, page_size]");
  if (list.count() > 1 && (list.last_length == 0 || list.last_length > list.page_size))
    throw SgError("sg list last_length outside [1, page_size]");
}

inline std::uint64_t total_bytes(const CompactSgList& list) {
  const auto n = list.count();
  if (n == 0) return 0;
  if (n == 1) return list.first_length;
  return list.first_length + (n - 2) * list.page_size + list.last_length;
}

// Builds the list describing a host buffer of `bytes` that starts `offset`
// bytes into its first page. Page addresses come from `page_numbers`
// (one per touched page); the first address carries the offset.
inline CompactSgList make_sg_list(std::uint64_t bytes, std::uint64_t offset,
                                  const std::vector<std::uint64_t>& page_numbers,
                                  std::uint64_t page_size = kDefaultPageSize) {
  if (bytes == 0) throw SgError("make_sg_list: zero-length buffer");
  if (offset >= page_size) throw SgError("make_sg_list: offset must be < page_size");
  const std::uint64_t pages = (offset + bytes + page_size - 1) / page_size;
  if (page_numbers.size() < pages) throw SgError("make_sg_list: not enough page addresses");
  CompactSgList out;
  out.page_size = page_size;
  for (std::uint64_t i = 0; i < pages; ++i)
    out.addresses.push_back(page_numbers[i] * page_size + (i == 0 ? offset : 0));
  if (pages == 1) {
    out.first_length = bytes;
  } else {
    out.first_length = page_size - offset;
    out.last_length = bytes - out.first_length - (pages - 2) * page_size;
  }
  return out;
}

inline std::uint64_t pages_spanned(std::uint64_t bytes, std::uint64_t offset,
                                   std::uint64_t page_size = kDefaultPageSize) {
  return (offset + bytes + page_size - 1) / page_size;
}

struct Command {
  std::uint64_t command_id = 0;
  std::uint32_t core_id = 0;
  std::uint32_t acc_type = 0;
  std::vector<CompactSgList> rx_lists;
  std::vector<CompactSgList> tx_lists;
  SimTime submit_time = 0;

  // Not part of the wire command; lets the host side route completions.
  std::uint32_t app_id = 0;
  std::uint32_t thread_id = 0;
  // Static mode only: the accelerator a thread is pinned to.
  std::optional<std::uint32_t> pinned_acc;

  friend bool operator==(const Command&, const Command&) = default;
};

inline std::uint64_t rx_total_bytes(const Command& c) {
  std::uint64_t s = 0;
  for (const auto& l : c.rx_lists) s += total_bytes(l);
  return s;
}

inline std::uint64_t tx_total_bytes(const Command& c) {
  std::uint64_t s = 0;
  for (const auto& l : c.tx_lists) s += total_bytes(l);
  return s;
}

inline void validate(const Command& c, std::uint32_t num_types) {
  if (c.rx_lists.empty() || c.tx_lists.empty())
    throw SgError("command " + std::to_string(c.command_id) + " needs at least one RX and TX list");
  if (c.acc_type >= num_types)
    throw SgError("command " + std::to_string(c.command_id) + " requests unknown type " +
                  std::to_string(c.acc_type));
  for (const auto& l : c.rx_lists) validate(l);
  for (const auto& l : c.tx_lists) validate(l);
}

// One-level type grouping: type -> group (queue) index.
struct Grouping {
  std::vector<std::optional<std::size_t>> type_to_group;
  std::size_t num_groups = 0;

  static Grouping one_per_type(std::size_t num_types) {
    Grouping g;
    g.num_groups = num_types;
    for (std::size_t i = 0; i < num_types; ++i) g.type_to_group.emplace_back(i);
    return g;
  }

  static Grouping single_group(std::size_t num_types) {
    Grouping g;
    g.num_groups = 1;
    g.type_to_group.assign(num_types, std::size_t{0});
    return g;
  }
};

class UnmappedCommand : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

inline std::size_t classify_command(const Command& cmd, const Grouping& grouping) {
  if (cmd.acc_type >= grouping.type_to_group.size() || !grouping.type_to_group[cmd.acc_type])
    throw UnmappedCommand("acc_type " + std::to_string(cmd.acc_type) + " is not mapped to a group");
  return *grouping.type_to_group[cmd.acc_type];
}

enum class EnqueueResult { accepted, rejected_full };

class CommandQueue {
 public:
  explicit CommandQueue(std::size_t group_id = 0, std::size_t capacity = kDefaultQueueCapacity)
      : group_id_(group_id), capacity_(capacity) {}

  std::size_t group_id() const { return group_id_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return entries_.size() >= capacity_; }

  EnqueueResult enqueue(Command cmd) {
    if (full()) return EnqueueResult::rejected_full;
    entries_.push_back(std::move(cmd));
    return EnqueueResult::accepted;
  }

  const Command& head() const {
    if (entries_.empty()) throw std::logic_error("head() on empty command queue");
    return entries_.front();
  }

  Command dequeue() {
    if (entries_.empty()) throw std::logic_error("dequeue() on empty command queue");
    Command c = std::move(entries_.front());
    entries_.pop_front();
    return c;
  }

 private:
  std::size_t group_id_;
  std::size_t capacity_;
  std::deque<Command> entries_;
};

}  // namespace ushare
