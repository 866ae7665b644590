#pragma once

// Shared host<->FPGA link. RX and TX are independent channels; each one is
// arbitrated by its own weighted round-robin data-request scheduler and
// carries one SG element transfer at a time.

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashare/accel_controller.hpp"
#include "ultrashare/allocator.hpp"
#include "ultrashare/sg_engine.hpp"
#include "ultrashare/sim_core.hpp"

namespace ushare {

inline constexpr SimTime kDefaultTransferOverhead = 200;
inline constexpr std::uint32_t kMaxWeight = 255;

class PriorityTable {
 public:
  PriorityTable() = default;
  explicit PriorityTable(std::vector<std::uint32_t> weights) : weights_(std::move(weights)) {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] == 0)
        throw std::invalid_argument("priority weight for accelerator " + std::to_string(i) + " is 0");
      if (weights_[i] > kMaxWeight)
        throw std::invalid_argument("priority weight for accelerator " + std::to_string(i) +
                                    " exceeds " + std::to_string(kMaxWeight));
    }
  }

  static PriorityTable uniform(std::size_t k) { return PriorityTable(std::vector<std::uint32_t>(k, 1)); }

  std::size_t size() const { return weights_.size(); }
  std::uint32_t operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<std::uint32_t>& weights() const { return weights_; }

  friend bool operator==(const PriorityTable&, const PriorityTable&) = default;

 private:
  std::vector<std::uint32_t> weights_;
};

// Weighted round robin: a visit to accelerator `a` grants up to weights[a]
// requests. A visit ends early as soon as `a` has nothing pending, so the
// link never waits on an accelerator with no request.
class WrrScheduler {
 public:
  WrrScheduler() = default;
  explicit WrrScheduler(PriorityTable weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw std::invalid_argument("WrrScheduler needs at least one accelerator");
    remaining_ = weights_[0];
  }

  std::size_t size() const { return weights_.size(); }
  std::size_t cursor() const { return acc_; }
  std::uint32_t remaining() const { return remaining_; }
  const PriorityTable& weights() const { return weights_; }

  // New weights are adopted when the next visit begins.
  void set_priority_table(PriorityTable w) {
    if (w.size() != weights_.size())
      throw std::invalid_argument("set_priority_table: expected " + std::to_string(weights_.size()) +
                                  " weights, got " + std::to_string(w.size()));
    staged_ = std::move(w);
  }

  std::optional<std::size_t> schedule_step(const AccMask& pending) {
    const std::size_t k = weights_.size();
    if (pending.size() != k) throw std::invalid_argument("schedule_step: pending width mismatch");
    bool any = false;
    for (bool p : pending) any = any || p;
    if (!any) return std::nullopt;
    for (std::size_t visits = 0; visits <= k; ++visits) {
      if (pending[acc_] && remaining_ > 0) {
        const std::size_t granted = acc_;
        if (--remaining_ == 0) advance();
        return granted;
      }
      advance();
    }
    return std::nullopt;  // unreachable when some bit is set
  }

 private:
  void advance() {
    acc_ = (acc_ + 1) % weights_.size();
    if (staged_) {
      weights_ = std::move(*staged_);
      staged_.reset();
    }
    remaining_ = weights_[acc_];
  }

  PriorityTable weights_;
  std::optional<PriorityTable> staged_;
  std::size_t acc_ = 0;
  std::uint32_t remaining_ = 0;
};

struct LinkStall {
  Direction channel = Direction::rx;
  SimTime start = 0;
  SimTime duration = 0;

  friend bool operator==(const LinkStall&, const LinkStall&) = default;
};

struct LinkModel {
  double rx_bandwidth = 4.0;  // bytes/ns
  double tx_bandwidth = 4.0;
  SimTime per_transfer_overhead = kDefaultTransferOverhead;
  // Windows during which a channel starts no new transfer.
  std::vector<LinkStall> stalls;

  double bandwidth(Direction d) const { return d == Direction::rx ? rx_bandwidth : tx_bandwidth; }

  friend bool operator==(const LinkModel&, const LinkModel&) = default;
};

inline void validate(const LinkModel& m) {
  if (!(m.rx_bandwidth > 0.0) || !std::isfinite(m.rx_bandwidth))
    throw std::invalid_argument("link rx_bandwidth must be > 0");
  if (!(m.tx_bandwidth > 0.0) || !std::isfinite(m.tx_bandwidth))
    throw std::invalid_argument("link tx_bandwidth must be > 0");
}

inline SimTime transfer_time(std::uint64_t bytes, double bandwidth, SimTime overhead) {
  return overhead + static_cast<SimTime>(std::ceil(static_cast<double>(bytes) / bandwidth));
}

class LinkChannel {
 public:
  LinkChannel(Direction dir, const LinkModel& model, PriorityTable weights)
      : dir_(dir),
        bandwidth_(model.bandwidth(dir)),
        overhead_(model.per_transfer_overhead),
        scheduler_(std::move(weights)) {
    for (const auto& s : model.stalls)
      if (s.channel == dir && s.duration > 0) stalls_.push_back(s);
  }

  Direction direction() const { return dir_; }
  bool busy() const { return !in_flight_.empty(); }
  WrrScheduler& scheduler() { return scheduler_; }
  const WrrScheduler& scheduler() const { return scheduler_; }

  SimTime transfer_time(std::uint64_t bytes) const { return ushare::transfer_time(bytes, bandwidth_, overhead_); }

  // End of the stall window covering `now`, if any.
  std::optional<SimTime> stalled_until(SimTime now) const {
    for (const auto& s : stalls_)
      if (now >= s.start && now < s.start + s.duration) return s.start + s.duration;
    return std::nullopt;
  }

  // Starts moving `req` now; the completion event carries the channel,
  // accelerator and byte count.
  EventHandle begin_transfer(Simulator& sim, const DataRequest& req) {
    if (busy())
      throw SimulationError(std::string("begin_transfer: ") + to_string(dir_) + " channel already busy");
    in_flight_.push_back(req);
    busy_since_ = sim.now();
    EventPayload p;
    p.channel = static_cast<std::uint32_t>(dir_);
    p.acc = static_cast<std::uint32_t>(req.acc_index);
    p.bytes = req.element.length;
    p.aux = req.element.address;
    return sim.schedule_in(transfer_time(req.element.length), EventKind::data_chunk_complete, p);
  }

  // Pops the data request information entry for the transfer that just
  // finished and tells the caller which accelerator the data belongs to.
  DataRequest complete_transfer(SimTime now) {
    if (in_flight_.empty())
      throw SimulationError(std::string("complete_transfer: nothing in flight on ") + to_string(dir_));
    DataRequest r = in_flight_.front();
    in_flight_.pop_front();
    busy_time_ += now - busy_since_;
    return r;
  }

  SimTime busy_time() const { return busy_time_; }

 private:
  Direction dir_;
  double bandwidth_;
  SimTime overhead_;
  WrrScheduler scheduler_;
  std::deque<DataRequest> in_flight_;
  std::vector<LinkStall> stalls_;
  SimTime busy_since_ = 0;
  SimTime busy_time_ = 0;
};

}  // namespace ushare
