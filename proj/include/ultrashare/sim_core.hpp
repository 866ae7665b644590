#pragma once

// Deterministic discrete-event engine: virtual time in nanoseconds, an event
// queue ordered by (time, seq), and seedable per-stream pseudo-randomness.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace ushare {

// 1 tick = 1 ns of virtual time.
using SimTime = std::uint64_t;

inline constexpr SimTime kNs = 1;
inline constexpr SimTime kUs = 1000;
inline constexpr SimTime kMs = 1000 * kUs;
inline constexpr SimTime kSec = 1000 * kMs;

// Raised for contract violations inside the engine (scheduling in the past,
// ordering mismatches, buffer overflow). These indicate a bug, not bad input.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventKind : std::uint8_t {
  command_arrival,
  sg_fetch_complete,
  data_chunk_start,
  data_chunk_complete,
  compute_complete,
  scheduler_wakeup,
  compute_start,
  config_update,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::command_arrival: return "command_arrival";
    case EventKind::sg_fetch_complete: return "sg_fetch_complete";
    case EventKind::data_chunk_start: return "data_chunk_start";
    case EventKind::data_chunk_complete: return "data_chunk_complete";
    case EventKind::compute_complete: return "compute_complete";
    case EventKind::scheduler_wakeup: return "scheduler_wakeup";
    case EventKind::compute_start: return "compute_start";
    case EventKind::config_update: return "config_update";
  }
  return "unknown";
}

// Generic payload; each kind uses the subset of fields it needs.
struct EventPayload {
  std::uint64_t command_id = 0;
  std::uint32_t acc = 0;
  std::uint32_t app = 0;
  std::uint32_t thread = 0;
  std::uint32_t channel = 0;
  std::uint64_t bytes = 0;
  std::uint64_t aux = 0;

  friend bool operator==(const EventPayload&, const EventPayload&) = default;
};

struct SimEvent {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::scheduler_wakeup;
  EventPayload payload;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

using EventHandle = std::uint64_t;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Each stream is an independent mt19937_64 seeded with
// splitmix64(global_seed ^ splitmix64(stream_id)). Streams must be registered
// before use.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  void register_stream(std::uint64_t stream_id) {
    streams_.try_emplace(stream_id, splitmix64(seed_ ^ splitmix64(stream_id)));
  }

  bool has_stream(std::uint64_t stream_id) const { return streams_.count(stream_id) != 0; }

  std::uint64_t next(std::uint64_t stream_id) {
    auto it = streams_.find(stream_id);
    if (it == streams_.end())
      throw std::out_of_range("rng stream " + std::to_string(stream_id) + " is not registered");
    return it->second();
  }

  // Uniform integer in [lo, hi].
  std::uint64_t uniform(std::uint64_t stream_id, std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next(stream_id);
    // rejection sampling; unbiased for any span
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do {
      v = next(stream_id);
    } while (v >= limit);
    return lo + v % span;
  }

 private:
  std::uint64_t seed_;
  std::map<std::uint64_t, std::mt19937_64> streams_;
};

class Simulator {
 public:
  using Handler = std::function<void(const SimEvent&)>;

  explicit Simulator(std::uint64_t seed = 0) : rng_(seed) {}

  SimTime now() const { return now_; }

  void set_handler(Handler h) { handler_ = std::move(h); }

  // Observer sees every dispatched event before the handler runs.
  void set_observer(Handler h) { observer_ = std::move(h); }

  EventHandle schedule(SimTime time, EventKind kind, EventPayload payload = {}) {
    if (time < now_)
      throw SimulationError("schedule: event at t=" + std::to_string(time) +
                            " is in the past (now=" + std::to_string(now_) + ")");
    SimEvent ev{time, next_seq_++, kind, payload};
    queue_.push(ev);
    live_.insert(ev.seq);
    return ev.seq;
  }

  EventHandle schedule_in(SimTime delay, EventKind kind, EventPayload payload = {}) {
    return schedule(now_ + delay, kind, payload);
  }

  bool cancel(EventHandle h) {
    if (!live_.erase(h)) return false;
    cancelled_.insert(h);
    return true;
  }

  // Dispatches every event with time <= limit; the clock ends at limit.
  SimTime run_until(SimTime limit) {
    while (!queue_.empty() && queue_.top().time <= limit) {
      SimEvent ev = queue_.top();
      queue_.pop();
      if (cancelled_.erase(ev.seq)) continue;
      live_.erase(ev.seq);
      now_ = ev.time;
      ++dispatch_count_;
      if (observer_) observer_(ev);
      if (handler_) handler_(ev);
    }
    if (limit > now_) now_ = limit;
    return now_;
  }

  std::size_t pending() const { return live_.size(); }
  std::uint64_t dispatch_count() const { return dispatch_count_; }

  RngStreams& rng() { return rng_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatch_count_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::unordered_set<EventHandle> cancelled_;
  std::unordered_set<EventHandle> live_;
  Handler handler_;
  Handler observer_;
  RngStreams rng_;
};

}  // namespace ushare
