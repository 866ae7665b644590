#pragma once

// Trace records and the metrics derived from them. A report depends only on
// the trace header and the record stream, so replaying a dumped trace yields
// the same report as the live run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashare/sim_core.hpp"

namespace ushare {

enum class RecordKind : std::uint8_t {
  submit,
  reject,
  backpressure,
  enqueue,
  allocate,
  sg_fetch_complete,
  rx_start,
  rx_complete,
  tx_start,
  tx_complete,
  compute_done,
  complete,
  reconfigure,
  reweight,
};

inline constexpr RecordKind kAllRecordKinds[] = {
    RecordKind::submit,      RecordKind::reject,       RecordKind::backpressure,
    RecordKind::enqueue,     RecordKind::allocate,     RecordKind::sg_fetch_complete,
    RecordKind::rx_start,    RecordKind::rx_complete,  RecordKind::tx_start,
    RecordKind::tx_complete, RecordKind::compute_done, RecordKind::complete,
    RecordKind::reconfigure, RecordKind::reweight,
};

inline const char* to_string(RecordKind k) {
  switch (k) {
    case RecordKind::submit: return "submit";
    case RecordKind::reject: return "reject";
    case RecordKind::backpressure: return "backpressure";
    case RecordKind::enqueue: return "enqueue";
    case RecordKind::allocate: return "allocate";
    case RecordKind::sg_fetch_complete: return "sg_fetch_complete";
    case RecordKind::rx_start: return "rx_start";
    case RecordKind::rx_complete: return "rx_complete";
    case RecordKind::tx_start: return "tx_start";
    case RecordKind::tx_complete: return "tx_complete";
    case RecordKind::compute_done: return "compute_done";
    case RecordKind::complete: return "complete";
    case RecordKind::reconfigure: return "reconfigure";
    case RecordKind::reweight: return "reweight";
  }
  return "unknown";
}

inline RecordKind record_kind_from_string(const std::string& s) {
  for (RecordKind k : kAllRecordKinds)
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown trace record kind '" + s + "'");
}

// submit: bytes = RX total, aux = TX total, queue = target queue.
// reject: aux = 0 for an unmapped type.
// rx_*/tx_*: bytes = element length, aux = element address.
struct TraceRecord {
  SimTime time = 0;
  RecordKind kind = RecordKind::submit;
  std::uint64_t command_id = 0;
  std::uint32_t app = 0;
  std::uint32_t acc = 0;
  std::uint32_t queue = 0;
  std::uint64_t bytes = 0;
  std::uint64_t aux = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceHeader {
  std::uint32_t accelerators = 0;
  std::uint32_t apps = 0;
  std::uint32_t queues = 0;
  double rx_bandwidth = 1.0;
  double tx_bandwidth = 1.0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct AccelMetrics {
  std::uint64_t requests_completed = 0;
  SimTime busy_time = 0;
  SimTime idle_time = 0;
  std::uint64_t rx_bytes = 0;
  std::uint64_t tx_bytes = 0;
  double rx_share = 0.0;  // of link capacity-time
  double tx_share = 0.0;

  friend bool operator==(const AccelMetrics&, const AccelMetrics&) = default;
};

struct AppMetrics {
  std::uint64_t submitted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t requests_completed = 0;
  std::uint64_t incomplete = 0;
  double throughput_rps = 0.0;
  double latency_mean = 0.0;
  SimTime latency_p50 = 0;
  SimTime latency_p95 = 0;
  SimTime latency_p99 = 0;
  SimTime latency_max = 0;
  SimTime attributed_busy_time = 0;

  friend bool operator==(const AppMetrics&, const AppMetrics&) = default;
};

struct QueueMetrics {
  std::uint64_t enqueued = 0;
  std::uint64_t max_depth = 0;
  SimTime total_wait_time = 0;
  std::uint64_t backpressure_events = 0;
  std::uint64_t waiting_at_end = 0;

  friend bool operator==(const QueueMetrics&, const QueueMetrics&) = default;
};

struct CompletionRecord {
  std::uint64_t command_id = 0;
  std::uint32_t app = 0;
  std::uint32_t acc = 0;
  SimTime submit_time = 0;
  SimTime complete_time = 0;
  SimTime latency = 0;

  friend bool operator==(const CompletionRecord&, const CompletionRecord&) = default;
};

struct MetricsReport {
  SimTime duration = 0;
  std::vector<AccelMetrics> accelerators;
  std::vector<AppMetrics> apps;
  std::vector<QueueMetrics> queues;
  double rx_link_utilization = 0.0;
  double tx_link_utilization = 0.0;
  std::uint64_t rejected_unmapped = 0;
  std::uint64_t total_rx_bytes = 0;
  std::uint64_t total_tx_bytes = 0;
  std::vector<CompletionRecord> completions;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Nearest-rank percentile over an already sorted sample.
inline SimTime percentile(const std::vector<SimTime>& sorted, double p) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  return sorted[std::min(rank, sorted.size()) - 1];
}

class MetricsCollector {
 public:
  explicit MetricsCollector(TraceHeader header)
      : header_(header),
        accs_(header.accelerators),
        apps_(header.apps),
        queues_(header.queues),
        busy_(header.accelerators),
        latencies_(header.apps),
        depth_(header.queues, 0) {}

  const TraceHeader& header() const { return header_; }

  void record_event(const TraceRecord& r) {
    switch (r.kind) {
      case RecordKind::submit: {
        app(r.app).submitted++;
        commands_[r.command_id] = Pending{r.app, r.queue, r.time, 0, false, false};
        break;
      }
      case RecordKind::reject:
        app(r.app).rejected++;
        ++rejected_unmapped_;
        commands_.erase(r.command_id);
        break;
      case RecordKind::backpressure:
        queue(r.queue).backpressure_events++;
        break;
      case RecordKind::enqueue: {
        auto& q = queue(r.queue);
        q.enqueued++;
        q.max_depth = std::max<std::uint64_t>(q.max_depth, ++depth_[r.queue]);
        auto& p = pending(r.command_id);
        p.enqueue_time = r.time;
        p.enqueued = true;
        break;
      }
      case RecordKind::allocate: {
        auto& p = pending(r.command_id);
        --depth_.at(r.queue);
        queue(r.queue).total_wait_time += r.time - p.enqueue_time;
        p.allocated = true;
        auto& b = busy_.at(r.acc);
        if (b) throw std::invalid_argument("trace: accelerator " + std::to_string(r.acc) + " allocated while busy");
        b = Busy{r.command_id, p.app, r.time};
        break;
      }
      case RecordKind::rx_start:
      case RecordKind::tx_start: {
        auto& since = r.kind == RecordKind::rx_start ? rx_busy_since_ : tx_busy_since_;
        since = r.time;
        break;
      }
      case RecordKind::rx_complete:
        acc(r.acc).rx_bytes += r.bytes;
        total_rx_ += r.bytes;
        if (rx_busy_since_) rx_link_busy_ += r.time - *rx_busy_since_;
        rx_busy_since_.reset();
        break;
      case RecordKind::tx_complete:
        acc(r.acc).tx_bytes += r.bytes;
        total_tx_ += r.bytes;
        if (tx_busy_since_) tx_link_busy_ += r.time - *tx_busy_since_;
        tx_busy_since_.reset();
        break;
      case RecordKind::complete: {
        auto it = commands_.find(r.command_id);
        if (it == commands_.end())
          throw std::invalid_argument("trace: completion for unknown command " + std::to_string(r.command_id));
        auto& b = busy_.at(r.acc);
        if (!b || b->command_id != r.command_id)
          throw std::invalid_argument("trace: completion on accelerator not serving that command");
        const SimTime span = r.time - b->since;
        acc(r.acc).busy_time += span;
        acc(r.acc).requests_completed++;
        app(b->app).attributed_busy_time += span;
        b.reset();
        const SimTime latency = r.time - it->second.submit_time;
        app(it->second.app).requests_completed++;
        latencies_.at(it->second.app).push_back(latency);
        completions_.push_back({r.command_id, it->second.app, r.acc, it->second.submit_time, r.time, latency});
        commands_.erase(it);
        break;
      }
      case RecordKind::sg_fetch_complete:
      case RecordKind::compute_done:
      case RecordKind::reconfigure:
      case RecordKind::reweight:
        break;
    }
    last_time_ = std::max(last_time_, r.time);
  }

  MetricsReport finish(SimTime end) const {
    if (end < last_time_) throw std::invalid_argument("finish: end precedes last record");
    MetricsReport rep;
    rep.duration = end;
    rep.accelerators = accs_;
    rep.apps = apps_;
    rep.queues = queues_;
    rep.rejected_unmapped = rejected_unmapped_;
    rep.total_rx_bytes = total_rx_;
    rep.total_tx_bytes = total_tx_;
    rep.completions = completions_;

    for (std::size_t i = 0; i < busy_.size(); ++i) {
      if (!busy_[i]) continue;
      const SimTime span = end - busy_[i]->since;
      rep.accelerators[i].busy_time += span;
      rep.apps.at(busy_[i]->app).attributed_busy_time += span;
    }
    const double secs = static_cast<double>(end) / static_cast<double>(kSec);
    const double rx_cap = header_.rx_bandwidth * static_cast<double>(end);
    const double tx_cap = header_.tx_bandwidth * static_cast<double>(end);
    for (auto& a : rep.accelerators) {
      a.idle_time = end - a.busy_time;
      a.rx_share = end ? static_cast<double>(a.rx_bytes) / rx_cap : 0.0;
      a.tx_share = end ? static_cast<double>(a.tx_bytes) / tx_cap : 0.0;
    }
    for (std::size_t i = 0; i < rep.apps.size(); ++i) {
      auto& a = rep.apps[i];
      a.incomplete = a.submitted - a.rejected - a.requests_completed;
      a.throughput_rps = end ? static_cast<double>(a.requests_completed) / secs : 0.0;
      auto lat = latencies_[i];
      std::sort(lat.begin(), lat.end());
      if (!lat.empty()) {
        long double sum = 0;
        for (SimTime v : lat) sum += v;
        a.latency_mean = static_cast<double>(sum / lat.size());
        a.latency_p50 = percentile(lat, 50);
        a.latency_p95 = percentile(lat, 95);
        a.latency_p99 = percentile(lat, 99);
        a.latency_max = lat.back();
      }
    }
    for (std::size_t q = 0; q < rep.queues.size(); ++q) rep.queues[q].waiting_at_end = depth_[q];
    // queued-but-unallocated commands contribute their wait up to the cutoff
    for (const auto& [id, p] : commands_) {
      (void)id;
      if (p.enqueued && !p.allocated) rep.queues.at(p.queue).total_wait_time += end - p.enqueue_time;
    }
    SimTime rx_busy = rx_link_busy_ + (rx_busy_since_ ? end - *rx_busy_since_ : 0);
    SimTime tx_busy = tx_link_busy_ + (tx_busy_since_ ? end - *tx_busy_since_ : 0);
    rep.rx_link_utilization = end ? static_cast<double>(rx_busy) / static_cast<double>(end) : 0.0;
    rep.tx_link_utilization = end ? static_cast<double>(tx_busy) / static_cast<double>(end) : 0.0;
    return rep;
  }

 private:
  struct Pending {
    std::uint32_t app = 0;
    std::uint32_t queue = 0;
    SimTime submit_time = 0;
    SimTime enqueue_time = 0;
    bool enqueued = false;
    bool allocated = false;
  };
  struct Busy {
    std::uint64_t command_id = 0;
    std::uint32_t app = 0;
    SimTime since = 0;
  };

  Pending& pending(std::uint64_t id) {
    auto it = commands_.find(id);
    if (it == commands_.end()) throw std::invalid_argument("trace: unknown command " + std::to_string(id));
    return it->second;
  }
  AccelMetrics& acc(std::uint32_t i) { return accs_.at(i); }
  AppMetrics& app(std::uint32_t i) { return apps_.at(i); }
  QueueMetrics& queue(std::uint32_t i) { return queues_.at(i); }

  TraceHeader header_;
  std::vector<AccelMetrics> accs_;
  std::vector<AppMetrics> apps_;
  std::vector<QueueMetrics> queues_;
  std::vector<std::optional<Busy>> busy_;
  std::vector<std::vector<SimTime>> latencies_;
  std::vector<std::uint64_t> depth_;
  std::map<std::uint64_t, Pending> commands_;
  std::vector<CompletionRecord> completions_;
  std::uint64_t rejected_unmapped_ = 0;
  std::uint64_t total_rx_ = 0;
  std::uint64_t total_tx_ = 0;
  std::optional<SimTime> rx_busy_since_;
  std::optional<SimTime> tx_busy_since_;
  SimTime rx_link_busy_ = 0;
  SimTime tx_link_busy_ = 0;
  SimTime last_time_ = 0;
};

}  // namespace ushare
