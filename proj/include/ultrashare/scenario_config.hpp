#pragma once

// Scenario description: accelerators, grouping, link, applications and the
// controller mode to run them under.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashare/accel_controller.hpp"
#include "ultrashare/allocator.hpp"
#include "ultrashare/command_model.hpp"
#include "ultrashare/transfer_link.hpp"

namespace ushare {

enum class ControllerMode : std::uint8_t { ultrashare, single_queue, static_alloc };

inline const char* to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::ultrashare: return "ultrashare";
    case ControllerMode::single_queue: return "single-queue";
    case ControllerMode::static_alloc: return "static";
  }
  return "unknown";
}

inline std::optional<ControllerMode> parse_mode(const std::string& s) {
  if (s == "ultrashare") return ControllerMode::ultrashare;
  if (s == "single-queue" || s == "single_queue") return ControllerMode::single_queue;
  if (s == "static") return ControllerMode::static_alloc;
  return std::nullopt;
}

// Host preparation cost per input byte when an app gives no explicit
// prep_time.
inline constexpr double kDefaultPrepNsPerByte = 0.01;

struct AppSpec {
  std::uint32_t acc_type = 0;
  // 0 = use the frame size of the first accelerator of acc_type.
  std::uint64_t frame_bytes_in = 0;
  std::uint64_t frame_bytes_out = 0;
  std::optional<SimTime> prep_time;
  double prep_ns_per_byte = kDefaultPrepNsPerByte;
  SimTime prep_jitter = 0;
  std::uint32_t max_outstanding = 1;
  std::optional<std::uint64_t> total_requests;  // unset = keep submitting until the run ends
  std::uint32_t threads = 1;
  std::vector<std::uint32_t> static_accelerators;  // one per thread, static mode
  SimTime start_time = 0;
  std::uint64_t buffer_offset = 0;  // first-page offset of host buffers
  bool random_offset = false;

  friend bool operator==(const AppSpec&, const AppSpec&) = default;
};

struct GroupSpec {
  std::vector<std::uint32_t> types;
  std::vector<std::uint32_t> accelerators;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

enum class ScenarioEventKind : std::uint8_t { reconfigure, reweight };

struct ScenarioEvent {
  SimTime time = 0;
  ScenarioEventKind kind = ScenarioEventKind::reconfigure;
  std::size_t group = 0;
  std::vector<std::uint32_t> row_accelerators;  // reconfigure: members of the new row
  std::vector<std::uint32_t> weights;           // reweight

  friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct ScenarioConfig {
  std::vector<AccelParams> accelerators;
  std::vector<GroupSpec> groups;         // empty = one group per type
  std::vector<std::uint32_t> priority;   // empty = uniform
  LinkModel link;
  std::uint64_t page_size = kDefaultPageSize;
  std::uint64_t pages_per_buffer = kDefaultPagesPerBuffer;
  std::size_t queue_capacity = kDefaultQueueCapacity;
  SimTime sg_fetch_latency = kDefaultSgFetchLatency;
  std::vector<AppSpec> apps;
  std::vector<ScenarioEvent> events;
  ControllerMode mode = ControllerMode::ultrashare;
  std::uint64_t seed = 1;
  SimTime duration = 10 * kMs;

  std::uint32_t num_types() const {
    std::uint32_t n = 0;
    for (const auto& a : accelerators) n = std::max(n, a.acc_type + 1);
    return n;
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string s = "invalid scenario:";
    for (const auto& e : errors) s += "\n  " + e;
    return s;
  }
  std::vector<std::string> errors_;
};

inline std::vector<GroupSpec> effective_groups(const ScenarioConfig& cfg) {
  if (!cfg.groups.empty()) return cfg.groups;
  std::vector<GroupSpec> g(cfg.num_types());
  for (std::uint32_t t = 0; t < g.size(); ++t) g[t].types = {t};
  for (std::size_t i = 0; i < cfg.accelerators.size(); ++i)
    g[cfg.accelerators[i].acc_type].accelerators.push_back(static_cast<std::uint32_t>(i));
  return g;
}

// Number of command queues the allocator sees under the configured mode.
inline std::size_t queue_count(const ScenarioConfig& cfg) {
  switch (cfg.mode) {
    case ControllerMode::single_queue: return 1;
    case ControllerMode::static_alloc: return cfg.accelerators.size();
    case ControllerMode::ultrashare: return effective_groups(cfg).size();
  }
  return 0;
}

inline FrameShape app_frame(const ScenarioConfig& cfg, const AppSpec& app) {
  FrameShape f{app.frame_bytes_in, app.frame_bytes_out};
  for (const auto& a : cfg.accelerators) {
    if (a.acc_type != app.acc_type) continue;
    if (f.input_bytes == 0) f.input_bytes = a.input_bytes_per_frame;
    if (f.output_bytes == 0) f.output_bytes = a.output_bytes_per_frame;
    break;
  }
  return f;
}

inline std::vector<std::string> validation_errors(const ScenarioConfig& cfg) {
  std::vector<std::string> errs;
  auto err = [&](const std::string& path, const std::string& msg) { errs.push_back(path + ": " + msg); };
  const std::size_t k = cfg.accelerators.size();
  const std::uint32_t types = cfg.num_types();

  if (k == 0) err("accelerators", "at least one accelerator is required");
  if (cfg.page_size == 0) err("page_size", "must be > 0");
  if (cfg.pages_per_buffer == 0) err("pages_per_buffer", "must be >= 1");
  if (cfg.queue_capacity == 0) err("queue_capacity", "must be >= 1");
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = cfg.accelerators[i];
    const std::string p = "accelerators[" + std::to_string(i) + "]";
    if (!(a.process_rate > 0.0) || !std::isfinite(a.process_rate)) err(p + ".process_rate", "must be > 0");
    if (a.input_bytes_per_frame == 0) err(p + ".input_bytes_per_frame", "must be > 0");
    if (a.output_bytes_per_frame == 0) err(p + ".output_bytes_per_frame", "must be > 0");
  }
  for (std::uint32_t t = 0; t < types; ++t) {
    bool present = false;
    for (const auto& a : cfg.accelerators) present = present || a.acc_type == t;
    if (!present) err("accelerators", "type " + std::to_string(t) + " has no accelerator");
  }
  if (!(cfg.link.rx_bandwidth > 0.0) || !std::isfinite(cfg.link.rx_bandwidth)) err("link.rx_bandwidth", "must be > 0");
  if (!(cfg.link.tx_bandwidth > 0.0) || !std::isfinite(cfg.link.tx_bandwidth)) err("link.tx_bandwidth", "must be > 0");

  auto check_weights = [&](const std::string& path, const std::vector<std::uint32_t>& w) {
    if (w.size() != k)
      err(path, "expected " + std::to_string(k) + " weights, got " + std::to_string(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] == 0 || w[i] > kMaxWeight)
        err(path + "[" + std::to_string(i) + "]", "weight must be in [1, " + std::to_string(kMaxWeight) + "]");
  };
  if (!cfg.priority.empty()) check_weights("priority", cfg.priority);

  std::set<std::uint32_t> grouped_types;
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    const std::string p = "groups[" + std::to_string(g) + "]";
    for (std::size_t j = 0; j < cfg.groups[g].types.size(); ++j) {
      const auto t = cfg.groups[g].types[j];
      const std::string tp = p + ".types[" + std::to_string(j) + "]";
      if (t >= types) err(tp, "type " + std::to_string(t) + " does not exist (" + std::to_string(types) + " types)");
      if (!grouped_types.insert(t).second) err(tp, "type " + std::to_string(t) + " is already mapped to another group");
    }
    for (std::size_t j = 0; j < cfg.groups[g].accelerators.size(); ++j)
      if (cfg.groups[g].accelerators[j] >= k)
        err(p + ".accelerators[" + std::to_string(j) + "]",
            "accelerator " + std::to_string(cfg.groups[g].accelerators[j]) + " does not exist");
  }

  for (std::size_t i = 0; i < cfg.apps.size(); ++i) {
    const auto& a = cfg.apps[i];
    const std::string p = "apps[" + std::to_string(i) + "]";
    if (a.acc_type >= types)
      err(p + ".acc_type", "references type " + std::to_string(a.acc_type) + " but only " +
                               std::to_string(types) + " types exist");
    if (a.max_outstanding == 0) err(p + ".max_outstanding", "must be >= 1");
    if (a.threads == 0) err(p + ".threads", "must be >= 1");
    if (a.max_outstanding < a.threads) err(p + ".max_outstanding", "must be >= threads");
    if (a.buffer_offset >= cfg.page_size) err(p + ".buffer_offset", "must be < page_size");
    if (!(a.prep_ns_per_byte >= 0.0)) err(p + ".prep_ns_per_byte", "must be >= 0");
    if (cfg.mode == ControllerMode::static_alloc) {
      if (a.static_accelerators.size() != a.threads)
        err(p + ".static_accelerators", "static mode needs one accelerator index per thread");
      for (std::size_t j = 0; j < a.static_accelerators.size(); ++j) {
        const auto acc = a.static_accelerators[j];
        const std::string sp = p + ".static_accelerators[" + std::to_string(j) + "]";
        if (acc >= k)
          err(sp, "accelerator " + std::to_string(acc) + " does not exist");
        else if (cfg.accelerators[acc].acc_type != a.acc_type)
          err(sp, "accelerator " + std::to_string(acc) + " has type " +
                      std::to_string(cfg.accelerators[acc].acc_type) + ", app requests " +
                      std::to_string(a.acc_type));
      }
    }
  }

  const std::size_t t = queue_count(cfg);
  for (std::size_t i = 0; i < cfg.events.size(); ++i) {
    const auto& e = cfg.events[i];
    const std::string p = "events[" + std::to_string(i) + "]";
    if (e.kind == ScenarioEventKind::reconfigure) {
      if (e.group >= t) err(p + ".group", "group " + std::to_string(e.group) + " out of range (" + std::to_string(t) + " groups)");
      for (std::size_t j = 0; j < e.row_accelerators.size(); ++j)
        if (e.row_accelerators[j] >= k) err(p + ".accelerators[" + std::to_string(j) + "]", "accelerator does not exist");
    } else {
      check_weights(p + ".weights", e.weights);
    }
  }
  return errs;
}

inline void validate(const ScenarioConfig& cfg) {
  auto errs = validation_errors(cfg);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

}  // namespace ushare
