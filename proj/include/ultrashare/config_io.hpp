#pragma once

// JSON scenario configs, JSON/CSV/text reports, and line-delimited JSON traces.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultrashare/metrics.hpp"
#include "ultrashare/scenario_config.hpp"

namespace ushare {

using json = nlohmann::json;

// "1500", "1500ns", "10us", "2.5ms", "1s" -> ns.
inline std::optional<SimTime> parse_duration(const std::string& text) {
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(text, &pos);
  } catch (...) {
    return std::nullopt;
  }
  if (value < 0) return std::nullopt;
  const std::string unit = text.substr(pos);
  double scale = 1;
  if (unit.empty() || unit == "ns")
    scale = 1;
  else if (unit == "us")
    scale = 1e3;
  else if (unit == "ms")
    scale = 1e6;
  else if (unit == "s")
    scale = 1e9;
  else
    return std::nullopt;
  return static_cast<SimTime>(std::llround(value * scale));
}

namespace detail {

// Collects every problem in one pass so the user sees all field errors at once.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  const json* field(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object()) {
      error(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(join(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  void uint(const json& obj, const std::string& key, const std::string& path, T& out, bool required = false) {
    const json* v = field(obj, key, path, required);
    if (!v) return;
    if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
      error(join(path, key), "expected a non-negative integer");
      return;
    }
    out = static_cast<T>(v->get<std::uint64_t>());
  }

  void number(const json& obj, const std::string& key, const std::string& path, double& out, bool required = false) {
    const json* v = field(obj, key, path, required);
    if (!v) return;
    if (!v->is_number()) {
      error(join(path, key), "expected a number");
      return;
    }
    out = v->get<double>();
  }

  void time(const json& obj, const std::string& key, const std::string& path, SimTime& out, bool required = false) {
    const json* v = field(obj, key, path, required);
    if (!v) return;
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
      out = v->get<std::uint64_t>();
    } else if (v->is_string()) {
      if (auto t = parse_duration(v->get<std::string>()))
        out = *t;
      else
        error(join(path, key), "bad duration '" + v->get<std::string>() + "'");
    } else {
      error(join(path, key), "expected a duration (integer ns or string with ns/us/ms/s)");
    }
  }

  void uint_list(const json& obj, const std::string& key, const std::string& path, std::vector<std::uint32_t>& out,
                 bool required = false) {
    const json* v = field(obj, key, path, required);
    if (!v) return;
    if (!v->is_array()) {
      error(join(path, key), "expected an array");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
        error(join(path, key) + "[" + std::to_string(i) + "]", "expected a non-negative integer");
        continue;
      }
      out.push_back(e.get<std::uint32_t>());
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace detail

// Parses and validates. Structural (JSON) errors and semantic errors are
// reported together with field paths.
inline ScenarioConfig parse_config_json(const json& doc) {
  detail::Reader rd;
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ConfigError({"<root>: expected a JSON object"});

  rd.uint(doc, "page_size", "", cfg.page_size);
  rd.uint(doc, "pages_per_buffer", "", cfg.pages_per_buffer);
  rd.uint(doc, "queue_capacity", "", cfg.queue_capacity);
  rd.time(doc, "sg_fetch_latency", "", cfg.sg_fetch_latency);
  rd.uint(doc, "seed", "", cfg.seed);
  rd.time(doc, "duration", "", cfg.duration);
  if (const json* m = rd.field(doc, "mode", "", false)) {
    auto mode = m->is_string() ? parse_mode(m->get<std::string>()) : std::nullopt;
    if (mode)
      cfg.mode = *mode;
    else
      rd.error("mode", "expected one of ultrashare, single-queue, static");
  }

  if (const json* accs = rd.field(doc, "accelerators", "", true)) {
    if (!accs->is_array()) rd.error("accelerators", "expected an array");
    else
      for (std::size_t i = 0; i < accs->size(); ++i) {
        const json& a = (*accs)[i];
        const std::string p = detail::idx("accelerators", i);
        AccelParams ap;
        rd.uint(a, "type", p, ap.acc_type, true);
        rd.time(a, "startup_latency", p, ap.startup_latency);
        rd.number(a, "process_rate", p, ap.process_rate, true);
        rd.uint(a, "input_bytes_per_frame", p, ap.input_bytes_per_frame, true);
        rd.uint(a, "output_bytes_per_frame", p, ap.output_bytes_per_frame, true);
        std::uint64_t count = 1;
        rd.uint(a, "count", p, count);
        for (std::uint64_t c = 0; c < count; ++c) {
          ap.acc_index = cfg.accelerators.size();
          cfg.accelerators.push_back(ap);
        }
      }
  }

  if (const json* groups = rd.field(doc, "groups", "", false)) {
    if (!groups->is_array()) rd.error("groups", "expected an array");
    else
      for (std::size_t g = 0; g < groups->size(); ++g) {
        GroupSpec gs;
        const std::string p = detail::idx("groups", g);
        rd.uint_list((*groups)[g], "types", p, gs.types, true);
        rd.uint_list((*groups)[g], "accelerators", p, gs.accelerators, true);
        cfg.groups.push_back(std::move(gs));
      }
  }

  rd.uint_list(doc, "priority", "", cfg.priority);

  if (const json* link = rd.field(doc, "link", "", false)) {
    rd.number(*link, "rx_bandwidth", "link", cfg.link.rx_bandwidth);
    rd.number(*link, "tx_bandwidth", "link", cfg.link.tx_bandwidth);
    rd.time(*link, "per_transfer_overhead", "link", cfg.link.per_transfer_overhead);
    if (const json* stalls = rd.field(*link, "stalls", "link", false)) {
      if (!stalls->is_array()) rd.error("link.stalls", "expected an array");
      else
        for (std::size_t i = 0; i < stalls->size(); ++i) {
          const std::string p = detail::idx("link.stalls", i);
          LinkStall s;
          if (const json* ch = rd.field((*stalls)[i], "channel", p, true)) {
            if (ch->is_string() && (*ch == "rx" || *ch == "tx"))
              s.channel = *ch == "rx" ? Direction::rx : Direction::tx;
            else
              rd.error(p + ".channel", "expected \"rx\" or \"tx\"");
          }
          rd.time((*stalls)[i], "start", p, s.start, true);
          rd.time((*stalls)[i], "duration", p, s.duration, true);
          cfg.link.stalls.push_back(s);
        }
    }
  }

  if (const json* apps = rd.field(doc, "apps", "", true)) {
    if (!apps->is_array()) rd.error("apps", "expected an array");
    else
      for (std::size_t i = 0; i < apps->size(); ++i) {
        const json& a = (*apps)[i];
        const std::string p = detail::idx("apps", i);
        AppSpec s;
        rd.uint(a, "acc_type", p, s.acc_type, true);
        rd.uint(a, "frame_bytes_in", p, s.frame_bytes_in);
        rd.uint(a, "frame_bytes_out", p, s.frame_bytes_out);
        if (rd.field(a, "prep_time", p, false)) {
          SimTime t = 0;
          rd.time(a, "prep_time", p, t);
          s.prep_time = t;
        }
        rd.number(a, "prep_ns_per_byte", p, s.prep_ns_per_byte);
        rd.time(a, "prep_jitter", p, s.prep_jitter);
        rd.uint(a, "max_outstanding", p, s.max_outstanding);
        if (rd.field(a, "total_requests", p, false)) {
          std::uint64_t n = 0;
          rd.uint(a, "total_requests", p, n);
          s.total_requests = n;
        }
        rd.uint(a, "threads", p, s.threads);
        rd.uint_list(a, "static_accelerators", p, s.static_accelerators);
        rd.time(a, "start_time", p, s.start_time);
        if (const json* off = rd.field(a, "buffer_offset", p, false)) {
          if (off->is_string() && *off == "random")
            s.random_offset = true;
          else
            rd.uint(a, "buffer_offset", p, s.buffer_offset);
        }
        cfg.apps.push_back(std::move(s));
      }
  }

  if (const json* events = rd.field(doc, "events", "", false)) {
    if (!events->is_array()) rd.error("events", "expected an array");
    else
      for (std::size_t i = 0; i < events->size(); ++i) {
        const json& e = (*events)[i];
        const std::string p = detail::idx("events", i);
        ScenarioEvent ev;
        rd.time(e, "time", p, ev.time, true);
        if (const json* rc = rd.field(e, "reconfigure", p, false)) {
          ev.kind = ScenarioEventKind::reconfigure;
          rd.uint(*rc, "group", p + ".reconfigure", ev.group, true);
          rd.uint_list(*rc, "accelerators", p + ".reconfigure", ev.row_accelerators, true);
        } else if (rd.field(e, "priority", p, false)) {
          ev.kind = ScenarioEventKind::reweight;
          rd.uint_list(e, "priority", p, ev.weights, true);
        } else {
          rd.error(p, "expected a \"reconfigure\" or \"priority\" entry");
        }
        cfg.events.push_back(std::move(ev));
      }
  }

  if (rd.errors.empty()) rd.errors = validation_errors(cfg);
  if (!rd.errors.empty()) throw ConfigError(std::move(rd.errors));
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
}

inline ScenarioConfig parse_config(const std::string& path) { return parse_config_json(read_json_file(path)); }

// Inverse of parse_config_json (accelerators are written one entry each).
inline json config_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["page_size"] = cfg.page_size;
  doc["pages_per_buffer"] = cfg.pages_per_buffer;
  doc["queue_capacity"] = cfg.queue_capacity;
  doc["sg_fetch_latency"] = cfg.sg_fetch_latency;
  doc["seed"] = cfg.seed;
  doc["duration"] = cfg.duration;
  doc["mode"] = to_string(cfg.mode);
  doc["accelerators"] = json::array();
  for (const auto& a : cfg.accelerators)
    doc["accelerators"].push_back({{"type", a.acc_type},
                                   {"startup_latency", a.startup_latency},
                                   {"process_rate", a.process_rate},
                                   {"input_bytes_per_frame", a.input_bytes_per_frame},
                                   {"output_bytes_per_frame", a.output_bytes_per_frame}});
  if (!cfg.groups.empty()) {
    doc["groups"] = json::array();
    for (const auto& g : cfg.groups) doc["groups"].push_back({{"types", g.types}, {"accelerators", g.accelerators}});
  }
  if (!cfg.priority.empty()) doc["priority"] = cfg.priority;
  json link = {{"rx_bandwidth", cfg.link.rx_bandwidth},
               {"tx_bandwidth", cfg.link.tx_bandwidth},
               {"per_transfer_overhead", cfg.link.per_transfer_overhead}};
  if (!cfg.link.stalls.empty()) {
    link["stalls"] = json::array();
    for (const auto& s : cfg.link.stalls)
      link["stalls"].push_back({{"channel", to_string(s.channel)}, {"start", s.start}, {"duration", s.duration}});
  }
  doc["link"] = link;
  doc["apps"] = json::array();
  for (const auto& a : cfg.apps) {
    json j = {{"acc_type", a.acc_type},
              {"frame_bytes_in", a.frame_bytes_in},
              {"frame_bytes_out", a.frame_bytes_out},
              {"prep_ns_per_byte", a.prep_ns_per_byte},
              {"prep_jitter", a.prep_jitter},
              {"max_outstanding", a.max_outstanding},
              {"threads", a.threads},
              {"start_time", a.start_time}};
    if (a.prep_time) j["prep_time"] = *a.prep_time;
    if (a.total_requests) j["total_requests"] = *a.total_requests;
    if (!a.static_accelerators.empty()) j["static_accelerators"] = a.static_accelerators;
    if (a.random_offset)
      j["buffer_offset"] = "random";
    else
      j["buffer_offset"] = a.buffer_offset;
    doc["apps"].push_back(std::move(j));
  }
  if (!cfg.events.empty()) {
    doc["events"] = json::array();
    for (const auto& e : cfg.events) {
      if (e.kind == ScenarioEventKind::reconfigure)
        doc["events"].push_back(
            {{"time", e.time}, {"reconfigure", {{"group", e.group}, {"accelerators", e.row_accelerators}}}});
      else
        doc["events"].push_back({{"time", e.time}, {"priority", e.weights}});
    }
  }
  return doc;
}

// ---- reports ------------------------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AccelMetrics, requests_completed, busy_time, idle_time, rx_bytes, tx_bytes,
                                   rx_share, tx_share)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AppMetrics, submitted, rejected, requests_completed, incomplete, throughput_rps,
                                   latency_mean, latency_p50, latency_p95, latency_p99, latency_max,
                                   attributed_busy_time)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QueueMetrics, enqueued, max_depth, total_wait_time, backpressure_events,
                                   waiting_at_end)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CompletionRecord, command_id, app, acc, submit_time, complete_time, latency)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MetricsReport, duration, accelerators, apps, queues, rx_link_utilization,
                                   tx_link_utilization, rejected_unmapped, total_rx_bytes, total_tx_bytes,
                                   completions)

enum class ReportFormat { summary, structured, table_rows };

inline std::optional<ReportFormat> parse_report_format(const std::string& s) {
  if (s == "summary" || s == "summary-text" || s == "text") return ReportFormat::summary;
  if (s == "structured" || s == "json") return ReportFormat::structured;
  if (s == "table-rows" || s == "csv") return ReportFormat::table_rows;
  return std::nullopt;
}

inline MetricsReport parse_report(const std::string& text) { return json::parse(text).get<MetricsReport>(); }

inline void write_summary(const MetricsReport& r, std::ostream& os) {
  os << std::fixed << std::setprecision(4);
  os << "duration_ns " << r.duration << "\n";
  os << "link rx_utilization " << r.rx_link_utilization << " tx_utilization " << r.tx_link_utilization << "\n";
  os << "accelerators\n";
  os << "  idx  completed     busy_ns     idle_ns    rx_bytes    tx_bytes  rx_share  tx_share\n";
  for (std::size_t i = 0; i < r.accelerators.size(); ++i) {
    const auto& a = r.accelerators[i];
    os << "  " << std::setw(3) << i << std::setw(11) << a.requests_completed << std::setw(12) << a.busy_time
       << std::setw(12) << a.idle_time << std::setw(12) << a.rx_bytes << std::setw(12) << a.tx_bytes
       << std::setw(10) << a.rx_share << std::setw(10) << a.tx_share << "\n";
  }
  os << "apps\n";
  os << "  idx  completed  incomplete  rejected  throughput_rps  lat_mean_ns  lat_p50  lat_p95  lat_p99  busy_ns\n";
  for (std::size_t i = 0; i < r.apps.size(); ++i) {
    const auto& a = r.apps[i];
    os << "  " << std::setw(3) << i << std::setw(11) << a.requests_completed << std::setw(12) << a.incomplete
       << std::setw(10) << a.rejected << std::setw(16) << std::setprecision(2) << a.throughput_rps
       << std::setw(13) << a.latency_mean << std::setw(9) << a.latency_p50 << std::setw(9) << a.latency_p95
       << std::setw(9) << a.latency_p99 << std::setw(9) << a.attributed_busy_time << "\n";
    os << std::setprecision(4);
  }
  os << "queues\n";
  for (std::size_t i = 0; i < r.queues.size(); ++i) {
    const auto& q = r.queues[i];
    os << "  " << std::setw(3) << i << " enqueued " << q.enqueued << " max_depth " << q.max_depth << " wait_ns "
       << q.total_wait_time << " backpressure " << q.backpressure_events << " waiting_at_end " << q.waiting_at_end
       << "\n";
  }
  if (r.rejected_unmapped) os << "rejected_unmapped " << r.rejected_unmapped << "\n";
}

inline void write_table_rows(const MetricsReport& r, std::ostream& os) {
  os << "command_id,app,acc,submit_time,complete_time,latency\n";
  for (const auto& c : r.completions)
    os << c.command_id << ',' << c.app << ',' << c.acc << ',' << c.submit_time << ',' << c.complete_time << ','
       << c.latency << '\n';
}

inline void emit_report(const MetricsReport& r, ReportFormat fmt, std::ostream& os) {
  switch (fmt) {
    case ReportFormat::summary: write_summary(r, os); break;
    case ReportFormat::structured: os << json(r).dump(2) << "\n"; break;
    case ReportFormat::table_rows: write_table_rows(r, os); break;
  }
  if (!os) throw std::runtime_error("failed to write report");
}

// ---- traces -------------------------------------------------------------------

inline json trace_header_json(const TraceHeader& h) {
  return {{"kind", "begin"},         {"accelerators", h.accelerators}, {"apps", h.apps},
          {"queues", h.queues},      {"rx_bandwidth", h.rx_bandwidth}, {"tx_bandwidth", h.tx_bandwidth}};
}

inline json trace_record_json(const TraceRecord& r) {
  return {{"time", r.time}, {"kind", to_string(r.kind)}, {"command_id", r.command_id}, {"app", r.app},
          {"acc", r.acc},   {"queue", r.queue},          {"bytes", r.bytes},           {"aux", r.aux}};
}

class TraceWriter {
 public:
  TraceWriter(std::ostream& os, const TraceHeader& h) : os_(os) { os_ << trace_header_json(h).dump() << '\n'; }
  void write(const TraceRecord& r) { os_ << trace_record_json(r).dump() << '\n'; }
  void finish(SimTime end) {
    os_ << json{{"kind", "end"}, {"time", end}}.dump() << '\n';
    if (!os_) throw std::runtime_error("failed to write trace");
  }

 private:
  std::ostream& os_;
};

// Rebuilds the report from a dumped trace.
inline MetricsReport replay_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace: empty");
  const json head = json::parse(line);
  if (head.value("kind", "") != "begin") throw std::invalid_argument("trace: first line must be the begin record");
  TraceHeader h{head.at("accelerators").get<std::uint32_t>(), head.at("apps").get<std::uint32_t>(),
                head.at("queues").get<std::uint32_t>(), head.at("rx_bandwidth").get<double>(),
                head.at("tx_bandwidth").get<double>()};
  MetricsCollector col(h);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "end") return col.finish(j.at("time").get<SimTime>());
    TraceRecord r;
    r.time = j.at("time").get<SimTime>();
    r.kind = record_kind_from_string(kind);
    r.command_id = j.at("command_id").get<std::uint64_t>();
    r.app = j.at("app").get<std::uint32_t>();
    r.acc = j.at("acc").get<std::uint32_t>();
    r.queue = j.at("queue").get<std::uint32_t>();
    r.bytes = j.at("bytes").get<std::uint64_t>();
    r.aux = j.at("aux").get<std::uint64_t>();
    col.record_event(r);
  }
  throw std::invalid_argument("trace: missing end record");
}

// ---- sweeps -------------------------------------------------------------------

// "1:9" (inclusive, step 1), "0.5:2:0.5", or "1,2,4,8".
inline std::vector<json> parse_range(const std::string& text) {
  auto number = [&](const std::string& t) -> json {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("bad number '" + t + "' in range '" + text + "'");
    if (v == std::floor(v) && std::abs(v) < 9e15) return json(static_cast<std::int64_t>(v));
    return json(v);
  };
  std::vector<json> out;
  try {
    if (text.find(',') != std::string::npos) {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) throw std::invalid_argument("empty item in range '" + text + "'");
        const bool numeric = item.find_first_not_of("0123456789.-+eE") == std::string::npos;
        out.push_back(numeric ? number(item) : json(item));
      }
      return out;
    }
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) return {number(parts[0])};
    if (parts.size() > 3) throw std::invalid_argument("range '" + text + "' has too many ':'");
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const double step = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
    if (!(step > 0)) throw std::invalid_argument("range '" + text + "' needs a positive step");
    if (hi < lo) throw std::invalid_argument("range '" + text + "' is empty");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(std::to_string(lo + static_cast<double>(i) * step)));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad range '" + text + "'");
  }
  return out;
}

// Sets `doc` at a dotted path such as "apps.0.max_outstanding"; numeric
// segments index arrays.
inline void set_json_path(json& doc, const std::string& path, const json& value) {
  json* cur = &doc;
  std::stringstream ss(path);
  std::string seg;
  std::vector<std::string> segs;
  while (std::getline(ss, seg, '.')) segs.push_back(seg);
  if (segs.empty()) throw std::invalid_argument("empty parameter path");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string& s = segs[i];
    const bool last = i + 1 == segs.size();
    if (cur->is_array()) {
      std::size_t pos = 0;
      std::size_t index = 0;
      try {
        index = std::stoul(s, &pos);
      } catch (...) {
        pos = 0;
      }
      if (pos != s.size() || s.empty() || index >= cur->size())
        throw std::invalid_argument("parameter path '" + path + "': bad array index '" + s + "'");
      cur = &(*cur)[index];
    } else if (cur->is_object() || cur->is_null()) {
      if (!last && !cur->contains(s))
        throw std::invalid_argument("parameter path '" + path + "': no field '" + s + "'");
      cur = &(*cur)[s];
    } else {
      throw std::invalid_argument("parameter path '" + path + "': '" + s + "' is below a scalar");
    }
  }
  *cur = value;
}

struct SweepPoint {
  json value;
  MetricsReport report;
};

// One CSV row per (point, app).
inline void write_sweep_rows(const std::string& param, const std::vector<SweepPoint>& points, std::ostream& os) {
  os << param << ",app,requests_completed,throughput_rps,latency_mean,latency_p99,latency_max\n";
  const auto old_precision = os.precision(15);
  for (const auto& p : points)
    for (std::size_t a = 0; a < p.report.apps.size(); ++a) {
      const auto& m = p.report.apps[a];
      os << p.value.dump() << ',' << a << ',' << m.requests_completed << ',' << m.throughput_rps << ','
         << m.latency_mean << ',' << m.latency_p99 << ',' << m.latency_max << '\n';
    }
  os.precision(old_precision);
  if (!os) throw std::runtime_error("failed to write sweep rows");
}

}  // namespace ushare
