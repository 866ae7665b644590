#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ultrashare/ultrashare.hpp"

using namespace ushare;

namespace {

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutputTarget(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw std::runtime_error(path + ": cannot open for writing");
    os = &file;
  }
};

ReportFormat format_or_throw(const std::string& name) {
  auto f = parse_report_format(name);
  if (!f) throw std::runtime_error("unknown format '" + name + "' (summary-text, structured, table-rows)");
  return *f;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string duration;
};

void apply(const Overrides& o, json& doc) {
  if (o.seed) doc["seed"] = *o.seed;
  if (!o.mode.empty()) {
    if (!parse_mode(o.mode)) throw std::runtime_error("unknown mode '" + o.mode + "'");
    doc["mode"] = o.mode;
  }
  if (!o.duration.empty()) doc["duration"] = o.duration;
}

int cmd_run(const std::string& scenario, const Overrides& ov, const std::string& out, const std::string& format,
            const std::string& trace_path) {
  auto doc = read_json_file(scenario);
  apply(ov, doc);
  const auto cfg = parse_config_json(doc);
  const auto fmt = format_or_throw(format);

  std::ofstream trace_file;
  std::optional<TraceWriter> writer;
  EngineOptions opts;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw std::runtime_error(trace_path + ": cannot open for writing");
    opts.trace_sink = [&](const TraceRecord& r) { writer->write(r); };
  }
  Engine engine(cfg, opts);
  if (!trace_path.empty()) writer.emplace(trace_file, engine.header());
  const auto report = engine.run();
  if (writer) writer->finish(cfg.duration);

  OutputTarget target(out);
  emit_report(report, fmt, *target.os);
  return 0;
}

int cmd_validate(const std::string& scenario) {
  const auto cfg = parse_config(scenario);
  std::cout << scenario << ": ok (" << cfg.accelerators.size() << " accelerators, " << cfg.apps.size()
            << " apps, mode " << to_string(cfg.mode) << ")\n";
  return 0;
}

int cmd_sweep(const std::string& scenario, const std::vector<std::string>& params, const Overrides& ov,
              const std::string& out, const std::string& format) {
  auto base = read_json_file(scenario);
  apply(ov, base);
  const auto fmt = format_or_throw(format);

  std::vector<std::string> paths;
  std::vector<std::vector<json>> ranges;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw std::runtime_error("--param expects path=range, got '" + p + "'");
    paths.push_back(p.substr(0, eq));
    ranges.push_back(parse_range(p.substr(eq + 1)));
    if (ranges.back().size() != ranges.front().size())
      throw std::runtime_error("--param ranges must all have the same length");
  }

  std::vector<SweepPoint> points;
  json structured = json::array();
  for (std::size_t i = 0; i < ranges.front().size(); ++i) {
    auto doc = base;
    json values = json::object();
    for (std::size_t p = 0; p < paths.size(); ++p) {
      set_json_path(doc, paths[p], ranges[p][i]);
      values[paths[p]] = ranges[p][i];
    }
    auto report = run_scenario(parse_config_json(doc));
    structured.push_back({{"params", values}, {"report", report}});
    points.push_back({ranges[0][i], std::move(report)});
  }

  OutputTarget target(out);
  auto& os = *target.os;
  switch (fmt) {
    case ReportFormat::table_rows: write_sweep_rows(paths[0], points, os); break;
    case ReportFormat::structured: os << structured.dump(2) << '\n'; break;
    case ReportFormat::summary:
      for (std::size_t i = 0; i < points.size(); ++i) {
        os << "== " << structured[i]["params"].dump() << '\n';
        write_summary(points[i].report, os);
      }
      break;
  }
  if (!os) throw std::runtime_error("failed to write sweep output");
  return 0;
}

int cmd_replay(const std::string& trace_path, const std::string& out, const std::string& format) {
  const auto fmt = format_or_throw(format);
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error(trace_path + ": cannot open");
  const auto report = replay_trace(in);
  OutputTarget target(out);
  emit_report(report, fmt, *target.os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"UltraShare accelerator-sharing simulator"};
  cli.require_subcommand(1);

  std::string scenario, out, format = "summary-text", trace_path;
  std::vector<std::string> params;
  Overrides ov;
  std::uint64_t seed = 0;

  auto* run = cli.add_subcommand("run", "run one scenario and print its report");
  run->add_option("--scenario", scenario, "scenario config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--mode", ov.mode, "ultrashare | single-queue | static");
  run->add_option("--duration", ov.duration, "simulated time, e.g. 10ms");
  run->add_option("--out", out, "report destination (default stdout)");
  run->add_option("--format", format, "summary-text | structured | table-rows");
  run->add_option("--trace", trace_path, "write the event trace here (one JSON record per line)");

  auto* validate = cli.add_subcommand("validate", "check a scenario config");
  validate->add_option("--scenario", scenario, "scenario config file")->required();

  auto* sweep = cli.add_subcommand("sweep", "run a scenario over parameter ranges");
  sweep->add_option("--scenario", scenario, "scenario config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", params, "path=range, e.g. apps.0.max_outstanding=1:9 (repeat to zip)")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed, "override the config seed");
  sweep->add_option("--mode", ov.mode, "ultrashare | single-queue | static");
  sweep->add_option("--duration", ov.duration, "simulated time");
  sweep->add_option("--out", out, "destination (default stdout)");
  sweep->add_option("--format", format, "summary-text | structured | table-rows");

  auto* replay = cli.add_subcommand("replay", "rebuild a report from a dumped trace");
  replay->add_option("--trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out, "report destination (default stdout)");
  replay->add_option("--format", format, "summary-text | structured | table-rows");

  CLI11_PARSE(cli, argc, argv);
  if (*seed_opt || *sweep_seed) ov.seed = seed;

  try {
    if (*run) return cmd_run(scenario, ov, out, format, trace_path);
    if (*validate) return cmd_validate(scenario);
    if (*sweep) return cmd_sweep(scenario, params, ov, out, format);
    if (*replay) return cmd_replay(trace_path, out, format);
  } catch (const ConfigError& e) {
    for (const auto& err : e.errors()) std::cerr << "error: " << err << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
