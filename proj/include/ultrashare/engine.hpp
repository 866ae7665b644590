#pragma once

// Scenario engine: application workload generators feeding the command
// detector, allocator, SG engine, accelerator controllers and link, under
// one of three controller modes (UltraShare multi-queue, single-queue
// non-grouping baseline, static per-accelerator allocation baseline).

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ultrashare/accel_controller.hpp"
#include "ultrashare/allocator.hpp"
#include "ultrashare/command_model.hpp"
#include "ultrashare/metrics.hpp"
#include "ultrashare/scenario_config.hpp"
#include "ultrashare/sg_engine.hpp"
#include "ultrashare/sim_core.hpp"
#include "ultrashare/transfer_link.hpp"

namespace ushare {

struct EngineOptions {
  bool keep_trace = false;
  // Called for every trace record as it is produced.
  std::function<void(const TraceRecord&)> trace_sink;
  // Called for every dispatched simulator event.
  std::function<void(const SimEvent&)> event_observer;
};

// Extra delay before retrying a rejected (unmapped) command, used when the
// app has prep_time 0 or derives it from frame size.
inline constexpr SimTime kRejectBackoff = 1 * kUs;

class Engine {
 public:
  explicit Engine(ScenarioConfig cfg, EngineOptions opts = {})
      : cfg_(std::move(cfg)), opts_(std::move(opts)), sim_(cfg_.seed) {
    validate(cfg_);
    setup();
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  TraceHeader header() const { return header_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const Simulator& simulator() const { return sim_; }
  const ControllerState& controller(std::size_t acc) const { return controllers_.at(acc); }
  const GroupTable& group_table() const { return table_; }
  const std::vector<CommandQueue>& queues() const { return queues_; }
  std::uint64_t bound_checks() const { return bound_checks_; }
  std::uint64_t max_app_outstanding(std::size_t app) const { return apps_.at(app).max_seen; }

  MetricsReport run() {
    if (ran_) throw std::logic_error("Engine::run called twice");
    ran_ = true;
    sim_.run_until(cfg_.duration);
    return collector_.finish(cfg_.duration);
  }

 private:
  struct ThreadState {
    std::uint32_t free_slots = 0;
    bool preparing = false;
  };

  struct AppState {
    AppSpec spec;
    FrameShape frame;
    std::vector<ThreadState> threads;
    std::uint64_t outstanding = 0;
    std::uint64_t max_seen = 0;
    std::uint64_t started = 0;  // commands whose preparation has begun
    std::uint64_t rng_stream = 0;
  };

  struct Blocked {
    Command command;
    std::size_t queue;
  };

  void setup() {
    const std::size_t k = cfg_.accelerators.size();
    for (std::size_t i = 0; i < k; ++i) cfg_.accelerators[i].acc_index = i;

    status_ = AcceleratorStatus(k);
    for (std::size_t i = 0; i < k; ++i) controllers_.emplace_back(i, cfg_.pages_per_buffer, cfg_.page_size);

    const std::uint32_t types = cfg_.num_types();
    type_masks_.assign(types, AccMask(k, false));
    for (std::size_t i = 0; i < k; ++i) type_masks_[cfg_.accelerators[i].acc_type][i] = true;

    switch (cfg_.mode) {
      case ControllerMode::ultrashare: {
        const auto groups = effective_groups(cfg_);
        table_ = GroupTable(groups.size(), k);
        grouping_.num_groups = groups.size();
        grouping_.type_to_group.assign(types, std::nullopt);
        for (std::size_t g = 0; g < groups.size(); ++g) {
          for (auto a : groups[g].accelerators) table_.set(g, a);
          for (auto t : groups[g].types) grouping_.type_to_group[t] = g;
        }
        break;
      }
      case ControllerMode::single_queue:
        table_ = GroupTable::all_ones(1, k);
        grouping_ = Grouping::single_group(types);
        break;
      case ControllerMode::static_alloc:
        table_ = GroupTable::identity(k);
        break;
    }
    for (std::size_t q = 0; q < table_.groups(); ++q) queues_.emplace_back(q, cfg_.queue_capacity);
    blocked_.resize(queues_.size());

    const PriorityTable weights = cfg_.priority.empty() ? PriorityTable::uniform(k) : PriorityTable(cfg_.priority);
    rx_.emplace(Direction::rx, cfg_.link, weights);
    tx_.emplace(Direction::tx, cfg_.link, weights);

    header_ = TraceHeader{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(cfg_.apps.size()),
                          static_cast<std::uint32_t>(queues_.size()), cfg_.link.rx_bandwidth,
                          cfg_.link.tx_bandwidth};
    collector_ = MetricsCollector(header_);

    sim_.set_handler([this](const SimEvent& ev) { dispatch(ev); });
    if (opts_.event_observer) sim_.set_observer(opts_.event_observer);

    for (std::size_t a = 0; a < cfg_.apps.size(); ++a) {
      AppState st;
      st.spec = cfg_.apps[a];
      st.frame = app_frame(cfg_, st.spec);
      st.rng_stream = a;
      sim_.rng().register_stream(a);
      const std::uint32_t T = st.spec.threads;
      for (std::uint32_t t = 0; t < T; ++t) {
        ThreadState th;
        th.free_slots = st.spec.max_outstanding / T + (t < st.spec.max_outstanding % T ? 1 : 0);
        st.threads.push_back(th);
      }
      apps_.push_back(std::move(st));
    }
    for (std::size_t a = 0; a < apps_.size(); ++a)
      for (std::size_t t = 0; t < apps_[a].threads.size(); ++t) start_prepare(a, t, apps_[a].spec.start_time);

    for (std::size_t i = 0; i < cfg_.events.size(); ++i) {
      EventPayload p;
      p.aux = i;
      sim_.schedule(cfg_.events[i].time, EventKind::config_update, p);
    }
  }

  void emit(TraceRecord r) {
    r.time = sim_.now();
    collector_.record_event(r);
    if (opts_.keep_trace) trace_.push_back(r);
    if (opts_.trace_sink) opts_.trace_sink(r);
  }

  void dispatch(const SimEvent& ev) {
    switch (ev.kind) {
      case EventKind::command_arrival: on_command_arrival(ev.payload.app, ev.payload.thread); break;
      case EventKind::sg_fetch_complete: on_sg_fetch_complete(ev.payload.command_id); break;
      case EventKind::data_chunk_complete:
        on_transfer_complete(static_cast<Direction>(ev.payload.channel));
        break;
      case EventKind::compute_start: on_compute_start(ev.payload.acc); break;
      case EventKind::compute_complete: on_compute_complete(ev.payload.acc); break;
      case EventKind::scheduler_wakeup: on_wakeup(static_cast<Direction>(ev.payload.channel)); break;
      case EventKind::config_update: on_config_update(ev.payload.aux); break;
      case EventKind::data_chunk_start: break;
    }
    for (const auto& c : controllers_) check_bounds(c);
    ++bound_checks_;
  }

  // ---- workload generation -------------------------------------------------

  SimTime prep_time(AppState& app) {
    SimTime base = app.spec.prep_time
                       ? *app.spec.prep_time
                       : static_cast<SimTime>(app.spec.prep_ns_per_byte * static_cast<double>(app.frame.input_bytes));
    if (app.spec.prep_jitter) base += sim_.rng().uniform(app.rng_stream, 0, app.spec.prep_jitter);
    return base;
  }

  // A thread prepares one command at a time and only while it holds a free
  // outstanding slot.
  void start_prepare(std::size_t a, std::size_t t, SimTime base) {
    AppState& app = apps_[a];
    ThreadState& th = app.threads[t];
    if (th.preparing || th.free_slots == 0) return;
    if (app.spec.total_requests && app.started >= *app.spec.total_requests) return;
    th.preparing = true;
    --th.free_slots;
    ++app.started;
    EventPayload p;
    p.app = static_cast<std::uint32_t>(a);
    p.thread = static_cast<std::uint32_t>(t);
    sim_.schedule(base + prep_time(app), EventKind::command_arrival, p);
  }

  CompactSgList host_buffer(AppState& app, std::uint64_t bytes) {
    const std::uint64_t page = cfg_.page_size;
    const std::uint64_t offset =
        app.spec.random_offset ? sim_.rng().uniform(app.rng_stream, 0, page - 1) : app.spec.buffer_offset;
    std::vector<std::uint64_t> pages(pages_spanned(bytes, offset, page));
    for (auto& pn : pages) pn = sim_.rng().uniform(app.rng_stream, 1, (1ULL << 36) - 1);
    return make_sg_list(bytes, offset, pages, page);
  }

  Command make_command(std::size_t a, std::size_t t) {
    AppState& app = apps_[a];
    Command c;
    c.command_id = next_command_id_++;
    c.core_id = static_cast<std::uint32_t>(t);
    c.acc_type = app.spec.acc_type;
    c.rx_lists.push_back(host_buffer(app, app.frame.input_bytes));
    c.tx_lists.push_back(host_buffer(app, app.frame.output_bytes));
    c.submit_time = sim_.now();
    c.app_id = static_cast<std::uint32_t>(a);
    c.thread_id = static_cast<std::uint32_t>(t);
    if (cfg_.mode == ControllerMode::static_alloc) c.pinned_acc = app.spec.static_accelerators.at(t);
    return c;
  }

  std::optional<std::size_t> target_queue(const Command& c) const {
    if (cfg_.mode == ControllerMode::static_alloc) return *c.pinned_acc;
    try {
      return classify_command(c, grouping_);
    } catch (const UnmappedCommand&) {
      return std::nullopt;
    }
  }

  void on_command_arrival(std::size_t a, std::size_t t) {
    AppState& app = apps_[a];
    ThreadState& th = app.threads[t];
    th.preparing = false;
    Command cmd = make_command(a, t);
    const auto q = target_queue(cmd);

    TraceRecord r;
    r.kind = RecordKind::submit;
    r.command_id = cmd.command_id;
    r.app = static_cast<std::uint32_t>(a);
    r.queue = static_cast<std::uint32_t>(q.value_or(0));
    r.bytes = rx_total_bytes(cmd);
    r.aux = tx_total_bytes(cmd);
    emit(r);

    if (!q) {
      r.kind = RecordKind::reject;
      r.aux = 0;
      emit(r);
      ++th.free_slots;
      const SimTime backoff = app.spec.prep_time.value_or(0) ? 0 : kRejectBackoff;
      start_prepare(a, t, sim_.now() + backoff);
      return;
    }

    ++app.outstanding;
    app.max_seen = std::max(app.max_seen, app.outstanding);
    if (!blocked_[*q].empty() || queues_[*q].full()) {
      r.kind = RecordKind::backpressure;
      emit(r);
      blocked_[*q].push_back(Blocked{std::move(cmd), *q});
    } else {
      enqueue(std::move(cmd), *q);
    }
    start_prepare(a, t, sim_.now());
    run_allocator();
  }

  void enqueue(Command cmd, std::size_t q) {
    TraceRecord r;
    r.kind = RecordKind::enqueue;
    r.command_id = cmd.command_id;
    r.app = cmd.app_id;
    r.queue = static_cast<std::uint32_t>(q);
    if (queues_[q].enqueue(std::move(cmd)) != EnqueueResult::accepted)
      throw SimulationError("enqueue into full queue " + std::to_string(q));
    emit(r);
  }

  // ---- allocation --------------------------------------------------------------

  void run_allocator() {
    auto type_filter = [this](const Command& c) -> const AccMask* {
      return cfg_.mode == ControllerMode::single_queue ? &type_masks_.at(c.acc_type) : nullptr;
    };
    while (auto alloc = allocate_step(status_, table_, queues_, rr_, type_filter)) {
      TraceRecord r;
      r.kind = RecordKind::allocate;
      r.command_id = alloc->command.command_id;
      r.app = alloc->command.app_id;
      r.acc = static_cast<std::uint32_t>(alloc->acc);
      r.queue = static_cast<std::uint32_t>(alloc->queue);
      emit(r);
      request_sg_fetch(sim_, request_infos_, *alloc, cfg_.sg_fetch_latency);
      const std::size_t q = alloc->queue;
      in_service_.emplace(alloc->command.command_id, std::move(alloc->command));
      if (!blocked_[q].empty()) {
        Blocked b = std::move(blocked_[q].front());
        blocked_[q].pop_front();
        enqueue(std::move(b.command), q);
      }
    }
  }

  void on_sg_fetch_complete(std::uint64_t command_id) {
    const Command& cmd = in_service_.at(command_id);
    const SgStream rx = decode_stream(command_id, Direction::rx, cmd.rx_lists);
    const SgStream tx = decode_stream(command_id, Direction::tx, cmd.tx_lists);
    const std::size_t acc = distribute(rx, request_infos_, controllers_);
    distribute(tx, request_infos_, controllers_);

    ControllerState& ctrl = controllers_[acc];
    if (ctrl.active) throw SimulationError("accelerator " + std::to_string(acc) + " already serving a command");
    ActiveCommand ac;
    ac.command_id = command_id;
    ac.frame = FrameShape{rx_total_bytes(cmd), tx_total_bytes(cmd)};
    ac.rx_elements_left = rx.elements.size();
    ac.tx_elements_left = tx.elements.size();
    ctrl.active = ac;

    TraceRecord r;
    r.kind = RecordKind::sg_fetch_complete;
    r.command_id = command_id;
    r.app = cmd.app_id;
    r.acc = static_cast<std::uint32_t>(acc);
    emit(r);
    kick(Direction::rx);
  }

  // ---- link --------------------------------------------------------------

  LinkChannel& channel(Direction d) { return d == Direction::rx ? *rx_ : *tx_; }

  void kick(Direction d) {
    LinkChannel& ch = channel(d);
    if (ch.busy()) return;
    if (auto until = ch.stalled_until(sim_.now())) {
      bool& armed = d == Direction::rx ? rx_wakeup_armed_ : tx_wakeup_armed_;
      if (!armed) {
        armed = true;
        EventPayload p;
        p.channel = static_cast<std::uint32_t>(d);
        sim_.schedule(*until, EventKind::scheduler_wakeup, p);
      }
      return;
    }
    AccMask pending(controllers_.size());
    for (std::size_t i = 0; i < controllers_.size(); ++i)
      pending[i] = d == Direction::rx ? rx_ready(controllers_[i]) : tx_ready(controllers_[i]);
    const auto grant = ch.scheduler().schedule_step(pending);
    if (!grant) return;
    ControllerState& ctrl = controllers_[*grant];
    const auto req = d == Direction::rx ? try_issue_rx(ctrl) : try_issue_tx(ctrl);
    if (!req) throw SimulationError("scheduler granted an accelerator with no issuable request");
    ch.begin_transfer(sim_, *req);

    TraceRecord r;
    r.kind = d == Direction::rx ? RecordKind::rx_start : RecordKind::tx_start;
    r.command_id = ctrl.active ? ctrl.active->command_id : 0;
    r.acc = static_cast<std::uint32_t>(*grant);
    r.bytes = req->element.length;
    r.aux = req->element.address;
    emit(r);
  }

  void on_wakeup(Direction d) {
    (d == Direction::rx ? rx_wakeup_armed_ : tx_wakeup_armed_) = false;
    kick(d);
  }

  void on_transfer_complete(Direction d) {
    const DataRequest req = channel(d).complete_transfer(sim_.now());
    ControllerState& ctrl = controllers_.at(req.acc_index);
    if (d == Direction::rx)
      on_rx_complete(ctrl, req.element);
    else
      on_tx_complete(ctrl, req.element);

    TraceRecord r;
    r.kind = d == Direction::rx ? RecordKind::rx_complete : RecordKind::tx_complete;
    r.command_id = ctrl.active ? ctrl.active->command_id : 0;
    r.acc = static_cast<std::uint32_t>(req.acc_index);
    r.bytes = req.element.length;
    r.aux = req.element.address;
    emit(r);

    if (d == Direction::rx) {
      ActiveCommand& ac = *ctrl.active;
      if (!ac.startup_scheduled) {
        ac.startup_scheduled = true;
        ac.first_data_time = sim_.now();
        EventPayload p;
        p.acc = static_cast<std::uint32_t>(req.acc_index);
        sim_.schedule_in(cfg_.accelerators[req.acc_index].startup_latency, EventKind::compute_start, p);
      } else {
        try_compute(req.acc_index);
      }
      kick(Direction::rx);
    } else {
      try_compute(req.acc_index);
      kick(Direction::tx);
      kick(Direction::rx);
      check_finished(req.acc_index);
    }
  }

  // ---- compute ------------------------------------------------------------

  void try_compute(std::size_t acc) {
    ControllerState& ctrl = controllers_[acc];
    const std::uint64_t chunk = next_chunk(ctrl);
    if (chunk == 0) return;
    const ComputeStep step = compute_model(cfg_.accelerators[acc], ctrl.active->frame, ctrl.active->consumed, chunk);
    begin_chunk(ctrl, chunk);
    EventPayload p;
    p.acc = static_cast<std::uint32_t>(acc);
    p.bytes = chunk;
    sim_.schedule_in(step.duration, EventKind::compute_complete, p);
    kick(Direction::rx);
  }

  void on_compute_start(std::size_t acc) {
    controllers_[acc].active->compute_started = true;
    try_compute(acc);
  }

  void on_compute_complete(std::size_t acc) {
    ControllerState& ctrl = controllers_[acc];
    finish_chunk(ctrl);
    if (ctrl.active->compute_done()) {
      ctrl.active->compute_done_time = sim_.now();
      TraceRecord r;
      r.kind = RecordKind::compute_done;
      r.command_id = ctrl.active->command_id;
      r.acc = static_cast<std::uint32_t>(acc);
      emit(r);
    }
    kick(Direction::tx);
    try_compute(acc);
    check_finished(acc);
  }

  void check_finished(std::size_t acc) {
    ControllerState& ctrl = controllers_[acc];
    if (!ctrl.active || !ctrl.active->finished()) return;
    const ActiveCommand ac = *ctrl.active;
    if (ac.rx_delivered != ac.frame.input_bytes || ac.tx_delivered != ac.frame.output_bytes)
      throw SimulationError("command " + std::to_string(ac.command_id) + ": byte conservation violated");
    if (ctrl.rx_buffer_fill != 0 || ctrl.tx_buffer_fill != 0)
      throw SimulationError("accelerator " + std::to_string(acc) + ": buffers not drained at completion");
    ctrl.active.reset();

    auto it = in_service_.find(ac.command_id);
    const Command cmd = std::move(it->second);
    in_service_.erase(it);

    TraceRecord r;
    r.kind = RecordKind::complete;
    r.command_id = ac.command_id;
    r.app = cmd.app_id;
    r.acc = static_cast<std::uint32_t>(acc);
    emit(r);

    status_.mark_idle(acc);
    AppState& app = apps_[cmd.app_id];
    --app.outstanding;
    ++app.threads[cmd.thread_id].free_slots;
    start_prepare(cmd.app_id, cmd.thread_id, sim_.now());
    run_allocator();
  }

  // ---- runtime configuration --------------------------------------------

  void on_config_update(std::size_t index) {
    const ScenarioEvent& e = cfg_.events.at(index);
    TraceRecord r;
    if (e.kind == ScenarioEventKind::reconfigure) {
      AccMask row(controllers_.size(), false);
      for (auto a : e.row_accelerators) row[a] = true;
      table_.reconfigure(e.group, std::move(row));
      r.kind = RecordKind::reconfigure;
      r.queue = static_cast<std::uint32_t>(e.group);
      emit(r);
      run_allocator();
    } else {
      PriorityTable w(e.weights);
      rx_->scheduler().set_priority_table(w);
      tx_->scheduler().set_priority_table(w);
      r.kind = RecordKind::reweight;
      emit(r);
      kick(Direction::rx);
      kick(Direction::tx);
    }
  }

  ScenarioConfig cfg_;
  EngineOptions opts_;
  Simulator sim_;
  bool ran_ = false;

  AcceleratorStatus status_;
  GroupTable table_;
  Grouping grouping_;
  std::vector<AccMask> type_masks_;
  std::vector<CommandQueue> queues_;
  std::vector<std::deque<Blocked>> blocked_;
  RoundRobinCursor rr_;
  RequestInfoQueue request_infos_;
  std::map<std::uint64_t, Command> in_service_;
  std::vector<ControllerState> controllers_;
  std::optional<LinkChannel> rx_;
  std::optional<LinkChannel> tx_;
  bool rx_wakeup_armed_ = false;
  bool tx_wakeup_armed_ = false;

  std::vector<AppState> apps_;
  std::uint64_t next_command_id_ = 0;

  TraceHeader header_;
  MetricsCollector collector_{TraceHeader{}};
  std::vector<TraceRecord> trace_;
  std::uint64_t bound_checks_ = 0;
};

inline MetricsReport run_scenario(const ScenarioConfig& cfg) { return Engine(cfg).run(); }

// Single-queue non-grouping baseline: one FIFO for every command; the head
// waits for an idle accelerator of its own type and blocks everything behind it.
inline MetricsReport run_single_queue_mode(ScenarioConfig cfg) {
  cfg.mode = ControllerMode::single_queue;
  return Engine(std::move(cfg)).run();
}

// Static allocation baseline: every thread is pinned to one accelerator and
// waits in that accelerator's FIFO.
inline MetricsReport run_static_mode(ScenarioConfig cfg) {
  cfg.mode = ControllerMode::static_alloc;
  return Engine(std::move(cfg)).run();
}

}  // namespace ushare
