#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmsim/decision.hpp"
#include "dmsim/metrics.hpp"
#include "dmsim/mule.hpp"
#include "dmsim/processing.hpp"
#include "dmsim/scenario.hpp"
#include "dmsim/sensing.hpp"
#include "dmsim/trace.hpp"

namespace dmsim {

/// Time-ordered event queue. Equal-time events run in scheduling order, so
/// a run is a pure function of the calls made into it.
class Scheduler {
 public:
  using Handler = std::function<void()>;

  double now() const { return now_; }

  void schedule(double t, Handler fn) {
    if (t < now_) throw std::logic_error("event scheduled into the past");
    queue_.push(Item{t, next_seq_++, std::move(fn)});
  }

  /// Runs every event strictly before the horizon, then parks the clock
  /// exactly on it. Events at or past the horizon never execute.
  void run_until(double horizon) {
    while (!queue_.empty() && queue_.top().t < horizon) {
      Item item = queue_.top();
      queue_.pop();
      now_ = item.t;
      item.fn();
    }
    now_ = horizon;
  }

  bool empty() const { return queue_.empty(); }

 private:
  struct Item {
    double t = 0.0;
    std::uint64_t seq = 0;
    Handler fn;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

struct SimulationResult {
  RunInfo info;
  std::vector<std::string> trace_lines;
  std::string trace_text;
  std::string digest;
  Metrics metrics;
};

/// One run of the whole pipeline over a shared event clock: windowed
/// detection, mule pickup and delivery, confidence-checked processing,
/// reference matching and warning issuance. Construct, call run() once.
class Simulation {
 public:
  Simulation(Scenario scenario, std::uint64_t seed, double horizon)
      : sc_(std::move(scenario)), seed_(seed), horizon_(horizon) {
    if (horizon_ < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  SimulationResult run() {
    init();
    sched_.run_until(horizon_);
    if (horizon_ > 0.0) {
      trace_.emit(horizon_, "run_end",
                  {{"maps", static_cast<int>(sc_.topology.maps.size())}});
    }
    SimulationResult res;
    res.info.scenario = sc_.name;
    res.info.seed = seed_;
    res.info.horizon = horizon_;
    res.trace_lines = trace_.lines();
    res.trace_text = trace_.text();
    res.digest = trace_.digest();
    res.metrics = collect_metrics(res.trace_lines);
    return res;
  }

 private:
  using EndpointKey = std::pair<HolderKind, int>;

  struct ActiveTransfer {
    std::uint64_t bundle_id = 0;
    double start = 0.0;
    std::int64_t bytes_done_before = 0;
    std::int64_t total = 0;
    std::uint64_t gen = 0;  // stale completion events compare against this
  };

  void init() {
    auto& topo = sc_.topology;
    reference_db_ = topo.cdc_dcc.reference_db;
    dispatcher_ = std::make_unique<RoundRobinDispatcher>(topo);

    for (const auto& d : topo.dpcs) {
      dpcs_[d.id] = DpcState{&d, false, {}, {}};
      channels_[{HolderKind::dpc, d.id}] =
          ChannelState{topo.region_link(d.region).channels, {}, {}};
      region_dpcs_[d.region].push_back(d.id);
    }
    for (const auto& s : topo.sdccs) {
      const Region* region = topo.find_region(s.region);
      sdccs_.emplace(s.id, SdccState(s, *region, sc_.params.reading_bytes));
      channels_[{HolderKind::sdcc, s.id}] =
          ChannelState{topo.region_link(s.region).channels, {}, {}};
      region_sdccs_[s.region].push_back(s.id);
    }
    for (auto& [region, ids] : region_dpcs_) std::sort(ids.begin(), ids.end());
    for (auto& [region, ids] : region_sdccs_) std::sort(ids.begin(), ids.end());

    for (auto& sensor : topo.sensors) {
      sensor_rng_.emplace(sensor.id, EntityRng(seed_, StreamKind::sensor_false_report,
                                               static_cast<std::uint64_t>(sensor.id)));
      assigned_[sensor.assigned_sdcc].push_back(sensor.id);
    }
    for (auto& [sdcc, ids] : assigned_) std::sort(ids.begin(), ids.end());
    for (const auto& m : topo.maps) {
      maps_.emplace(m.id, MapState(m, *topo.find_region(m.region), seed_));
    }

    // Scheduling order fixes the tie-break at equal times: hazard state
    // first, then sensor failures, the mobility tick, then the window
    // boundaries (those all land at positive multiples of the window).
    for (const auto& h : sc_.hazards) {
      sched_.schedule(h.onset_time, [this, &h] {
        trace_.emit(sched_.now(), "hazard_onset",
                    {{"hazard", h.id},
                     {"class", to_string(h.hazard_class)},
                     {"region", h.region},
                     {"magnitude", h.magnitude},
                     {"sensors", static_cast<int>(h.footprint.size())}});
      });
      if (std::isfinite(h.duration)) {
        sched_.schedule(h.onset_time + h.duration, [this, &h] {
          trace_.emit(sched_.now(), "hazard_end", {{"hazard", h.id}});
        });
      }
    }
    for (auto& sensor : topo.sensors) {
      if (std::isfinite(sensor.fail_at)) {
        SensorNode* sp = &sensor;
        sched_.schedule(sensor.fail_at, [this, sp] {
          sp->failed = true;
          trace_.emit(sched_.now(), "sensor_failed", {{"sensor", sp->id}});
        });
      }
    }
    if (!topo.maps.empty()) {
      sched_.schedule(0.0, [this] { mobility_tick(0.0); });
    }
    for (const auto& s : topo.sdccs) schedule_boundary(s.id, 1);
  }

  // ---- detection ----

  void schedule_boundary(SdccId id, long long k) {
    const Sdcc* cfg = sc_.topology.find_sdcc(id);
    const double t = static_cast<double>(k) * cfg->window;
    if (t >= horizon_) return;
    sched_.schedule(t, [this, id, k] { window_boundary(id, k); });
  }

  void window_boundary(SdccId id, long long k) {
    auto& st = sdccs_.at(id);
    const double t = sched_.now();
    // Sweep the stale window first so the trigger latch resets between
    // windows; a leftover exceedance would fire here.
    if (auto batch = st.evaluate(t, next_batch_)) {
      ++next_batch_;
      process_batch(std::move(*batch));
    }
    for (SensorId sid : assigned_[id]) {
      const SensorNode* s = sc_.topology.find_sensor(sid);
      if (!sensor_alive(*s, t)) continue;
      const auto readings = generate_sensor_readings(*s, sc_.hazards, t, sensor_rng_.at(sid),
                                                     sc_.params.false_value_max);
      for (const auto& r : readings) {
        trace_.emit(t, "reading",
                    {{"sensor", r.sensor_id},
                     {"sdcc", id},
                     {"modality", to_string(r.parameter)},
                     {"value", r.value},
                     {"truthful", r.truthful},
                     {"hazard", r.hazard_id}});
        st.ingest(r, s->assigned_sdcc);
      }
    }
    if (auto batch = st.evaluate(t, next_batch_)) {
      ++next_batch_;
      process_batch(std::move(*batch));
    }
    schedule_boundary(id, k + 1);
  }

  void process_batch(EventBatch batch) {
    const double t = sched_.now();
    const Sdcc* cfg = sc_.topology.find_sdcc(batch.sdcc_id);
    batch.live_sensors = sc_.topology.live_assigned_sensors(cfg->id);

    std::set<int> hazard_ids;
    int truthful = 0, false_count = 0;
    for (const auto& r : batch.readings) {
      if (r.truthful) {
        ++truthful;
        hazard_ids.insert(r.hazard_id);
      } else {
        ++false_count;
      }
    }
    trace_.emit(t, "trigger",
                {{"sdcc", cfg->id},
                 {"batch", batch.id},
                 {"distinct", static_cast<int>(batch.contributing_sensors.size())},
                 {"live", batch.live_sensors},
                 {"class", to_string(batch.hazard_class_hint)},
                 {"payload_bytes", batch.payload_bytes},
                 {"hazard_ids", hazard_ids},
                 {"truthful_count", truthful},
                 {"false_count", false_count}});

    DataBundle b;
    b.id = next_bundle_++;
    b.baseline_snapshots = cfg->baseline;
    b.total_bytes = batch.payload_bytes;
    b.custody.push_back({HolderKind::sdcc, cfg->id, t});
    b.created_time = t;
    b.urgent = is_bypass_class(sc_.topology.cdc_dcc, batch.hazard_class_hint);
    b.holder_kind = HolderKind::sdcc;
    b.holder_id = cfg->id;
    b.batches.push_back(std::move(batch));
    const auto bid = b.id;
    const auto bytes = b.total_bytes;
    const bool urgent = b.urgent;
    bundles_.emplace(bid, std::move(b));
    trace_.emit(t, "bundle_created",
                {{"bundle", bid}, {"sdcc", cfg->id}, {"bytes", bytes}, {"urgent", urgent}});

    if (cfg->collapsed_with) {
      // Direct link: no mule involved, a fixed wireless hop instead.
      const DpcId target = *cfg->collapsed_with;
      sched_.schedule(t + sc_.params.wireless_latency, [this, bid, target] {
        deliver_bundle(bid, target, "direct", std::nullopt);
      });
    } else {
      pending_[cfg->id].push_back(bid);
    }
  }

  // ---- mobility and transport ----

  GeoPoint endpoint_position(HolderKind kind, int id) const {
    if (kind == HolderKind::sdcc) return sc_.topology.find_sdcc(id)->position;
    return sc_.topology.find_dpc(id)->position;
  }

  void mobility_tick(double dt) {
    for (auto& [id, M] : maps_) M.step_mobility(dt);
    const double t = sched_.now();

    std::vector<std::uint64_t> lost;
    for (auto& [id, M] : maps_) {
      if (M.session) {
        const auto& s = sessions_.at(*M.session);
        if (!M.in_contact_with(endpoint_position(s.endpoint_kind, s.endpoint_id))) {
          lost.push_back(*M.session);
        }
      } else if (auto w = M.waiting_target()) {
        if (!M.in_contact_with(endpoint_position(w->first, w->second))) {
          auto& queue = channels_.at({w->first, w->second}).waiting;
          queue.erase(std::remove(queue.begin(), queue.end(), id), queue.end());
          M.clear_waiting();
        }
      }
    }
    for (auto sid : lost) interrupt_session(sid, "range");

    for (auto& [id, M] : maps_) {
      if (!M.session && !M.waiting_target()) try_engage(id);
    }
    sched_.schedule(t + sc_.params.mobility_tick,
                    [this] { mobility_tick(sc_.params.mobility_tick); });
  }

  void try_engage(MapId map_id) {
    auto& M = maps_.at(map_id);
    const RegionId region = M.config().region;
    // Delivery outranks collection whenever both are in reach.
    if (!M.held().empty()) {
      for (DpcId did : region_dpcs_[region]) {
        if (M.in_contact_with(endpoint_position(HolderKind::dpc, did))) {
          request_session(map_id, HolderKind::dpc, did, SessionDirection::deliver);
          return;
        }
      }
    }
    for (SdccId sid : region_sdccs_[region]) {
      auto it = pending_.find(sid);
      if (it == pending_.end() || it->second.empty()) continue;
      bool collectable = false;
      for (auto bid : it->second) {
        if (!bundles_.at(bid).claimed) {
          collectable = true;
          break;
        }
      }
      if (!collectable) continue;
      if (M.in_contact_with(endpoint_position(HolderKind::sdcc, sid))) {
        request_session(map_id, HolderKind::sdcc, sid, SessionDirection::collect);
        return;
      }
    }
  }

  void request_session(MapId map_id, HolderKind kind, int id, SessionDirection dir) {
    auto& ch = channels_.at({kind, id});
    auto& M = maps_.at(map_id);
    const int channel = ch.allocate();
    if (channel == 0) {
      trace_.emit(sched_.now(), "session_blocked",
                  {{"map", map_id},
                   {"endpoint_kind", to_string(kind)},
                   {"endpoint", id},
                   {"queue", static_cast<int>(ch.waiting.size()) + 1}});
      ch.waiting.push_back(map_id);
      M.set_waiting(kind, id);
      return;
    }
    open_session(map_id, kind, id, dir, channel);
  }

  void open_session(MapId map_id, HolderKind kind, int id, SessionDirection dir, int channel) {
    const auto sid = next_session_++;
    const RegionId eregion = kind == HolderKind::sdcc ? sc_.topology.find_sdcc(id)->region
                                                      : sc_.topology.find_dpc(id)->region;
    const LinkSpec spec = sc_.topology.region_link(eregion);
    auto& M = maps_.at(map_id);
    double rate = spec.rate_mbps;
    if (M.config().link_override) {
      rate = std::min(rate, make_link_spec(*M.config().link_override).rate_mbps);
    }
    sessions_[sid] = AdhocSession{sid, map_id, kind, id, dir, channel, sched_.now(), rate};
    M.session = sid;
    trace_.emit(sched_.now(), "session_open",
                {{"session", sid},
                 {"map", map_id},
                 {"endpoint_kind", to_string(kind)},
                 {"endpoint", id},
                 {"direction", to_string(dir)},
                 {"channel", channel},
                 {"rate_mbps", rate}});
    start_next_transfer(sid);
  }

  void start_next_transfer(std::uint64_t sid) {
    auto& s = sessions_.at(sid);
    auto& M = maps_.at(s.map_id);
    if (s.direction == SessionDirection::deliver) {
      std::uint64_t pick = 0;
      bool found = false;
      for (auto bid : M.held()) {          // urgent payloads jump the line
        if (bundles_.at(bid).urgent) {
          pick = bid;
          found = true;
          break;
        }
      }
      if (!found && !M.held().empty()) {
        pick = M.held().front();
        found = true;
      }
      if (!found) {
        close_session(sid, "drained");
        return;
      }
      begin_transfer(sid, pick);
      return;
    }
    auto& pend = pending_[s.endpoint_id];
    for (auto bid : pend) {
      auto& b = bundles_.at(bid);
      if (b.claimed) continue;
      if (!M.fits(b.total_bytes)) {
        b.deferred_count += 1;
        trace_.emit(sched_.now(), "deferred",
                    {{"bundle", bid},
                     {"map", s.map_id},
                     {"occupancy", M.occupancy()},
                     {"capacity", M.config().buffer_capacity}});
        continue;
      }
      M.reserve(b.total_bytes);
      begin_transfer(sid, bid);
      return;
    }
    close_session(sid, "drained");
  }

  void begin_transfer(std::uint64_t sid, std::uint64_t bundle_id) {
    auto& s = sessions_.at(sid);
    auto& b = bundles_.at(bundle_id);
    std::int64_t done = 0;
    if (b.partial) {
      // Progress survives only toward the same counterpart.
      const bool resumable =
          s.direction == SessionDirection::collect
              ? (b.partial->endpoint_kind == HolderKind::map && b.partial->endpoint_id == s.map_id)
              : (b.partial->endpoint_kind == HolderKind::dpc &&
                 b.partial->endpoint_id == s.endpoint_id);
      if (resumable) {
        done = b.partial->bytes_done;
      } else {
        b.partial.reset();
      }
    }
    b.claimed = true;
    const std::int64_t remaining = b.total_bytes - done;
    const auto gen = transfer_gen_++;
    transfers_[sid] = ActiveTransfer{bundle_id, sched_.now(), done, b.total_bytes, gen};
    trace_.emit(sched_.now(), "transfer_start",
                {{"session", sid},
                 {"bundle", bundle_id},
                 {"bytes", remaining},
                 {"rate_mbps", s.rate_mbps}});
    const double dur = transfer_seconds(remaining, s.rate_mbps, sc_.params.link_efficiency);
    sched_.schedule(sched_.now() + dur, [this, sid, gen] { on_transfer_complete(sid, gen); });
  }

  void on_transfer_complete(std::uint64_t sid, std::uint64_t gen) {
    auto it = transfers_.find(sid);
    if (it == transfers_.end() || it->second.gen != gen) return;  // superseded
    const ActiveTransfer tr = it->second;
    transfers_.erase(it);
    auto& s = sessions_.at(sid);
    auto& M = maps_.at(s.map_id);
    auto& b = bundles_.at(tr.bundle_id);
    const double t = sched_.now();
    trace_.emit(t, "transfer_complete",
                {{"session", sid},
                 {"bundle", tr.bundle_id},
                 {"bytes", tr.total - tr.bytes_done_before},
                 {"seconds", t - tr.start}});
    b.partial.reset();
    b.claimed = false;
    if (s.direction == SessionDirection::collect) {
      auto& pend = pending_[s.endpoint_id];
      pend.erase(std::remove(pend.begin(), pend.end(), tr.bundle_id), pend.end());
      b.holder_kind = HolderKind::map;
      b.holder_id = s.map_id;
      b.custody.push_back({HolderKind::map, s.map_id, t});
      M.held().push_back(tr.bundle_id);
      trace_.emit(t, "custody",
                  {{"bundle", tr.bundle_id},
                   {"from_kind", "sdcc"},
                   {"from", s.endpoint_id},
                   {"to_kind", "map"},
                   {"to", s.map_id}});
      maybe_bypass(b, "map");
    } else {
      auto& held = M.held();
      held.erase(std::remove(held.begin(), held.end(), tr.bundle_id), held.end());
      M.release_bytes(b.total_bytes);
      deliver_bundle(tr.bundle_id, s.endpoint_id, "map", s.map_id);
    }
    start_next_transfer(sid);
  }

  void interrupt_session(std::uint64_t sid, const std::string& reason) {
    auto it = transfers_.find(sid);
    const double t = sched_.now();
    auto& s = sessions_.at(sid);
    if (it != transfers_.end()) {
      const ActiveTransfer tr = it->second;
      auto& b = bundles_.at(tr.bundle_id);
      const double bps = link_bytes_per_second(
          LinkSpec{WifiStandard::dot11b, s.rate_mbps, 0.0, 0}, sc_.params.link_efficiency);
      std::int64_t done =
          tr.bytes_done_before + static_cast<std::int64_t>((t - tr.start) * bps);
      done = std::min(done, tr.total);
      if (s.direction == SessionDirection::collect) {
        b.partial = PartialTransfer{HolderKind::map, s.map_id, done};
        maps_.at(s.map_id).release_bytes(tr.total);  // reservation only; still pending
      } else {
        b.partial = PartialTransfer{HolderKind::dpc, s.endpoint_id, done};
      }
      b.claimed = false;
      trace_.emit(t, "transfer_interrupt",
                  {{"session", sid}, {"bundle", tr.bundle_id}, {"bytes_done", done}});
      transfers_.erase(it);
    }
    close_session(sid, reason);
  }

  void close_session(std::uint64_t sid, const std::string& reason) {
    const AdhocSession s = sessions_.at(sid);
    sessions_.erase(sid);
    maps_.at(s.map_id).session.reset();
    trace_.emit(sched_.now(), "session_close", {{"session", sid}, {"reason", reason}});
    auto& ch = channels_.at({s.endpoint_kind, s.endpoint_id});
    ch.release(s.channel);
    serve_waiting(s.endpoint_kind, s.endpoint_id);
  }

  void serve_waiting(HolderKind kind, int id) {
    auto& ch = channels_.at({kind, id});
    while (!ch.waiting.empty() && ch.active() < ch.capacity) {
      const MapId mid = ch.waiting.front();
      ch.waiting.pop_front();
      auto& M = maps_.at(mid);
      M.clear_waiting();
      if (M.session) continue;
      if (!M.in_contact_with(endpoint_position(kind, id))) continue;
      if (kind == HolderKind::dpc) {
        if (M.held().empty()) continue;
        open_session(mid, kind, id, SessionDirection::deliver, ch.allocate());
      } else {
        const auto it = pending_.find(id);
        if (it == pending_.end() || it->second.empty()) continue;
        open_session(mid, kind, id, SessionDirection::collect, ch.allocate());
      }
    }
  }

  // ---- processing ----

  void deliver_bundle(std::uint64_t bundle_id, DpcId dpc_id, const char* via,
                      std::optional<MapId> map_id) {
    auto& b = bundles_.at(bundle_id);
    const Dpc* dpc = sc_.topology.find_dpc(dpc_id);
    const double t = sched_.now();
    trace_.emit(t, "custody",
                {{"bundle", bundle_id},
                 {"from_kind", to_string(b.holder_kind)},
                 {"from", b.holder_id},
                 {"to_kind", "dpc"},
                 {"to", dpc_id}});
    b.holder_kind = HolderKind::dpc;
    b.holder_id = dpc_id;
    b.partial.reset();
    b.custody.push_back({HolderKind::dpc, dpc_id, t});
    const DpcId served = dispatcher_->next(dpc->region);
    TraceJson ev = {{"bundle", bundle_id}, {"via", via}, {"dpc", dpc_id}, {"served_by", served}};
    if (map_id) ev["map"] = *map_id;
    trace_.emit(t, "delivery", std::move(ev));
    maybe_bypass(b, "dpc");
    enqueue_job(served, DpcJob{bundle_id, std::nullopt});
  }

  void maybe_bypass(DataBundle& b, const char* via) {
    if (!b.urgent || b.bypass_dispatched) return;
    b.bypass_dispatched = true;
    const auto cls = b.batches.front().hazard_class_hint;
    const int area = b.batches.front().sdcc_id;
    const auto bid = b.id;
    const std::string via_str = via;
    sched_.schedule(sched_.now() + sc_.params.wireless_latency, [this, bid, cls, area, via_str] {
      trace_.emit(sched_.now(), "dispatch",
                  {{"departments", response_departments()},
                   {"bypass", true},
                   {"area", area},
                   {"class", to_string(cls)},
                   {"bundle", bid},
                   {"via", via_str}});
    });
  }

  void enqueue_job(DpcId dpc, DpcJob job) {
    auto& D = dpcs_.at(dpc);
    D.queue.push_back(std::move(job));
    trace_.emit(sched_.now(), "queue",
                {{"dpc", dpc}, {"depth", static_cast<int>(D.queue.size())}});
    if (!D.busy) begin_service(dpc);
  }

  void begin_service(DpcId dpc) {
    auto& D = dpcs_.at(dpc);
    D.busy = true;
    const auto& job = D.queue.front();
    TraceJson ev = {{"dpc", dpc}, {"bundle", job.bundle_id}, {"reprocess", job.draft.has_value()}};
    if (job.draft) ev["report"] = job.draft->id;
    trace_.emit(sched_.now(), "service_start", std::move(ev));
    sched_.schedule(sched_.now() + D.config->service_time, [this, dpc] { complete_service(dpc); });
  }

  void complete_service(DpcId dpc) {
    auto& D = dpcs_.at(dpc);
    DpcJob job = std::move(D.queue.front());
    D.queue.pop_front();
    const double t = sched_.now();
    ProcessedReport rep;
    if (job.draft) {
      rep = std::move(*job.draft);
      if (D.has_conflicting_replica(rep, t, sc_.params.merge_lookback)) {
        trace_.emit(t, "replica_conflict", {{"dpc", dpc}, {"report", rep.id}});
      }
      if (auto peer = D.find_replica(rep, t, sc_.params.merge_lookback)) {
        const double before = rep.confidence;
        rep = merge_reports(rep, *peer);
        trace_.emit(t, "merge",
                    {{"dpc", dpc},
                     {"report", rep.id},
                     {"peer_dpc", peer->dpc_id},
                     {"confidence_before", before},
                     {"confidence_after", rep.confidence}});
      }
    } else {
      rep = build_report(bundles_.at(job.bundle_id), *D.config, D.config->region, t,
                         next_report_++);
    }
    if (rep.confidence >= D.config->confidence_threshold) {
      finalize_report(dpc, job.bundle_id, std::move(rep), Verdict::accepted);
    } else if (rep.reprocess_count < D.config->max_reprocess) {
      rep.reprocess_count += 1;
      trace_.emit(t, "reprocess",
                  {{"dpc", dpc},
                   {"report", rep.id},
                   {"confidence", rep.confidence},
                   {"attempt", rep.reprocess_count}});
      D.queue.push_back(DpcJob{job.bundle_id, std::move(rep)});
      trace_.emit(t, "queue", {{"dpc", dpc}, {"depth", static_cast<int>(D.queue.size())}});
    } else {
      finalize_report(dpc, job.bundle_id, std::move(rep), Verdict::low_confidence);
    }
    if (!D.queue.empty()) {
      begin_service(dpc);
    } else {
      D.busy = false;
    }
  }

  void finalize_report(DpcId dpc, std::uint64_t bundle_id, ProcessedReport rep, Verdict verdict) {
    const double t = sched_.now();
    reports_[rep.id] = rep;
    trace_.emit(t, "verdict",
                {{"dpc", dpc},
                 {"report", rep.id},
                 {"bundle", bundle_id},
                 {"confidence", rep.confidence},
                 {"verdict", to_string(verdict)},
                 {"reprocess_count", rep.reprocess_count},
                 {"area", rep.area_id},
                 {"class", to_string(rep.hazard_class)},
                 {"hazard_ids", rep.hazard_ids},
                 {"truthful_count", rep.truthful_count},
                 {"false_count", rep.false_count}});
    if (verdict == Verdict::accepted) {
      auto peers = sc_.topology.find_dpc(dpc)->peers;
      std::sort(peers.begin(), peers.end());
      for (DpcId peer : peers) {
        if (peer == dpc || !sc_.topology.find_dpc(peer)) continue;
        trace_.emit(t, "replicate", {{"from", dpc}, {"to", peer}, {"report", rep.id}});
        sched_.schedule(t + sc_.params.inter_dpc_latency, [this, peer, rep] {
          dpcs_.at(peer).replicas.push_back({rep, sched_.now()});
        });
      }
    }
    const bool flagged = verdict == Verdict::low_confidence;
    trace_.emit(t, "forward", {{"dpc", dpc}, {"report", rep.id}, {"flagged", flagged}});
    sched_.schedule(t + sc_.params.dpc_cdc_latency,
                    [this, rep, flagged] { cdc_arrival(rep, flagged); });
  }

  // ---- decision ----

  void cdc_arrival(const ProcessedReport& rep, bool flagged) {
    const double t = sched_.now();
    const auto& cdc = sc_.topology.cdc_dcc;
    // Match before archiving so a report never matches itself.
    const MatchResult res = match_reference(reference_db_, rep, cdc.match_threshold);
    reference_db_.push_back(record_from_report(rep, t));
    TraceJson ev = {{"report", rep.id},
                    {"similarity", res.similarity},
                    {"matched", res.matched},
                    {"flagged", flagged}};
    if (res.matched) ev["outcome"] = res.outcome;
    trace_.emit(t, "match", std::move(ev));
    if (res.matched || sc_.params.escalate_unmatched) {
      const bool matched = res.matched;
      const double sim = res.similarity;
      sched_.schedule(t + sc_.params.cdc_dcc_latency,
                      [this, rep, matched, sim] { issue_warning(rep, matched, sim); });
    }
  }

  void issue_warning(const ProcessedReport& rep, bool matched, double similarity) {
    const double t = sched_.now();
    const auto wid = next_warning_++;
    trace_.emit(t, "warning",
                {{"warning", wid},
                 {"report", rep.id},
                 {"area", rep.area_id},
                 {"class", to_string(rep.hazard_class)},
                 {"matched", matched},
                 {"similarity", similarity},
                 {"hazard_ids", rep.hazard_ids},
                 {"truthful_count", rep.truthful_count},
                 {"false_count", rep.false_count}});
    trace_.emit(t, "dispatch",
                {{"warning", wid},
                 {"departments", response_departments()},
                 {"bypass", false},
                 {"area", rep.area_id},
                 {"class", to_string(rep.hazard_class)}});
    int index = 0;
    for (const auto& p : sc_.topology.cdc_dcc.sms_providers) {
      if (p.area_id != rep.area_id) {
        ++index;
        continue;
      }
      const SmsPlan plan = plan_sms(t, p, sc_.params.sms_batch_size);
      const int pi = index;
      const int area = rep.area_id;
      const int subs = p.subscriber_count;
      if (plan.first_time) {
        sched_.schedule(*plan.first_time, [this, wid, pi, area] {
          trace_.emit(sched_.now(), "sms",
                      {{"warning", wid}, {"area", area}, {"provider", pi}, {"phase", "first"}});
        });
      }
      sched_.schedule(plan.done_time, [this, wid, pi, area, subs, plan] {
        trace_.emit(sched_.now(), "sms",
                    {{"warning", wid},
                     {"area", area},
                     {"provider", pi},
                     {"phase", "done"},
                     {"batches", plan.batches},
                     {"subscribers", subs}});
      });
      ++index;
    }
  }

  Scenario sc_;
  std::uint64_t seed_ = 0;
  double horizon_ = 0.0;
  Scheduler sched_;
  TraceWriter trace_;

  std::map<SdccId, SdccState> sdccs_;
  std::map<MapId, MapState> maps_;
  std::map<DpcId, DpcState> dpcs_;
  std::map<EndpointKey, ChannelState> channels_;
  std::map<std::uint64_t, DataBundle> bundles_;
  std::map<SdccId, std::vector<std::uint64_t>> pending_;
  std::map<std::uint64_t, AdhocSession> sessions_;
  std::map<std::uint64_t, ActiveTransfer> transfers_;
  std::map<SensorId, EntityRng> sensor_rng_;
  std::map<SdccId, std::vector<SensorId>> assigned_;
  std::map<RegionId, std::vector<DpcId>> region_dpcs_;
  std::map<RegionId, std::vector<SdccId>> region_sdccs_;
  std::unique_ptr<RoundRobinDispatcher> dispatcher_;
  std::map<std::uint64_t, ProcessedReport> reports_;
  std::vector<DisasterRecord> reference_db_;

  std::uint64_t next_batch_ = 1;
  std::uint64_t next_bundle_ = 1;
  std::uint64_t next_report_ = 1;
  std::uint64_t next_warning_ = 1;
  std::uint64_t next_session_ = 1;
  std::uint64_t transfer_gen_ = 1;
};

/// Convenience wrapper used by the CLI and most tests.
inline SimulationResult run_simulation(const Scenario& scenario, std::uint64_t seed,
                                       double horizon) {
  Simulation sim(scenario, seed, horizon);
  return sim.run();
}

}  // namespace dmsim
