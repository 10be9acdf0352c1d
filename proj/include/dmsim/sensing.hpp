#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dmsim/entities.hpp"
#include "dmsim/rng.hpp"

namespace dmsim {

/// One observation emitted by a sensor. `truthful` and `hazard_id` are
/// ground-truth tags carried for metrics only; no collection-center or
/// downstream logic may branch on them.
struct SensorReading {
  SensorId sensor_id = 0;
  double timestamp = 0.0;
  Modality parameter = Modality::seismic;
  double value = 0.0;
  bool truthful = false;
  int hazard_id = 0;  // 0 for false reports
};

/// The aggregate a collection center emits once at least tau distinct
/// sensors have reported within its detection window.
struct EventBatch {
  std::uint64_t id = 0;
  SdccId sdcc_id = 0;
  double trigger_time = 0.0;
  std::set<SensorId> contributing_sensors;
  std::int64_t payload_bytes = 0;
  HazardClass hazard_class_hint = HazardClass::flood;
  double window_used = 0.0;
  int live_sensors = 0;  // cluster size when the batch formed, for coverage
  std::vector<SensorReading> readings;  // window contents at trigger time
};

struct ClusterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nearest-center sensor assignment, ties broken by lower center id.
/// Returns the assignment and writes it back into the sensor nodes.
inline std::map<SensorId, SdccId> assign_clusters(std::vector<SensorNode>& sensors,
                                                  const std::vector<Sdcc>& sdccs) {
  std::map<SensorId, SdccId> assignment;
  for (auto& sensor : sensors) {
    const Sdcc* best = nullptr;
    double best_dist = 0.0;
    for (const auto& sdcc : sdccs) {
      if (sdcc.region != sensor.region) continue;
      const double d = distance(sensor.position, sdcc.position);
      if (!best || d < best_dist || (d == best_dist && sdcc.id < best->id)) {
        best = &sdcc;
        best_dist = d;
      }
    }
    if (!best) {
      throw ClusterError("region " + std::to_string(sensor.region) +
                         " has no collection center for sensor " + std::to_string(sensor.id));
    }
    sensor.assigned_sdcc = best->id;
    assignment[sensor.id] = best->id;
  }
  return assignment;
}

inline bool sensor_alive(const SensorNode& s, double now) {
  return !s.failed && now < s.fail_at;
}

/// Per-window reading generation for one sensor. A sensor in the footprint
/// of an active hazard reports it; independently it may emit a false
/// report. Dead sensors emit nothing.
inline std::vector<SensorReading> generate_sensor_readings(
    const SensorNode& sensor, const std::vector<HazardEvent>& hazards, double now,
    EntityRng& rng, double false_value_max) {
  std::vector<SensorReading> out;
  if (!sensor_alive(sensor, now)) return out;
  const HazardEvent* observed = nullptr;
  for (const auto& h : hazards) {
    if (h.region != sensor.region || !h.active_at(now) || !h.footprint.count(sensor.id)) continue;
    if (!observed || h.magnitude > observed->magnitude ||
        (h.magnitude == observed->magnitude && h.id < observed->id)) {
      observed = &h;
    }
  }
  if (observed) {
    out.push_back({sensor.id, now, sensor.modality, observed->magnitude, true, observed->id});
  }
  if (sensor.false_report_prob > 0.0 && rng.next_bernoulli(sensor.false_report_prob)) {
    out.push_back({sensor.id, now, sensor.modality, rng.next_uniform(0.0, false_value_max),
                   false, 0});
  }
  return out;
}

struct RoutingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run-time state of one collection center: the sliding reading window and
/// the trigger latch. Owned by the engine; never shared between runs.
class SdccState {
 public:
  SdccState() = default;
  SdccState(const Sdcc& config, const Region& region, std::int64_t reading_bytes)
      : config_(&config), region_(&region), reading_bytes_(reading_bytes),
        baseline_(config.baseline) {}

  const Sdcc& config() const { return *config_; }

  /// Buffers a reading from an assigned sensor and drops everything older
  /// than the detection window (window is (t - W, t]).
  void ingest(const SensorReading& reading, SdccId assigned_sdcc) {
    if (assigned_sdcc != config_->id) {
      throw RoutingError("reading from sensor " + std::to_string(reading.sensor_id) +
                         " routed to sdcc " + std::to_string(config_->id) +
                         " but assigned to sdcc " + std::to_string(assigned_sdcc));
    }
    buffer_.push_back(reading);
    distinct_[reading.sensor_id] += 1;
    evict(reading.timestamp);
  }

  void evict(double now) {
    const double cutoff = now - config_->window;
    while (!buffer_.empty() && buffer_.front().timestamp <= cutoff) {
      auto it = distinct_.find(buffer_.front().sensor_id);
      if (--it->second == 0) distinct_.erase(it);
      buffer_.pop_front();
    }
  }

  /// Adds a curated record; it rides along in every later batch snapshot.
  void ingest_baseline(const BaselineRecord& record) {
    if (record.area_id != config_->id) {
      throw RoutingError("baseline record for area " + std::to_string(record.area_id) +
                         " offered to sdcc " + std::to_string(config_->id));
    }
    baseline_.push_back(record);
  }

  const std::vector<BaselineRecord>& baseline() const { return baseline_; }

  int distinct_count() const { return static_cast<int>(distinct_.size()); }
  std::size_t buffered_readings() const { return buffer_.size(); }

  /// Trigger check. Emits one batch per contiguous exceedance of tau; the
  /// latch clears as soon as the distinct count falls back below tau.
  std::optional<EventBatch> evaluate(double now, std::uint64_t next_batch_id) {
    evict(now);
    if (distinct_count() < config_->tau) {
      in_exceedance_ = false;
      return std::nullopt;
    }
    if (in_exceedance_) return std::nullopt;
    in_exceedance_ = true;

    EventBatch batch;
    batch.id = next_batch_id;
    batch.sdcc_id = config_->id;
    batch.trigger_time = now;
    batch.window_used = config_->window;
    for (const auto& [sensor, count] : distinct_) batch.contributing_sensors.insert(sensor);
    batch.readings.assign(buffer_.begin(), buffer_.end());
    batch.payload_bytes = reading_bytes_ * static_cast<std::int64_t>(buffer_.size());
    for (const auto& rec : baseline_) batch.payload_bytes += rec.payload_bytes;
    batch.hazard_class_hint = dominant_hint();
    return batch;
  }

 private:
  HazardClass dominant_hint() const {
    std::map<Modality, int> tally;
    for (const auto& r : buffer_) tally[r.parameter] += 1;
    Modality best = Modality::acoustic;
    int best_count = -1;
    for (const auto& [m, n] : tally) {
      if (n > best_count) {  // std::map iterates in enum order, so ties keep the first
        best = m;
        best_count = n;
      }
    }
    return class_hint_for(*region_, best);
  }

  const Sdcc* config_ = nullptr;
  const Region* region_ = nullptr;
  std::int64_t reading_bytes_ = 64;
  std::deque<SensorReading> buffer_;
  std::map<SensorId, int> distinct_;
  std::vector<BaselineRecord> baseline_;
  bool in_exceedance_ = false;
};

}  // namespace dmsim
