#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmsim/entities.hpp"
#include "dmsim/rng.hpp"
#include "dmsim/sensing.hpp"

namespace dmsim {

enum class HolderKind { sdcc, map, dpc };

inline std::string to_string(HolderKind k) {
  switch (k) {
    case HolderKind::sdcc: return "sdcc";
    case HolderKind::map: return "map";
    case HolderKind::dpc: return "dpc";
  }
  return "?";
}

struct CustodyEntry {
  HolderKind kind = HolderKind::sdcc;
  int id = 0;
  double time = 0.0;
};

struct PartialTransfer {
  HolderKind endpoint_kind = HolderKind::sdcc;
  int endpoint_id = 0;
  std::int64_t bytes_done = 0;
};

/// A custody-tracked payload moving from a collection center toward a
/// processing center, either muled or over a direct link.
struct DataBundle {
  std::uint64_t id = 0;
  std::vector<EventBatch> batches;
  std::vector<BaselineRecord> baseline_snapshots;
  std::int64_t total_bytes = 0;
  std::vector<CustodyEntry> custody;
  double created_time = 0.0;
  bool urgent = false;  // bypass-class payload, delivered ahead of the rest

  // Run-time bookkeeping.
  HolderKind holder_kind = HolderKind::sdcc;
  int holder_id = 0;
  std::optional<PartialTransfer> partial;
  bool claimed = false;  // an open session is moving it; others must skip it
  int deferred_count = 0;
  bool bypass_dispatched = false;
};

enum class SessionDirection { collect, deliver };

inline std::string to_string(SessionDirection d) {
  return d == SessionDirection::collect ? "collect" : "deliver";
}

/// An open ad hoc link between one mule and one fixed endpoint.
struct AdhocSession {
  std::uint64_t id = 0;
  MapId map_id = 0;
  HolderKind endpoint_kind = HolderKind::sdcc;
  int endpoint_id = 0;
  SessionDirection direction = SessionDirection::collect;
  int channel = 0;
  double start_time = 0.0;
  double rate_mbps = 11.0;
};

/// Channel bookkeeping at one endpoint: a fixed number of non-overlapping
/// channels plus a FIFO of mules waiting for one.
struct ChannelState {
  int capacity = 3;
  std::set<int> used;
  std::deque<MapId> waiting;

  /// Lowest-numbered free channel, or 0 when saturated.
  int allocate() {
    for (int c = 1; c <= capacity; ++c) {
      if (!used.count(c)) {
        used.insert(c);
        return c;
      }
    }
    return 0;
  }
  void release(int channel) { used.erase(channel); }
  int active() const { return static_cast<int>(used.size()); }
};

inline bool detect_contact(const GeoPoint& map_pos, const GeoPoint& node_pos, double range) {
  return distance(map_pos, node_pos) <= range;  // inclusive boundary
}

/// Seconds to move `bytes` at a nominal rate, scaled by the efficiency
/// factor. Zero-byte payloads move instantly.
inline double transfer_seconds(std::int64_t bytes, double rate_mbps, double efficiency = 1.0) {
  if (bytes <= 0) return 0.0;
  return static_cast<double>(bytes) / link_bytes_per_second(
             LinkSpec{WifiStandard::dot11b, rate_mbps, 0.0, 0}, efficiency);
}

/// Run-time state of one mule: route progress, carried bundles, session.
class MapState {
 public:
  MapState() = default;
  MapState(const MapUnit& config, const Region& region, std::uint64_t run_seed)
      : config_(&config), region_(&region), loop_(config.route),
        rng_(run_seed, StreamKind::map_waypoint, static_cast<std::uint64_t>(config.id)) {
    position_ = config.route.front();
    waypoint_target_ = position_;
  }

  const MapUnit& config() const { return *config_; }
  const GeoPoint& position() const { return position_; }

  /// Advances dt seconds of motion. Patrol mode follows the waypoint loop
  /// at constant speed; random-waypoint mode heads for seeded uniform
  /// targets inside the region bounds.
  void step_mobility(double dt) {
    if (dt <= 0.0) return;
    if (config_->mobility == MobilityMode::patrol) {
      if (loop_.perimeter() == 0.0) return;
      arc_ += config_->speed * dt;
      arc_ = std::fmod(arc_, loop_.perimeter());
      position_ = loop_.at(arc_);
      return;
    }
    double budget = config_->speed * dt;
    while (budget > 0.0) {
      const double remaining = distance(position_, waypoint_target_);
      if (remaining <= budget) {
        position_ = waypoint_target_;
        budget -= remaining;
        waypoint_target_ = GeoPoint{rng_.next_uniform(0.0, region_->width),
                                    rng_.next_uniform(0.0, region_->height)};
        if (remaining == 0.0 && budget == 0.0) break;
      } else {
        const double f = budget / remaining;
        position_.x += (waypoint_target_.x - position_.x) * f;
        position_.y += (waypoint_target_.y - position_.y) * f;
        budget = 0.0;
      }
    }
  }

  bool in_contact_with(const GeoPoint& p) const {
    return detect_contact(position_, p, config_->contact_range);
  }

  std::int64_t occupancy() const { return occupancy_; }
  bool fits(std::int64_t bytes) const { return occupancy_ + bytes <= config_->buffer_capacity; }
  void reserve(std::int64_t bytes) { occupancy_ += bytes; }
  void release_bytes(std::int64_t bytes) { occupancy_ -= bytes; }

  std::vector<std::uint64_t>& held() { return held_; }
  const std::vector<std::uint64_t>& held() const { return held_; }

  std::optional<std::uint64_t> session;  // open session id, if any
  bool waiting_at(HolderKind kind, int id) const {
    return waiting_ && waiting_->first == kind && waiting_->second == id;
  }
  std::optional<std::pair<HolderKind, int>> waiting_target() const { return waiting_; }
  void set_waiting(HolderKind kind, int id) { waiting_ = {kind, id}; }
  void clear_waiting() { waiting_.reset(); }

 private:
  const MapUnit* config_ = nullptr;
  const Region* region_ = nullptr;
  RouteLoop loop_{{GeoPoint{}}};
  double arc_ = 0.0;
  GeoPoint position_;
  GeoPoint waypoint_target_;
  EntityRng rng_;
  std::vector<std::uint64_t> held_;
  std::int64_t occupancy_ = 0;
  std::optional<std::pair<HolderKind, int>> waiting_;
};

}  // namespace dmsim
