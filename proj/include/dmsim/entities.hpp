#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dmsim/geometry.hpp"
#include "dmsim/links.hpp"

namespace dmsim {

using SensorId = int;
using SdccId = int;
using MapId = int;
using DpcId = int;
using RegionId = int;

enum class Modality { acoustic, seismic, magnetic, thermal, water_level };

enum class HazardClass {
  flood,
  tsunami,
  cyclone,
  earthquake,
  landslide,
  flash_flood,
  building_collapse,
  tornado,
};

inline std::string to_string(Modality m) {
  switch (m) {
    case Modality::acoustic: return "acoustic";
    case Modality::seismic: return "seismic";
    case Modality::magnetic: return "magnetic";
    case Modality::thermal: return "thermal";
    case Modality::water_level: return "water_level";
  }
  return "?";
}

inline bool parse_modality(const std::string& s, Modality& out) {
  if (s == "acoustic") { out = Modality::acoustic; return true; }
  if (s == "seismic") { out = Modality::seismic; return true; }
  if (s == "magnetic") { out = Modality::magnetic; return true; }
  if (s == "thermal") { out = Modality::thermal; return true; }
  if (s == "water_level" || s == "water-level") { out = Modality::water_level; return true; }
  return false;
}

inline std::string to_string(HazardClass c) {
  switch (c) {
    case HazardClass::flood: return "flood";
    case HazardClass::tsunami: return "tsunami";
    case HazardClass::cyclone: return "cyclone";
    case HazardClass::earthquake: return "earthquake";
    case HazardClass::landslide: return "landslide";
    case HazardClass::flash_flood: return "flash_flood";
    case HazardClass::building_collapse: return "building_collapse";
    case HazardClass::tornado: return "tornado";
  }
  return "?";
}

inline bool parse_hazard_class(const std::string& s, HazardClass& out) {
  if (s == "flood") { out = HazardClass::flood; return true; }
  if (s == "tsunami") { out = HazardClass::tsunami; return true; }
  if (s == "cyclone") { out = HazardClass::cyclone; return true; }
  if (s == "earthquake") { out = HazardClass::earthquake; return true; }
  if (s == "landslide") { out = HazardClass::landslide; return true; }
  if (s == "flash_flood") { out = HazardClass::flash_flood; return true; }
  if (s == "building_collapse") { out = HazardClass::building_collapse; return true; }
  if (s == "tornado") { out = HazardClass::tornado; return true; }
  return false;
}

/// Fixed-position sensor. `failed` marks a node dead from load time;
/// `fail_at` scripts a mid-run failure (the node counts as live at load).
struct SensorNode {
  SensorId id = 0;
  RegionId region = 0;
  GeoPoint position;
  Modality modality = Modality::seismic;
  double false_report_prob = 0.0;
  bool failed = false;
  double fail_at = std::numeric_limits<double>::infinity();
  SdccId assigned_sdcc = -1;  // filled by assign_clusters
};

enum class BaselineCategory { demographic, health, resources, infrastructure };

inline std::string to_string(BaselineCategory c) {
  switch (c) {
    case BaselineCategory::demographic: return "demographic";
    case BaselineCategory::health: return "health";
    case BaselineCategory::resources: return "resources";
    case BaselineCategory::infrastructure: return "infrastructure";
  }
  return "?";
}

inline bool parse_baseline_category(const std::string& s, BaselineCategory& out) {
  if (s == "demographic") { out = BaselineCategory::demographic; return true; }
  if (s == "health") { out = BaselineCategory::health; return true; }
  if (s == "resources") { out = BaselineCategory::resources; return true; }
  if (s == "infrastructure") { out = BaselineCategory::infrastructure; return true; }
  return false;
}

/// Manually curated area data kept at a collection center and shipped as a
/// snapshot with every outgoing batch.
struct BaselineRecord {
  RegionId area_id = 0;
  BaselineCategory category = BaselineCategory::demographic;
  std::int64_t payload_bytes = 0;
  std::string description;
};

/// Sensor data collection center: the per-area sink with the trigger
/// threshold tau over its detection window.
struct Sdcc {
  SdccId id = 0;
  RegionId region = 0;
  GeoPoint position;
  int tau = 1;
  double window = 60.0;
  std::vector<BaselineRecord> baseline;
  std::optional<DpcId> collapsed_with;  // filled by collapse_pairs
};

enum class MobilityMode { patrol, random_waypoint };

/// Vehicle-mounted access point that shuttles data between collection and
/// processing centers over opportunistic contacts.
struct MapUnit {
  MapId id = 0;
  RegionId region = 0;
  double speed = 10.0;           // m/s along the route
  std::vector<GeoPoint> route;   // patrol loop waypoints
  double contact_range = 100.0;  // m, inclusive
  std::int64_t buffer_capacity = 10'000'000;
  std::optional<WifiStandard> link_override;
  MobilityMode mobility = MobilityMode::patrol;
};

/// A past-disaster entry used for history lookups and reference matching.
struct DisasterRecord {
  RegionId area_id = 0;
  HazardClass hazard_class = HazardClass::flood;
  std::vector<double> feature_vector;
  double occurred_time = 0.0;
  std::string outcome;
};

/// Data processing center.
struct Dpc {
  DpcId id = 0;
  RegionId region = 0;
  GeoPoint position;
  double confidence_threshold = 0.7;
  int max_reprocess = 2;
  std::vector<DpcId> peers;  // defaults to every other center in the region
  double service_time = 5.0;
};

struct SmsProvider {
  RegionId area_id = 0;
  std::int64_t subscriber_count = 0;
  double per_message_latency = 1.0;  // seconds per dissemination batch
};

/// Central data center plus decision-and-command configuration.
struct CdcDcc {
  int cdc_count = 1;
  std::vector<DisasterRecord> reference_db;
  double match_threshold = 0.7;
  std::vector<SmsProvider> sms_providers;
  std::set<HazardClass> bypass_classes = {
      HazardClass::tornado, HazardClass::flash_flood, HazardClass::earthquake,
      HazardClass::landslide, HazardClass::building_collapse};
};

struct Region {
  RegionId id = 0;
  LinkSpec link = make_link_spec(WifiStandard::dot11b);
  double width = 1000.0;   // random-waypoint bounds
  double height = 1000.0;
  std::map<Modality, HazardClass> hint_overrides;
};

/// A scripted ground-truth hazard. Sensors in the footprint observe it for
/// as long as it is active.
struct HazardEvent {
  int id = 0;
  HazardClass hazard_class = HazardClass::flood;
  double onset_time = 0.0;
  double duration = std::numeric_limits<double>::infinity();
  RegionId region = 0;
  double magnitude = 1.0;
  std::set<SensorId> footprint;
  bool footprint_all = true;  // whole-region footprint, resolved at load

  bool active_at(double t) const {
    return t >= onset_time && t < onset_time + duration;
  }
};

/// Static world description, immutable once loaded. Safe to share read-only
/// across concurrently executing runs; all per-run mutable state lives in
/// the engine.
struct Topology {
  std::vector<Region> regions;
  std::vector<SensorNode> sensors;
  std::vector<Sdcc> sdccs;
  std::vector<MapUnit> maps;
  std::vector<Dpc> dpcs;
  CdcDcc cdc_dcc;
  double delta = 0.0;  // direct-link collapse distance, strict <

  const Region* find_region(RegionId id) const {
    for (const auto& r : regions) if (r.id == id) return &r;
    return nullptr;
  }
  const Sdcc* find_sdcc(SdccId id) const {
    for (const auto& s : sdccs) if (s.id == id) return &s;
    return nullptr;
  }
  const Dpc* find_dpc(DpcId id) const {
    for (const auto& d : dpcs) if (d.id == id) return &d;
    return nullptr;
  }
  const MapUnit* find_map(MapId id) const {
    for (const auto& m : maps) if (m.id == id) return &m;
    return nullptr;
  }
  const SensorNode* find_sensor(SensorId id) const {
    for (const auto& s : sensors) if (s.id == id) return &s;
    return nullptr;
  }

  const LinkSpec& region_link(RegionId id) const {
    static const LinkSpec fallback = make_link_spec(WifiStandard::dot11b);
    const Region* r = find_region(id);
    return r ? r->link : fallback;
  }

  /// Live at load time: not statically failed. Scripted mid-run failures
  /// still count as live here.
  int live_assigned_sensors(SdccId sdcc) const {
    int n = 0;
    for (const auto& s : sensors) {
      if (s.assigned_sdcc == sdcc && !s.failed) ++n;
    }
    return n;
  }
};

/// Default mapping from the dominant reading modality to the hazard class a
/// collection center stamps on its outgoing batches. Regions may override
/// entries (e.g. water_level -> tsunami on a coast).
inline HazardClass default_class_hint(Modality m) {
  switch (m) {
    case Modality::seismic: return HazardClass::earthquake;
    case Modality::water_level: return HazardClass::flood;
    case Modality::acoustic: return HazardClass::tornado;
    case Modality::magnetic: return HazardClass::landslide;
    case Modality::thermal: return HazardClass::flash_flood;
  }
  return HazardClass::flood;
}

inline HazardClass class_hint_for(const Region& region, Modality m) {
  auto it = region.hint_overrides.find(m);
  return it != region.hint_overrides.end() ? it->second : default_class_hint(m);
}

}  // namespace dmsim
