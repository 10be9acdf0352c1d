#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dmsim/entities.hpp"

namespace dmsim {

enum class Severity { error, warning };

struct ValidationIssue {
  Severity severity = Severity::error;
  std::string code;       // stable machine-readable identifier
  RegionId region = 0;    // 0 when global
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const ValidationIssue& i) { return i.severity == Severity::error; });
  }
  int error_count() const {
    return static_cast<int>(std::count_if(issues.begin(), issues.end(),
        [](const ValidationIssue& i) { return i.severity == Severity::error; }));
  }
  int warning_count() const { return static_cast<int>(issues.size()) - error_count(); }

  bool has_code(const std::string& code) const {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ValidationIssue& i) { return i.code == code; });
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& i : issues) {
      os << (i.severity == Severity::error ? "ERROR" : "WARNING") << " [" << i.code << "]";
      if (i.region != 0) os << " region " << i.region;
      os << ": " << i.message << "\n";
    }
    os << (ok() ? "valid" : "invalid") << " (" << error_count() << " errors, "
       << warning_count() << " warnings)\n";
    return os.str();
  }
};

// Stable issue codes.
namespace vcode {
inline constexpr const char* tau_exceeds_sensors = "tau-exceeds-live-sensors";
inline constexpr const char* too_few_sensors = "too-few-sensors";
inline constexpr const char* map_fleet_too_small = "map-fleet-too-small";
inline constexpr const char* idle_map_route = "idle-map-route";
inline constexpr const char* sdcc_unserved = "sdcc-unserved";
inline constexpr const char* dpc_peers_disconnected = "dpc-peers-disconnected";
inline constexpr const char* few_dpcs_per_cdc = "few-dpcs-per-cdc";
inline constexpr const char* region_without_dpc = "region-without-dpc";
}  // namespace vcode

/// All (sdcc, dpc) pairs that may talk directly: identical position, or
/// closer than delta (strict; equality does not collapse).
inline std::vector<std::pair<SdccId, DpcId>> collapse_pairs(const Topology& topo) {
  std::vector<std::pair<SdccId, DpcId>> pairs;
  for (const auto& s : topo.sdccs) {
    for (const auto& d : topo.dpcs) {
      if (s.region != d.region) continue;
      const double dist = distance(s.position, d.position);
      if (s.position == d.position || dist < topo.delta) {
        pairs.emplace_back(s.id, d.id);
      }
    }
  }
  return pairs;
}

/// Marks every collapsed center with its direct partner: the nearest
/// in-range processing center, ties broken by lower id. Idempotent.
inline void apply_collapse(Topology& topo) {
  for (auto& s : topo.sdccs) s.collapsed_with.reset();
  for (const auto& [sid, did] : collapse_pairs(topo)) {
    auto* s = const_cast<Sdcc*>(topo.find_sdcc(sid));
    const Dpc* d = topo.find_dpc(did);
    if (!s->collapsed_with) {
      s->collapsed_with = did;
      continue;
    }
    const Dpc* cur = topo.find_dpc(*s->collapsed_with);
    const double dist_new = distance(s->position, d->position);
    const double dist_cur = distance(s->position, cur->position);
    if (dist_new < dist_cur || (dist_new == dist_cur && did < *s->collapsed_with)) {
      s->collapsed_with = did;
    }
  }
}

namespace detail {

/// True when the patrol loop passes within contact range of the point.
inline bool route_visits(const MapUnit& map, const GeoPoint& p) {
  if (map.route.empty()) return false;
  return RouteLoop(map.route).distance_to(p) <= map.contact_range;
}

inline bool peers_connected(const Topology& topo, RegionId region) {
  std::vector<DpcId> ids;
  for (const auto& d : topo.dpcs) if (d.region == region) ids.push_back(d.id);
  if (ids.size() <= 1) return true;
  std::set<DpcId> seen{ids.front()};
  std::vector<DpcId> frontier{ids.front()};
  while (!frontier.empty()) {
    const Dpc* d = topo.find_dpc(frontier.back());
    frontier.pop_back();
    for (DpcId p : d->peers) {
      if (topo.find_dpc(p) && !seen.count(p)) {
        seen.insert(p);
        frontier.push_back(p);
      }
    }
  }
  return seen.size() == ids.size();
}

}  // namespace detail

/// Structural checks against the framework's necessary conditions. Pure:
/// the same topology always yields the identical report, and validation
/// always runs to completion instead of stopping at the first finding.
inline ValidationReport validate_topology(const Topology& topo) {
  ValidationReport report;
  const auto pairs = collapse_pairs(topo);
  std::set<SdccId> collapsed_sdccs;
  std::set<DpcId> collapsed_dpcs;
  for (const auto& [sid, did] : pairs) {
    collapsed_sdccs.insert(sid);
    collapsed_dpcs.insert(did);
  }

  // Per-center threshold feasibility and sensor-count sanity.
  for (const auto& s : topo.sdccs) {
    const int live = topo.live_assigned_sensors(s.id);
    if (s.tau > live) {
      std::ostringstream msg;
      msg << "sdcc " << s.id << " threshold tau=" << s.tau << " exceeds its " << live
          << " live assigned sensors; it can never trigger";
      report.issues.push_back({Severity::error, vcode::tau_exceeds_sensors, s.region, msg.str()});
    }
    if (live < 2) {
      std::ostringstream msg;
      msg << "sdcc " << s.id << " has only " << live
          << " live assigned sensor(s); thresholding needs a much larger population";
      report.issues.push_back({Severity::warning, vcode::too_few_sensors, s.region, msg.str()});
    }
  }

  // Per-region fleet coverage. Only collection centers without a direct
  // link need mules; spare processing centers demand nothing by themselves.
  for (const auto& region : topo.regions) {
    int mule_count = 0, open_sdccs = 0;
    for (const auto& m : topo.maps) if (m.region == region.id) ++mule_count;
    for (const auto& s : topo.sdccs) {
      if (s.region == region.id && !collapsed_sdccs.count(s.id)) ++open_sdccs;
    }
    if (mule_count < open_sdccs) {
      std::ostringstream msg;
      msg << "fleet of " << mule_count << " mobile access point(s) cannot cover " << open_sdccs
          << " collection center(s) needing service";
      report.issues.push_back({Severity::error, vcode::map_fleet_too_small, region.id, msg.str()});
    }
    bool any_sdcc = false, any_dpc = false;
    for (const auto& s : topo.sdccs) if (s.region == region.id) any_sdcc = true;
    for (const auto& d : topo.dpcs) if (d.region == region.id) any_dpc = true;
    if (any_sdcc && !any_dpc) {
      report.issues.push_back({Severity::error, vcode::region_without_dpc, region.id,
                               "collection centers have no processing center to deliver to"});
    }
    if (!detail::peers_connected(topo, region.id)) {
      report.issues.push_back({Severity::error, vcode::dpc_peers_disconnected, region.id,
                               "processing centers do not form a connected peer network"});
    }
  }

  // Routes that touch neither kind of endpoint serve nothing.
  for (const auto& m : topo.maps) {
    bool visits_sdcc = false, visits_dpc = false;
    for (const auto& s : topo.sdccs) {
      if (s.region == m.region && detail::route_visits(m, s.position)) visits_sdcc = true;
    }
    for (const auto& d : topo.dpcs) {
      if (d.region == m.region && detail::route_visits(m, d.position)) visits_dpc = true;
    }
    if (!visits_sdcc && !visits_dpc) {
      std::ostringstream msg;
      msg << "map " << m.id << " route passes within contact range of no collection or "
          << "processing center";
      report.issues.push_back({Severity::error, vcode::idle_map_route, m.region, msg.str()});
    }
  }

  // Every non-collapsed collection center needs at least one mule whose
  // route reaches both it and some processing center.
  for (const auto& s : topo.sdccs) {
    if (collapsed_sdccs.count(s.id)) continue;
    bool served = false;
    for (const auto& m : topo.maps) {
      if (m.region != s.region || !detail::route_visits(m, s.position)) continue;
      for (const auto& d : topo.dpcs) {
        if (d.region == m.region && detail::route_visits(m, d.position)) {
          served = true;
          break;
        }
      }
      if (served) break;
    }
    if (!served) {
      std::ostringstream msg;
      msg << "sdcc " << s.id << " is not within delta of a processing center and no map route "
          << "links it to one";
      report.issues.push_back({Severity::error, vcode::sdcc_unserved, s.region, msg.str()});
    }
  }

  // Processing capacity should greatly exceed the central-center count.
  const int total_dpcs = static_cast<int>(topo.dpcs.size());
  if (total_dpcs <= topo.cdc_dcc.cdc_count) {
    std::ostringstream msg;
    msg << "total of " << total_dpcs << " processing center(s) does not greatly exceed "
        << topo.cdc_dcc.cdc_count << " central center(s); parallel processing headroom is thin";
    report.issues.push_back({Severity::warning, vcode::few_dpcs_per_cdc, 0, msg.str()});
  }

  return report;
}

}  // namespace dmsim
