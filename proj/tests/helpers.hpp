// Small builders shared by the test files. Entities come out with the
// cheapest valid defaults; individual tests override what they probe.
#pragma once

#include <string>
#include <vector>

#include "dmsim/dmsim.hpp"

namespace testutil {

using namespace dmsim;

inline Region make_region(RegionId id, WifiStandard std_ = WifiStandard::dot11b) {
  Region r;
  r.id = id;
  r.link = make_link_spec(std_);
  return r;
}

inline SensorNode make_sensor(SensorId id, RegionId region, double x, double y,
                              Modality m = Modality::seismic) {
  SensorNode s;
  s.id = id;
  s.region = region;
  s.position = {x, y};
  s.modality = m;
  return s;
}

inline Sdcc make_sdcc(SdccId id, RegionId region, double x, double y, int tau = 1,
                      double window = 60.0) {
  Sdcc s;
  s.id = id;
  s.region = region;
  s.position = {x, y};
  s.tau = tau;
  s.window = window;
  return s;
}

inline Dpc make_dpc(DpcId id, RegionId region, double x, double y) {
  Dpc d;
  d.id = id;
  d.region = region;
  d.position = {x, y};
  return d;
}

inline MapUnit make_map(MapId id, RegionId region, std::vector<GeoPoint> route,
                        double speed = 10.0, double range = 100.0) {
  MapUnit m;
  m.id = id;
  m.region = region;
  m.route = std::move(route);
  m.speed = speed;
  m.contact_range = range;
  return m;
}

/// Parses, clusters and collapses in one go, like the file loader does.
inline Topology finish(Topology topo) {
  assign_clusters(topo.sensors, topo.sdccs);
  apply_collapse(topo);
  return topo;
}

}  // namespace testutil
