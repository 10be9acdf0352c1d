#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmsim/engine.hpp"
#include "dmsim/scenario.hpp"

namespace dmsim {

struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameters a sweep may vary. Everything else in the scenario is held
/// fixed so runs differ in exactly one dimension.
inline const std::vector<std::string>& sweepable_params() {
  static const std::vector<std::string> kParams = {"tau", "map_count", "link_standard",
                                                   "match_threshold", "dpc_count"};
  return kParams;
}

/// Returns a copy of the scenario with one parameter overridden, then
/// re-derives clustering and direct-link collapses on the new topology.
inline Scenario apply_param(const Scenario& base, const std::string& param,
                            const std::string& value) {
  Scenario sc = base;
  auto as_int = [&](long long lo) {
    std::size_t idx = 0;
    long long v = 0;
    try {
      v = std::stoll(value, &idx);
    } catch (const std::exception&) {
      throw SweepError("sweep value '" + value + "' is not an integer");
    }
    if (idx != value.size()) throw SweepError("sweep value '" + value + "' is not an integer");
    if (v < lo) throw SweepError("sweep value " + value + " below minimum " + std::to_string(lo));
    return v;
  };

  if (param == "tau") {
    const int tau = static_cast<int>(as_int(1));
    for (auto& s : sc.topology.sdccs) s.tau = tau;
  } else if (param == "map_count") {
    const auto want = static_cast<std::size_t>(as_int(0));
    auto& maps = sc.topology.maps;
    std::sort(maps.begin(), maps.end(),
              [](const MapUnit& a, const MapUnit& b) { return a.id < b.id; });
    if (want <= maps.size()) {
      maps.resize(want);
    } else {
      if (maps.empty()) throw SweepError("cannot grow a fleet of zero mobile access points");
      MapId next_id = maps.back().id + 1;
      std::size_t source = 0;
      while (maps.size() < want) {
        MapUnit clone = maps[source % maps.size()];
        clone.id = next_id++;
        maps.push_back(std::move(clone));
        ++source;
      }
    }
  } else if (param == "link_standard") {
    WifiStandard std_out;
    if (!parse_wifi_standard(value, std_out)) {
      throw SweepError("unknown wireless standard: " + value);
    }
    for (auto& r : sc.topology.regions) r.link = make_link_spec(std_out);
  } else if (param == "match_threshold") {
    double v = 0.0;
    try {
      std::size_t idx = 0;
      v = std::stod(value, &idx);
      if (idx != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw SweepError("sweep value '" + value + "' is not a number");
    }
    if (v < 0.0 || v > 1.0) throw SweepError("match_threshold must be in [0, 1]");
    sc.topology.cdc_dcc.match_threshold = v;
  } else if (param == "dpc_count") {
    const auto want = static_cast<std::size_t>(as_int(1));
    auto& dpcs = sc.topology.dpcs;
    std::sort(dpcs.begin(), dpcs.end(), [](const Dpc& a, const Dpc& b) { return a.id < b.id; });
    if (want > dpcs.size()) {
      throw SweepError("dpc_count " + value + " exceeds the " + std::to_string(dpcs.size()) +
                       " centers the scenario defines");
    }
    dpcs.resize(want);
    std::vector<DpcId> alive;
    for (const auto& d : dpcs) alive.push_back(d.id);
    for (auto& d : dpcs) {
      d.peers.erase(std::remove_if(d.peers.begin(), d.peers.end(),
                                   [&](DpcId p) {
                                     return std::find(alive.begin(), alive.end(), p) ==
                                            alive.end();
                                   }),
                    d.peers.end());
    }
  } else {
    throw SweepError("unknown sweep parameter: " + param);
  }

  assign_clusters(sc.topology.sensors, sc.topology.sdccs);
  apply_collapse(sc.topology);
  return sc;
}

struct SweepPoint {
  std::string param;
  std::string value;
  int rep = 0;
  SimulationResult result;
};

/// Runs reps × values simulations. Replicate r uses seed base_seed + r for
/// every value, so points along a value axis share their random draws and
/// compare pairwise.
inline std::vector<SweepPoint> run_sweep(const Scenario& base, const std::string& param,
                                         const std::vector<std::string>& values, int reps,
                                         std::uint64_t base_seed, double horizon) {
  if (reps < 1) throw SweepError("reps must be at least 1");
  if (values.empty()) throw SweepError("sweep needs at least one value");
  std::vector<SweepPoint> points;
  for (const auto& value : values) {
    const Scenario sc = apply_param(base, param, value);
    for (int rep = 0; rep < reps; ++rep) {
      SweepPoint point{param, value, rep, run_simulation(sc, base_seed + rep, horizon)};
      point.result.info.param = param;
      point.result.info.value = value;
      point.result.info.rep = rep;
      points.push_back(std::move(point));
    }
  }
  return points;
}

}  // namespace dmsim
