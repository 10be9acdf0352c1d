#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace dmsim {

/// Outcome measures for one run. Everything here is recomputed from the
/// trace alone, so an archived trace.jsonl fully determines its metrics.
struct Metrics {
  int triggers = 0;
  int bundles_created = 0;
  int bundles_delivered = 0;  // distinct bundles that reached processing
  int bundles_deferred = 0;   // distinct bundles refused at least once
  double delivery_ratio = 0.0;
  std::vector<double> detection_latencies;
  std::vector<double> warning_latencies;
  double detection_latency_mean = std::numeric_limits<double>::quiet_NaN();
  double warning_latency_mean = std::numeric_limits<double>::quiet_NaN();
  int warnings_issued = 0;
  int false_warnings = 0;  // warnings with no truthful reading behind them
  int missed_events = 0;   // scripted hazards never seen in any trigger
  double map_utilization = 0.0;
  double dpc_makespan = 0.0;
  int channel_blocks = 0;
  int bypass_dispatches = 0;
};

namespace metrics_detail {

inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace metrics_detail

/// Folds a JSON Lines trace into Metrics. Unknown kinds are ignored so the
/// reader stays compatible with traces that add event kinds later.
inline Metrics collect_metrics(const std::vector<std::string>& lines) {
  using nlohmann::json;
  Metrics m;

  std::map<int, double> onsets;
  std::map<int, double> first_trigger;
  std::map<int, double> first_sms;
  std::map<std::uint64_t, std::vector<int>> warning_hazards;
  std::set<std::uint64_t> delivered, deferred;
  std::map<std::uint64_t, double> session_open;
  double session_seconds = 0.0;
  double horizon = 0.0;
  int map_count = 0;
  bool have_first_delivery = false, have_last_verdict = false;
  double first_delivery = 0.0, last_verdict = 0.0;

  for (const auto& text : lines) {
    const json ev = json::parse(text);
    const std::string kind = ev.at("kind").get<std::string>();
    const double t = ev.at("t").get<double>();
    if (kind == "hazard_onset") {
      onsets[ev.at("hazard").get<int>()] = t;
    } else if (kind == "trigger") {
      ++m.triggers;
      for (const auto& hid : ev.at("hazard_ids")) {
        const int h = hid.get<int>();
        if (!first_trigger.count(h)) first_trigger[h] = t;
      }
    } else if (kind == "bundle_created") {
      ++m.bundles_created;
    } else if (kind == "delivery") {
      delivered.insert(ev.at("bundle").get<std::uint64_t>());
      if (!have_first_delivery || t < first_delivery) first_delivery = t;
      have_first_delivery = true;
    } else if (kind == "deferred") {
      deferred.insert(ev.at("bundle").get<std::uint64_t>());
    } else if (kind == "session_open") {
      session_open[ev.at("session").get<std::uint64_t>()] = t;
    } else if (kind == "session_close") {
      const auto id = ev.at("session").get<std::uint64_t>();
      auto it = session_open.find(id);
      if (it != session_open.end()) {
        session_seconds += t - it->second;
        session_open.erase(it);
      }
    } else if (kind == "session_blocked") {
      ++m.channel_blocks;
    } else if (kind == "verdict") {
      if (!have_last_verdict || t > last_verdict) last_verdict = t;
      have_last_verdict = true;
    } else if (kind == "warning") {
      ++m.warnings_issued;
      std::vector<int> hs;
      for (const auto& hid : ev.at("hazard_ids")) hs.push_back(hid.get<int>());
      warning_hazards[ev.at("warning").get<std::uint64_t>()] = hs;
      if (ev.at("truthful_count").get<int>() == 0) ++m.false_warnings;
    } else if (kind == "sms") {
      if (ev.at("phase").get<std::string>() == "first") {
        auto it = warning_hazards.find(ev.at("warning").get<std::uint64_t>());
        if (it != warning_hazards.end()) {
          for (int h : it->second) {
            if (!first_sms.count(h)) first_sms[h] = t;
          }
        }
      }
    } else if (kind == "dispatch") {
      if (ev.at("bypass").get<bool>()) ++m.bypass_dispatches;
    } else if (kind == "run_end") {
      horizon = t;
      map_count = ev.at("maps").get<int>();
    }
  }

  // Sessions still open when the run ended count up to the horizon.
  for (const auto& [id, opened] : session_open) session_seconds += horizon - opened;

  m.bundles_delivered = static_cast<int>(delivered.size());
  m.bundles_deferred = static_cast<int>(deferred.size());
  m.delivery_ratio = m.bundles_created > 0
                         ? static_cast<double>(m.bundles_delivered) / m.bundles_created
                         : 0.0;
  for (const auto& [h, onset] : onsets) {
    auto it = first_trigger.find(h);
    if (it == first_trigger.end()) {
      ++m.missed_events;
    } else {
      m.detection_latencies.push_back(it->second - onset);
    }
    auto st = first_sms.find(h);
    if (st != first_sms.end()) m.warning_latencies.push_back(st->second - onset);
  }
  m.detection_latency_mean = metrics_detail::mean_of(m.detection_latencies);
  m.warning_latency_mean = metrics_detail::mean_of(m.warning_latencies);
  if (map_count > 0 && horizon > 0.0) {
    m.map_utilization = session_seconds / (map_count * horizon);
  }
  if (have_first_delivery && have_last_verdict) {
    m.dpc_makespan = last_verdict - first_delivery;
  }
  return m;
}

/// Identity of one run for the metrics table. `param`/`value` are empty
/// for plain runs and carry the swept dimension during sweeps.
struct RunInfo {
  std::string scenario;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::string param;
  std::string value;
  int rep = 0;
};

inline std::string metrics_csv_header() {
  return "scenario,seed,horizon,param,value,rep,triggers,bundles_created,bundles_delivered,"
         "bundles_deferred,delivery_ratio,detection_latency_mean,warning_latency_mean,"
         "warnings_issued,false_warnings,missed_events,map_utilization,dpc_makespan,"
         "channel_blocks,bypass_dispatches";
}

namespace metrics_detail {

inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

}  // namespace metrics_detail

inline std::string metrics_csv_row(const RunInfo& info, const Metrics& m) {
  using metrics_detail::num;
  std::ostringstream os;
  os << info.scenario << ',' << info.seed << ',' << num(info.horizon) << ',' << info.param << ','
     << info.value << ',' << info.rep << ',' << m.triggers << ',' << m.bundles_created << ','
     << m.bundles_delivered << ',' << m.bundles_deferred << ',' << num(m.delivery_ratio) << ','
     << num(m.detection_latency_mean) << ',' << num(m.warning_latency_mean) << ','
     << m.warnings_issued << ',' << m.false_warnings << ',' << m.missed_events << ','
     << num(m.map_utilization) << ',' << num(m.dpc_makespan) << ',' << m.channel_blocks << ','
     << m.bypass_dispatches;
  return os.str();
}

}  // namespace dmsim
