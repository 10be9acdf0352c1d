#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dmsim/entities.hpp"
#include "dmsim/mule.hpp"

namespace dmsim {

/// Feature layout shared by processed reports and reference records:
/// [severity, coverage, agreement, distinct sensor count].
constexpr std::size_t kFeatureCount = 4;

struct ProcessedReport {
  std::uint64_t id = 0;
  DpcId dpc_id = 0;
  RegionId region = 0;
  int area_id = 0;  // originating collection center
  HazardClass hazard_class = HazardClass::flood;
  std::array<double, kFeatureCount> features{};
  double confidence = 0.0;
  int reprocess_count = 0;
  double first_processed_time = 0.0;
  std::vector<std::uint64_t> bundle_ids;
  std::set<int> hazard_ids;  // ground truth carried for the trace, never used by logic
  int truthful_count = 0;
  int false_count = 0;

  std::vector<double> feature_vector() const {
    return {features.begin(), features.end()};
  }
};

enum class Verdict { accepted, low_confidence };

inline std::string to_string(Verdict v) {
  return v == Verdict::accepted ? "accepted" : "low_confidence";
}

/// Fraction of the cluster that reported, clamped to [0, 1].
inline double coverage_score(int distinct, int live) {
  if (live <= 0) return distinct > 0 ? 1.0 : 0.0;
  return std::min(1.0, static_cast<double>(distinct) / static_cast<double>(live));
}

/// Scale-free spread measure: 1 when all readings agree exactly, trending
/// to 0 as the value range dominates the mean magnitude.
inline double agreement_score(const std::vector<double>& values) {
  if (values.size() < 2) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (range == 0.0) return 1.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return 1.0 - range / (std::abs(mean) + range);
}

/// Builds a report from everything a bundle carries. Confidence is the
/// product of cluster coverage and reading agreement.
inline ProcessedReport build_report(const DataBundle& bundle, const Dpc& dpc, RegionId region,
                                    double now, std::uint64_t report_id) {
  if (bundle.batches.empty()) throw std::logic_error("empty bundle reached processing");
  ProcessedReport r;
  r.id = report_id;
  r.dpc_id = dpc.id;
  r.region = region;
  r.area_id = bundle.batches.front().sdcc_id;
  r.hazard_class = bundle.batches.front().hazard_class_hint;
  r.first_processed_time = now;
  r.bundle_ids.push_back(bundle.id);

  std::set<SensorId> distinct;
  std::vector<double> values;
  int live = 0;
  for (const auto& batch : bundle.batches) {
    distinct.insert(batch.contributing_sensors.begin(), batch.contributing_sensors.end());
    live = std::max(live, batch.live_sensors);
    for (const auto& reading : batch.readings) {
      values.push_back(reading.value);
      if (reading.truthful) {
        ++r.truthful_count;
        r.hazard_ids.insert(reading.hazard_id);
      } else {
        ++r.false_count;
      }
    }
  }
  const double severity =
      values.empty() ? 0.0
                     : std::accumulate(values.begin(), values.end(), 0.0) /
                           static_cast<double>(values.size());
  const double cov = coverage_score(static_cast<int>(distinct.size()), live);
  const double agr = agreement_score(values);
  r.features = {severity, cov, agr, static_cast<double>(distinct.size())};
  r.confidence = cov * agr;
  return r;
}

inline bool class_conflict(const ProcessedReport& a, const ProcessedReport& b) {
  return a.hazard_class != b.hazard_class;
}

/// Folds a same-area peer replica into a local report. Confidence never
/// decreases: the merge keeps the better of the old value and the value
/// recomputed from the combined features.
inline ProcessedReport merge_reports(const ProcessedReport& local, const ProcessedReport& peer) {
  if (class_conflict(local, peer)) throw std::logic_error("merge across hazard classes");
  ProcessedReport merged = local;
  const double w_local = local.features[3];
  const double w_peer = peer.features[3];
  const double w_total = w_local + w_peer;
  if (w_total > 0.0) {
    merged.features[0] =
        (local.features[0] * w_local + peer.features[0] * w_peer) / w_total;
  }
  merged.features[1] = std::max(local.features[1], peer.features[1]);
  merged.features[2] = std::max(local.features[2], peer.features[2]);
  merged.features[3] = std::max(local.features[3], peer.features[3]);
  merged.confidence = std::max(local.confidence, merged.features[1] * merged.features[2]);
  for (auto b : peer.bundle_ids) {
    if (std::find(merged.bundle_ids.begin(), merged.bundle_ids.end(), b) ==
        merged.bundle_ids.end()) {
      merged.bundle_ids.push_back(b);
    }
  }
  merged.hazard_ids.insert(peer.hazard_ids.begin(), peer.hazard_ids.end());
  merged.truthful_count = std::max(local.truthful_count, peer.truthful_count);
  merged.false_count = std::max(local.false_count, peer.false_count);
  return merged;
}

/// Deals delivered bundles to a region's processing centers in fixed
/// rotation. The counter persists across calls, so a burst of B bundles
/// lands ceil(B/k) deep on each of k centers.
class RoundRobinDispatcher {
 public:
  explicit RoundRobinDispatcher(const Topology& topo) {
    for (const auto& d : topo.dpcs) rings_[d.region].push_back(d.id);
    for (auto& [region, ids] : rings_) std::sort(ids.begin(), ids.end());
  }

  bool has_region(RegionId region) const { return rings_.count(region) > 0; }

  DpcId next(RegionId region) {
    auto it = rings_.find(region);
    if (it == rings_.end() || it->second.empty()) {
      throw std::logic_error("dispatch into region without processing centers");
    }
    auto& cursor = cursors_[region];
    const DpcId id = it->second[cursor % it->second.size()];
    ++cursor;
    return id;
  }

 private:
  std::map<RegionId, std::vector<DpcId>> rings_;
  std::map<RegionId, std::size_t> cursors_;
};

struct DpcJob {
  std::uint64_t bundle_id = 0;
  std::optional<ProcessedReport> draft;  // set when the job is a reprocess
};

struct ReplicaEntry {
  ProcessedReport report;
  double received = 0.0;
};

/// Run-time state of one processing center: a FIFO work queue served one
/// job at a time, plus the replicas peers have shared.
struct DpcState {
  const Dpc* config = nullptr;
  bool busy = false;
  std::deque<DpcJob> queue;
  std::vector<ReplicaEntry> replicas;

  /// Most recent same-area, same-class replica within the lookback
  /// horizon, ignoring replicas that originated from this center.
  std::optional<ProcessedReport> find_replica(const ProcessedReport& local, double now,
                                              double lookback) const {
    std::optional<ProcessedReport> best;
    double best_time = -1.0;
    for (const auto& entry : replicas) {
      if (entry.report.area_id != local.area_id) continue;
      if (entry.report.dpc_id == local.dpc_id) continue;
      if (class_conflict(entry.report, local)) continue;
      if (now - entry.received > lookback) continue;
      if (entry.received > best_time) {
        best_time = entry.received;
        best = entry.report;
      }
    }
    return best;
  }

  /// True when a same-area replica exists but is unusable because the
  /// hazard class disagrees. Surfaced in the trace, never merged.
  bool has_conflicting_replica(const ProcessedReport& local, double now, double lookback) const {
    for (const auto& entry : replicas) {
      if (entry.report.area_id != local.area_id) continue;
      if (entry.report.dpc_id == local.dpc_id) continue;
      if (now - entry.received > lookback) continue;
      if (class_conflict(entry.report, local)) return true;
    }
    return false;
  }
};

}  // namespace dmsim
