#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmsim/entities.hpp"
#include "dmsim/processing.hpp"

namespace dmsim {

/// Normalized distance between feature vectors: 1 for identical vectors,
/// 0 when they are maximally far apart for their magnitudes.
inline double feature_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  const std::size_t n = std::max(u.size(), v.size());
  double diff2 = 0.0, nu2 = 0.0, nv2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < u.size() ? u[i] : 0.0;
    const double b = i < v.size() ? v[i] : 0.0;
    diff2 += (a - b) * (a - b);
    nu2 += a * a;
    nv2 += b * b;
  }
  const double denom = std::sqrt(nu2) + std::sqrt(nv2);
  if (denom == 0.0) return 1.0;
  return std::clamp(1.0 - std::sqrt(diff2) / denom, 0.0, 1.0);
}

struct MatchResult {
  bool matched = false;
  double similarity = 0.0;
  std::optional<std::size_t> record_index;
  std::string outcome;  // from the matched record, empty otherwise
};

/// Best match among same-area records of the same hazard class. Records
/// for other areas or classes never match, whatever their features.
inline MatchResult match_reference(const std::vector<DisasterRecord>& db,
                                   const ProcessedReport& report, double threshold) {
  MatchResult result;
  const auto features = report.feature_vector();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& rec = db[i];
    if (rec.area_id != report.area_id) continue;
    if (rec.hazard_class != report.hazard_class) continue;
    const double sim = feature_similarity(features, rec.feature_vector);
    if (sim > result.similarity ||
        (sim == result.similarity && !result.record_index)) {
      result.similarity = sim;
      result.record_index = i;
      result.outcome = rec.outcome;
    }
  }
  result.matched = result.record_index.has_value() && result.similarity >= threshold;
  if (!result.matched) result.outcome.clear();
  return result;
}

/// Every incoming report grows the reference base for later matching.
inline DisasterRecord record_from_report(const ProcessedReport& report, double now) {
  DisasterRecord rec;
  rec.area_id = report.area_id;
  rec.hazard_class = report.hazard_class;
  rec.feature_vector = report.feature_vector();
  rec.occurred_time = now;
  rec.outcome = "observed";
  return rec;
}

struct WarningOrder {
  std::uint64_t id = 0;
  std::uint64_t report_id = 0;
  HazardClass hazard_class = HazardClass::flood;
  int area_id = 0;
  RegionId region = 0;
  double issue_time = 0.0;
  bool matched = false;
  double similarity = 0.0;
};

inline const std::vector<std::string>& response_departments() {
  static const std::vector<std::string> kDepartments = {"police", "fire", "medical"};
  return kDepartments;
}

struct SmsPlan {
  int batches = 0;
  std::optional<double> first_time;  // first batch lands; absent with no subscribers
  double done_time = 0.0;
};

/// Subscribers are notified in provider-side batches, one batch per
/// latency period. An empty subscriber list completes immediately.
inline SmsPlan plan_sms(double issue_time, const SmsProvider& provider, int batch_size) {
  SmsPlan plan;
  if (provider.subscriber_count <= 0 || batch_size <= 0) {
    plan.done_time = issue_time;
    return plan;
  }
  plan.batches = static_cast<int>(
      (static_cast<std::int64_t>(provider.subscriber_count) + batch_size - 1) / batch_size);
  plan.first_time = issue_time + provider.per_message_latency;
  plan.done_time = issue_time + provider.per_message_latency * plan.batches;
  return plan;
}

inline bool is_bypass_class(const CdcDcc& cdc, HazardClass cls) {
  return cdc.bypass_classes.count(cls) > 0;
}

}  // namespace dmsim
