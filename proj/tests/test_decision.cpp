#include <catch2/catch_amalgamated.hpp>

#include "dmsim/decision.hpp"

using namespace dmsim;

TEST_CASE("feature similarity basics") {
  CHECK(feature_similarity({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(feature_similarity({}, {}) == 1.0);  // nothing to disagree about
  CHECK(feature_similarity({0, 0}, {0, 0}) == 1.0);
  // Opposite vectors are maximally dissimilar.
  CHECK(feature_similarity({1, 0}, {-1, 0}) == Catch::Approx(0.0));
  // Orthogonal unit vectors: 1 - sqrt(2)/2.
  CHECK(feature_similarity({1, 0}, {0, 1}) == Catch::Approx(1.0 - std::sqrt(2.0) / 2.0));
}

TEST_CASE("feature similarity is symmetric and pads short vectors") {
  const std::vector<double> u{3, 4};
  const std::vector<double> v{3};
  CHECK(feature_similarity(u, v) == feature_similarity(v, u));
  CHECK(feature_similarity(u, v) == feature_similarity(u, {3, 0}));
  for (double x = -5; x <= 5; x += 1.0) {
    const double s = feature_similarity({x, 1}, {2, -1});
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("similarity shrinks with distance") {
  const std::vector<double> base{5, 5, 5, 5};
  double prev = 1.0;
  for (double shift = 0.0; shift <= 4.0; shift += 1.0) {
    const double s = feature_similarity(base, {5 + shift, 5, 5, 5});
    CHECK(s <= prev);
    prev = s;
  }
}

namespace {

ProcessedReport report_for(int area, HazardClass cls, std::vector<double> features) {
  ProcessedReport r;
  r.area_id = area;
  r.hazard_class = cls;
  for (std::size_t i = 0; i < features.size() && i < kFeatureCount; ++i) {
    r.features[i] = features[i];
  }
  return r;
}

DisasterRecord record_for(int area, HazardClass cls, std::vector<double> features,
                          std::string outcome) {
  DisasterRecord rec;
  rec.area_id = area;
  rec.hazard_class = cls;
  rec.feature_vector = std::move(features);
  rec.outcome = std::move(outcome);
  return rec;
}

}  // namespace

TEST_CASE("matching is gated on area and class before features") {
  std::vector<DisasterRecord> db = {
      record_for(10, HazardClass::flood, {1, 1, 1, 1}, "other class"),
      record_for(11, HazardClass::earthquake, {1, 1, 1, 1}, "other area"),
  };
  const auto report = report_for(10, HazardClass::earthquake, {1, 1, 1, 1});
  const auto res = match_reference(db, report, 0.0);
  CHECK_FALSE(res.matched);
  CHECK_FALSE(res.record_index.has_value());
  CHECK(res.outcome.empty());
}

TEST_CASE("best record wins and the threshold is inclusive") {
  std::vector<DisasterRecord> db = {
      record_for(10, HazardClass::flood, {9, 9, 9, 9}, "far"),
      record_for(10, HazardClass::flood, {1, 1, 1, 1}, "exact"),
  };
  const auto report = report_for(10, HazardClass::flood, {1, 1, 1, 1});
  auto res = match_reference(db, report, 1.0);
  CHECK(res.matched);  // similarity 1.0 meets threshold 1.0 exactly
  CHECK(res.record_index == 1);
  CHECK(res.outcome == "exact");
  CHECK(res.similarity == 1.0);
}

TEST_CASE("below threshold reports similarity but no outcome") {
  std::vector<DisasterRecord> db = {record_for(10, HazardClass::flood, {100, 0, 0, 0}, "way off")};
  const auto report = report_for(10, HazardClass::flood, {1, 0, 0, 0});
  const auto res = match_reference(db, report, 0.9);
  CHECK_FALSE(res.matched);
  CHECK(res.record_index == 0);  // best candidate is still identified
  CHECK(res.similarity < 0.9);
  CHECK(res.outcome.empty());
}

TEST_CASE("similarity ties keep the first record") {
  std::vector<DisasterRecord> db = {
      record_for(10, HazardClass::flood, {2, 2, 2, 2}, "first"),
      record_for(10, HazardClass::flood, {2, 2, 2, 2}, "second"),
  };
  const auto report = report_for(10, HazardClass::flood, {2, 2, 2, 2});
  const auto res = match_reference(db, report, 0.5);
  CHECK(res.record_index == 0);
  CHECK(res.outcome == "first");
}

TEST_CASE("observed reports become reference records") {
  auto report = report_for(10, HazardClass::tsunami, {3, 0.9, 0.8, 4});
  const auto rec = record_from_report(report, 1234.5);
  CHECK(rec.area_id == 10);
  CHECK(rec.hazard_class == HazardClass::tsunami);
  CHECK(rec.feature_vector == report.feature_vector());
  CHECK(rec.occurred_time == 1234.5);
  CHECK(rec.outcome == "observed");
}

TEST_CASE("sms plan batches subscribers") {
  SmsProvider p;
  p.subscriber_count = 25'000;
  p.per_message_latency = 2.0;
  const auto plan = plan_sms(100.0, p, 10'000);
  CHECK(plan.batches == 3);  // ceil(25000/10000)
  CHECK(plan.first_time == 102.0);
  CHECK(plan.done_time == 106.0);
}

TEST_CASE("sms plan exact multiple and tiny audiences") {
  SmsProvider p;
  p.subscriber_count = 20'000;
  p.per_message_latency = 1.0;
  CHECK(plan_sms(0.0, p, 10'000).batches == 2);
  CHECK(plan_sms(0.0, p, 10'000).done_time == 2.0);
  p.subscriber_count = 1;
  const auto one = plan_sms(50.0, p, 10'000);
  CHECK(one.batches == 1);
  CHECK(one.first_time == 51.0);
  CHECK(one.done_time == 51.0);
}

TEST_CASE("sms plan with no subscribers completes at issue time") {
  SmsProvider p;
  p.subscriber_count = 0;
  const auto plan = plan_sms(33.0, p, 10'000);
  CHECK(plan.batches == 0);
  CHECK_FALSE(plan.first_time.has_value());
  CHECK(plan.done_time == 33.0);
}

TEST_CASE("default bypass classes are the fast onset hazards") {
  CdcDcc cdc;
  for (auto cls : {HazardClass::tornado, HazardClass::flash_flood, HazardClass::earthquake,
                   HazardClass::landslide, HazardClass::building_collapse}) {
    CHECK(is_bypass_class(cdc, cls));
  }
  for (auto cls : {HazardClass::flood, HazardClass::tsunami, HazardClass::cyclone}) {
    CHECK_FALSE(is_bypass_class(cdc, cls));
  }
  cdc.bypass_classes = {HazardClass::flood};
  CHECK(is_bypass_class(cdc, HazardClass::flood));
  CHECK_FALSE(is_bypass_class(cdc, HazardClass::earthquake));
}

TEST_CASE("dispatch departments are fixed") {
  CHECK(response_departments() == std::vector<std::string>{"police", "fire", "medical"});
}
