#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace dmsim;
using testutil::make_dpc;
using testutil::make_region;
using testutil::make_sdcc;
using testutil::make_sensor;

TEST_CASE("sensors attach to the nearest collection center") {
  std::vector<SensorNode> sensors = {make_sensor(1, 1, 10, 0), make_sensor(2, 1, 90, 0),
                                     make_sensor(3, 1, 50, 0)};
  std::vector<Sdcc> sdccs = {make_sdcc(11, 1, 100, 0), make_sdcc(10, 1, 0, 0)};
  const auto assignment = assign_clusters(sensors, sdccs);
  CHECK(assignment.at(1) == 10);
  CHECK(assignment.at(2) == 11);
  CHECK(assignment.at(3) == 10);  // equidistant tie goes to the lower id
  CHECK(sensors[0].assigned_sdcc == 10);
  CHECK(sensors[1].assigned_sdcc == 11);
}

TEST_CASE("clustering with no centers fails") {
  std::vector<SensorNode> sensors = {make_sensor(1, 1, 0, 0)};
  std::vector<Sdcc> none;
  CHECK_THROWS_AS(assign_clusters(sensors, none), ClusterError);
}

TEST_CASE("liveness combines static failure and scripted failure time") {
  SensorNode s = make_sensor(1, 1, 0, 0);
  CHECK(sensor_alive(s, 100.0));
  s.fail_at = 50.0;
  CHECK(sensor_alive(s, 49.9));
  CHECK_FALSE(sensor_alive(s, 50.0));  // failure instant is already dead
  s.fail_at = std::numeric_limits<double>::infinity();
  s.failed = true;
  CHECK_FALSE(sensor_alive(s, 0.0));
}

TEST_CASE("truthful readings report the strongest covering hazard") {
  SensorNode s = make_sensor(1, 1, 0, 0, Modality::water_level);
  HazardEvent weak;
  weak.id = 1;
  weak.region = 1;
  weak.magnitude = 2.0;
  weak.footprint = {1};
  HazardEvent strong = weak;
  strong.id = 2;
  strong.magnitude = 5.0;
  HazardEvent elsewhere = strong;
  elsewhere.id = 3;
  elsewhere.magnitude = 50.0;
  elsewhere.footprint = {99};  // this sensor is outside the footprint

  EntityRng rng(1, StreamKind::sensor_false_report, 1);
  const auto out = generate_sensor_readings(s, {weak, strong, elsewhere}, 30.0, rng, 100.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].truthful);
  CHECK(out[0].hazard_id == 2);
  CHECK(out[0].value == 5.0);
  CHECK(out[0].parameter == Modality::water_level);
  CHECK(out[0].timestamp == 30.0);
}

TEST_CASE("equal magnitudes resolve to the lower hazard id") {
  SensorNode s = make_sensor(1, 1, 0, 0);
  HazardEvent a, b;
  a.id = 4;
  b.id = 2;
  a.region = b.region = 1;
  a.magnitude = b.magnitude = 3.0;
  a.footprint = b.footprint = {1};
  EntityRng rng(1, StreamKind::sensor_false_report, 1);
  const auto out = generate_sensor_readings(s, {a, b}, 0.0, rng, 100.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].hazard_id == 2);
}

TEST_CASE("expired and future hazards produce nothing") {
  SensorNode s = make_sensor(1, 1, 0, 0);
  HazardEvent h;
  h.id = 1;
  h.region = 1;
  h.onset_time = 100.0;
  h.duration = 50.0;
  h.footprint = {1};
  EntityRng rng(1, StreamKind::sensor_false_report, 1);
  CHECK(generate_sensor_readings(s, {h}, 99.0, rng, 100.0).empty());
  CHECK(generate_sensor_readings(s, {h}, 150.0, rng, 100.0).empty());
  CHECK(generate_sensor_readings(s, {h}, 120.0, rng, 100.0).size() == 1);
}

TEST_CASE("false reports ride the per sensor stream") {
  SensorNode s = make_sensor(1, 1, 0, 0);
  s.false_report_prob = 1.0;
  EntityRng rng(1, StreamKind::sensor_false_report, 1);
  const auto out = generate_sensor_readings(s, {}, 10.0, rng, 25.0);
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].truthful);
  CHECK(out[0].hazard_id == 0);
  CHECK(out[0].value >= 0.0);
  CHECK(out[0].value < 25.0);
}

TEST_CASE("dead sensors stay silent") {
  SensorNode s = make_sensor(1, 1, 0, 0);
  s.false_report_prob = 1.0;
  s.fail_at = 5.0;
  HazardEvent h;
  h.id = 1;
  h.region = 1;
  h.footprint = {1};
  EntityRng rng(1, StreamKind::sensor_false_report, 1);
  CHECK(generate_sensor_readings(s, {h}, 6.0, rng, 100.0).empty());
}

namespace {

SensorReading reading_at(SensorId sensor, double t, double value = 1.0) {
  SensorReading r;
  r.sensor_id = sensor;
  r.timestamp = t;
  r.parameter = Modality::seismic;
  r.value = value;
  r.truthful = true;
  r.hazard_id = 1;
  return r;
}

}  // namespace

TEST_CASE("misrouted readings are rejected") {
  const Sdcc cfg = make_sdcc(10, 1, 0, 0, 2, 60.0);
  const Region region = make_region(1);
  SdccState st(cfg, region, 64);
  CHECK_THROWS_AS(st.ingest(reading_at(1, 0.0), 11), RoutingError);
  CHECK_NOTHROW(st.ingest(reading_at(1, 0.0), 10));
}

TEST_CASE("window eviction drops the trailing edge inclusively") {
  const Sdcc cfg = make_sdcc(10, 1, 0, 0, 2, 60.0);
  const Region region = make_region(1);
  SdccState st(cfg, region, 64);
  st.ingest(reading_at(1, 0.0), 10);
  st.ingest(reading_at(2, 30.0), 10);
  CHECK(st.distinct_count() == 2);
  st.evict(60.0);  // cutoff 0: the t=0 reading leaves, window is (t-W, t]
  CHECK(st.distinct_count() == 1);
  CHECK(st.buffered_readings() == 1);
  st.evict(90.0);
  CHECK(st.distinct_count() == 0);
}

TEST_CASE("distinct count tracks sensors not readings") {
  const Sdcc cfg = make_sdcc(10, 1, 0, 0, 3, 60.0);
  const Region region = make_region(1);
  SdccState st(cfg, region, 64);
  st.ingest(reading_at(1, 1.0), 10);
  st.ingest(reading_at(1, 2.0), 10);
  st.ingest(reading_at(1, 3.0), 10);
  CHECK(st.buffered_readings() == 3);
  CHECK(st.distinct_count() == 1);
  CHECK_FALSE(st.evaluate(3.0, 1).has_value());
}

TEST_CASE("trigger fires once per contiguous exceedance") {
  const Sdcc cfg = make_sdcc(10, 1, 0, 0, 2, 60.0);
  const Region region = make_region(1);
  SdccState st(cfg, region, 64);
  st.ingest(reading_at(1, 1.0), 10);
  st.ingest(reading_at(2, 2.0), 10);
  auto first = st.evaluate(2.0, 7);
  REQUIRE(first.has_value());
  CHECK(first->id == 7);
  CHECK(first->contributing_sensors == std::set<SensorId>{1, 2});
  CHECK(first->trigger_time == 2.0);
  CHECK(first->window_used == 60.0);

  // Still above threshold: the latch suppresses a second batch.
  st.ingest(reading_at(3, 10.0), 10);
  CHECK_FALSE(st.evaluate(10.0, 8).has_value());

  // Dropping below tau clears the latch; the next exceedance fires again.
  CHECK_FALSE(st.evaluate(100.0, 9).has_value());  // everything evicted
  st.ingest(reading_at(1, 101.0), 10);
  st.ingest(reading_at(2, 102.0), 10);
  CHECK(st.evaluate(102.0, 9).has_value());
}

TEST_CASE("batch payload counts readings plus baseline snapshot") {
  Sdcc cfg = make_sdcc(10, 1, 0, 0, 1, 60.0);
  cfg.baseline.push_back({10, BaselineCategory::demographic, 500, "census"});
  const Region region = make_region(1);
  SdccState st(cfg, region, 64);
  st.ingest_baseline({10, BaselineCategory::health, 200, "clinics"});
  CHECK_THROWS_AS(st.ingest_baseline({11, BaselineCategory::health, 1, "wrong area"}),
                  RoutingError);
  st.ingest(reading_at(1, 1.0), 10);
  st.ingest(reading_at(1, 2.0), 10);
  const auto batch = st.evaluate(2.0, 1);
  REQUIRE(batch.has_value());
  CHECK(batch->payload_bytes == 2 * 64 + 500 + 200);
  CHECK(batch->readings.size() == 2);
}

TEST_CASE("dominant modality chooses the class hint with regional override") {
  Sdcc cfg = make_sdcc(10, 1, 0, 0, 1, 60.0);
  Region region = make_region(1);
  SdccState st(cfg, region, 64);
  SensorReading w = reading_at(1, 1.0);
  w.parameter = Modality::water_level;
  SensorReading s2 = reading_at(2, 1.5);
  s2.parameter = Modality::seismic;
  st.ingest(w, 10);
  st.ingest(s2, 10);
  SensorReading w2 = reading_at(3, 1.8);
  w2.parameter = Modality::water_level;
  st.ingest(w2, 10);
  auto batch = st.evaluate(2.0, 1);
  REQUIRE(batch.has_value());
  CHECK(batch->hazard_class_hint == HazardClass::flood);  // water_level majority

  Region coast = make_region(1);
  coast.hint_overrides[Modality::water_level] = HazardClass::tsunami;
  SdccState st2(cfg, coast, 64);
  st2.ingest(w, 10);
  st2.ingest(w2, 10);
  auto batch2 = st2.evaluate(2.0, 2);
  REQUIRE(batch2.has_value());
  CHECK(batch2->hazard_class_hint == HazardClass::tsunami);
}

TEST_CASE("modality tie keeps the lower enum value") {
  Sdcc cfg = make_sdcc(10, 1, 0, 0, 1, 60.0);
  Region region = make_region(1);
  SdccState st(cfg, region, 64);
  SensorReading a = reading_at(1, 1.0);
  a.parameter = Modality::acoustic;
  SensorReading b = reading_at(2, 1.2);
  b.parameter = Modality::seismic;
  st.ingest(a, 10);
  st.ingest(b, 10);
  auto batch = st.evaluate(2.0, 1);
  REQUIRE(batch.has_value());
  // acoustic precedes seismic in the modality order, so the 1-1 tie maps
  // through the acoustic hint.
  CHECK(batch->hazard_class_hint == class_hint_for(region, Modality::acoustic));
}
