#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace dmsim;
using testutil::make_map;
using testutil::make_region;

TEST_CASE("contact detection includes the boundary") {
  CHECK(detect_contact({0, 0}, {100, 0}, 100.0));
  CHECK_FALSE(detect_contact({0, 0}, {100.0001, 0}, 100.0));
}

TEST_CASE("transfer time follows the nominal rate") {
  // 11 Mbit/s moves 1,375,000 bytes per second.
  CHECK(transfer_seconds(1'375'000, 11.0) == Catch::Approx(1.0));
  CHECK(transfer_seconds(1'375'000, 11.0, 0.5) == Catch::Approx(2.0));
  CHECK(transfer_seconds(0, 11.0) == 0.0);
  CHECK(transfer_seconds(-5, 11.0) == 0.0);
  // The b to g speedup is exactly the rate ratio.
  const double slow = transfer_seconds(1 << 20, 11.0);
  const double fast = transfer_seconds(1 << 20, 54.0);
  CHECK(slow / fast == Catch::Approx(54.0 / 11.0));
}

TEST_CASE("channel pool hands out the lowest free index") {
  ChannelState ch;
  ch.capacity = 3;
  CHECK(ch.allocate() == 1);
  CHECK(ch.allocate() == 2);
  CHECK(ch.allocate() == 3);
  CHECK(ch.allocate() == 0);  // exhausted
  CHECK(ch.active() == 3);
  ch.release(2);
  CHECK(ch.allocate() == 2);  // freed slot is reused first-fit
  ch.release(1);
  ch.release(2);
  ch.release(3);
  CHECK(ch.active() == 0);
}

TEST_CASE("patrol mobility follows the loop at constant speed") {
  const Region region = make_region(1);
  MapUnit cfg = make_map(30, 1, {{0, 0}, {100, 0}}, 10.0);
  MapState m(cfg, region, 1);
  CHECK(m.position() == GeoPoint{0, 0});
  m.step_mobility(5.0);
  CHECK(m.position() == GeoPoint{50, 0});
  m.step_mobility(5.0);
  CHECK(m.position() == GeoPoint{100, 0});
  m.step_mobility(5.0);  // heading back along the return leg
  CHECK(m.position() == GeoPoint{50, 0});
  m.step_mobility(5.0);
  CHECK(m.position() == GeoPoint{0, 0});
}

TEST_CASE("patrol with a single waypoint stays put") {
  const Region region = make_region(1);
  MapUnit cfg = make_map(30, 1, {{42, 42}});
  MapState m(cfg, region, 1);
  m.step_mobility(100.0);
  CHECK(m.position() == GeoPoint{42, 42});
}

TEST_CASE("random waypoint motion is seeded and stays in bounds") {
  Region region = make_region(1);
  region.width = 500.0;
  region.height = 300.0;
  MapUnit cfg = make_map(30, 1, {{0, 0}}, 25.0);
  cfg.mobility = MobilityMode::random_waypoint;

  MapState a(cfg, region, 7);
  MapState b(cfg, region, 7);
  MapState c(cfg, region, 8);
  bool diverged = false;
  for (int i = 0; i < 200; ++i) {
    a.step_mobility(1.0);
    b.step_mobility(1.0);
    c.step_mobility(1.0);
    REQUIRE(a.position() == b.position());
    CHECK(a.position().x >= 0.0);
    CHECK(a.position().x <= 500.0);
    CHECK(a.position().y >= 0.0);
    CHECK(a.position().y <= 300.0);
    if (!(a.position() == c.position())) diverged = true;
  }
  CHECK(diverged);  // a different seed takes a different path
}

TEST_CASE("random waypoint speed bounds displacement per step") {
  Region region = make_region(1);
  region.width = 1000.0;
  region.height = 1000.0;
  MapUnit cfg = make_map(31, 1, {{500, 500}}, 15.0);
  cfg.mobility = MobilityMode::random_waypoint;
  MapState m(cfg, region, 3);
  GeoPoint prev = m.position();
  for (int i = 0; i < 100; ++i) {
    m.step_mobility(2.0);
    CHECK(distance(prev, m.position()) <= 15.0 * 2.0 + 1e-9);
    prev = m.position();
  }
}

TEST_CASE("buffer accounting") {
  const Region region = make_region(1);
  MapUnit cfg = make_map(30, 1, {{0, 0}});
  cfg.buffer_capacity = 1000;
  MapState m(cfg, region, 1);
  CHECK(m.fits(1000));
  CHECK_FALSE(m.fits(1001));
  m.reserve(600);
  CHECK(m.occupancy() == 600);
  CHECK(m.fits(400));
  CHECK_FALSE(m.fits(401));
  m.release_bytes(600);
  CHECK(m.occupancy() == 0);
}

TEST_CASE("waiting marker tracks one endpoint") {
  const Region region = make_region(1);
  MapUnit cfg = make_map(30, 1, {{0, 0}});
  MapState m(cfg, region, 1);
  CHECK_FALSE(m.waiting_target().has_value());
  m.set_waiting(HolderKind::sdcc, 10);
  CHECK(m.waiting_at(HolderKind::sdcc, 10));
  CHECK_FALSE(m.waiting_at(HolderKind::dpc, 10));
  m.clear_waiting();
  CHECK_FALSE(m.waiting_target().has_value());
}

TEST_CASE("custody entries and holder names") {
  CHECK(to_string(HolderKind::sdcc) == "sdcc");
  CHECK(to_string(HolderKind::map) == "map");
  CHECK(to_string(HolderKind::dpc) == "dpc");
  CHECK(to_string(SessionDirection::collect) == "collect");
  CHECK(to_string(SessionDirection::deliver) == "deliver");
}
