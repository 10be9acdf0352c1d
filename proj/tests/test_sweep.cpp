#include <catch2/catch_amalgamated.hpp>

#include "dmsim/sweep.hpp"
#include "helpers.hpp"

using namespace dmsim;

namespace {

Scenario sweep_base() {
  Scenario sc;
  sc.name = "base";
  sc.topology.delta = 50.0;
  sc.topology.regions.push_back(testutil::make_region(1));
  sc.topology.sensors.push_back(testutil::make_sensor(1, 1, 0, 0));
  sc.topology.sensors.push_back(testutil::make_sensor(2, 1, 5, 0));
  sc.topology.sdccs.push_back(testutil::make_sdcc(10, 1, 0, 0, /*tau=*/1));
  sc.topology.dpcs.push_back(testutil::make_dpc(21, 1, 500, 0));
  sc.topology.dpcs.push_back(testutil::make_dpc(22, 1, 10, 0));
  sc.topology.dpcs[0].peers = {22};
  sc.topology.dpcs[1].peers = {21};
  sc.topology.maps.push_back(testutil::make_map(1, 1, {{0, 0}, {500, 0}}, 10));
  sc.topology.maps.push_back(testutil::make_map(2, 1, {{0, 0}, {0, 500}}, 20));
  assign_clusters(sc.topology.sensors, sc.topology.sdccs);
  apply_collapse(sc.topology);
  return sc;
}

}  // namespace

TEST_CASE("sweepable parameter names") {
  const auto& params = sweepable_params();
  CHECK(params == std::vector<std::string>{"tau", "map_count", "link_standard", "match_threshold",
                                           "dpc_count"});
}

TEST_CASE("tau sweep rewrites every collection center") {
  const Scenario base = sweep_base();
  const Scenario out = apply_param(base, "tau", "3");
  for (const auto& s : out.topology.sdccs) CHECK(s.tau == 3);
  CHECK(base.topology.sdccs[0].tau == 1);  // input untouched

  CHECK_THROWS_AS(apply_param(base, "tau", "0"), SweepError);
  CHECK_THROWS_AS(apply_param(base, "tau", "2.5"), SweepError);
  CHECK_THROWS_AS(apply_param(base, "tau", "many"), SweepError);
}

TEST_CASE("map_count shrink keeps the lowest ids") {
  const Scenario out = apply_param(sweep_base(), "map_count", "1");
  REQUIRE(out.topology.maps.size() == 1);
  CHECK(out.topology.maps[0].id == 1);

  const Scenario none = apply_param(sweep_base(), "map_count", "0");
  CHECK(none.topology.maps.empty());
}

TEST_CASE("map_count growth clones the fleet with fresh ids") {
  const Scenario out = apply_param(sweep_base(), "map_count", "5");
  REQUIRE(out.topology.maps.size() == 5);
  std::vector<MapId> ids;
  std::vector<double> speeds;
  for (const auto& m : out.topology.maps) {
    ids.push_back(m.id);
    speeds.push_back(m.speed);
  }
  CHECK(ids == std::vector<MapId>{1, 2, 3, 4, 5});
  // Clone sources cycle over the fleet, so speeds alternate with the originals.
  CHECK(speeds == std::vector<double>{10, 20, 10, 20, 10});

  Scenario empty_fleet = sweep_base();
  empty_fleet.topology.maps.clear();
  CHECK_THROWS_AS(apply_param(empty_fleet, "map_count", "2"), SweepError);
}

TEST_CASE("link_standard sweep rewrites every region") {
  const Scenario out = apply_param(sweep_base(), "link_standard", "802.11a");
  for (const auto& r : out.topology.regions) {
    CHECK(r.link.standard == WifiStandard::dot11a);
    CHECK(r.link.rate_mbps == 54.0);
    CHECK(r.link.channels == 12);
  }
  CHECK_THROWS_AS(apply_param(sweep_base(), "link_standard", "802.11x"), SweepError);
}

TEST_CASE("match_threshold sweep validates its range") {
  const Scenario out = apply_param(sweep_base(), "match_threshold", "0.25");
  CHECK(out.topology.cdc_dcc.match_threshold == 0.25);
  CHECK_THROWS_AS(apply_param(sweep_base(), "match_threshold", "1.5"), SweepError);
  CHECK_THROWS_AS(apply_param(sweep_base(), "match_threshold", "-0.1"), SweepError);
  CHECK_THROWS_AS(apply_param(sweep_base(), "match_threshold", "abc"), SweepError);
}

TEST_CASE("dpc_count shrinks and filters peer lists") {
  const Scenario out = apply_param(sweep_base(), "dpc_count", "1");
  REQUIRE(out.topology.dpcs.size() == 1);
  CHECK(out.topology.dpcs[0].id == 21);
  CHECK(out.topology.dpcs[0].peers.empty());  // peer 22 no longer exists

  CHECK_THROWS_AS(apply_param(sweep_base(), "dpc_count", "3"), SweepError);  // growth unsupported
  CHECK_THROWS_AS(apply_param(sweep_base(), "dpc_count", "0"), SweepError);
}

TEST_CASE("apply_param re-derives link collapses") {
  const Scenario base = sweep_base();
  // dpc 22 sits 10 m from sdcc 10, inside delta 50: collapsed at load.
  REQUIRE(base.topology.sdccs[0].collapsed_with == 22);
  // Dropping to one center leaves only dpc 21 at 500 m, beyond delta.
  const Scenario out = apply_param(base, "dpc_count", "1");
  CHECK_FALSE(out.topology.sdccs[0].collapsed_with.has_value());
}

TEST_CASE("unknown sweep parameter is rejected") {
  CHECK_THROWS_AS(apply_param(sweep_base(), "speed", "3"), SweepError);
}

TEST_CASE("run_sweep pairs replicates by seed across values") {
  Scenario sc = sweep_base();
  sc.topology.maps.clear();  // collapsed path only, keeps the runs tiny
  const auto points = run_sweep(sc, "tau", {"2", "3"}, 2, 70, 100.0);
  REQUIRE(points.size() == 4);

  CHECK(points[0].value == "2");
  CHECK(points[0].rep == 0);
  CHECK(points[0].result.info.seed == 70);
  CHECK(points[1].value == "2");
  CHECK(points[1].rep == 1);
  CHECK(points[1].result.info.seed == 71);
  CHECK(points[2].value == "3");
  CHECK(points[2].result.info.seed == 70);
  CHECK(points[3].result.info.seed == 71);
  for (const auto& p : points) {
    CHECK(p.param == "tau");
    CHECK(p.result.info.param == "tau");
    CHECK(p.result.info.value == p.value);
    CHECK(p.result.info.rep == p.rep);
    CHECK(p.result.info.horizon == 100.0);
  }
}

TEST_CASE("run_sweep rejects empty configurations") {
  const Scenario sc = sweep_base();
  CHECK_THROWS_AS(run_sweep(sc, "tau", {}, 1, 1, 100.0), SweepError);
  CHECK_THROWS_AS(run_sweep(sc, "tau", {"1"}, 0, 1, 100.0), SweepError);
}
