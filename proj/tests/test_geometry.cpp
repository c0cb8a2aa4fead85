#include <cmath>

#include "doctest.h"
#include "orbitsched/geometry.hpp"
#include "orbitsched/rng.hpp"
#include "test_helpers.hpp"

using namespace orbitsched;

TEST_CASE("geodetic_to_eci lies on the 6371 km sphere") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p(rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0));
    const std::int64_t t = static_cast<std::int64_t>(rng.uniform(0.0, 1e11));
    CHECK(norm(geodetic_to_eci(p, t)) == doctest::Approx(constants::kEarthRadiusKm).epsilon(1e-12));
  }
}

TEST_CASE("geodetic <-> eci round trip") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p(rng.uniform(-89.0, 89.0), rng.uniform(-180.0, 180.0));
    const std::int64_t t = static_cast<std::int64_t>(rng.uniform(0.0, 1e10));
    const GeoPoint q = eci_to_geodetic(geodetic_to_eci(p, t), t);
    CHECK(q.latitude_deg == doctest::Approx(p.latitude_deg).epsilon(1e-9));
    // Longitudes compare modulo wrap.
    double dlon = std::fabs(q.longitude_deg - p.longitude_deg);
    dlon = std::min(dlon, 360.0 - dlon);
    CHECK(dlon < 1e-7);
  }
}

TEST_CASE("great circle distance oracle values") {
  // One degree along the equator.
  const double one_deg_km = constants::kEarthRadiusKm * deg2rad(1.0);
  CHECK(great_circle_km(GeoPoint(0, 0), GeoPoint(0, 1)) == doctest::Approx(one_deg_km).epsilon(1e-12));
  // Pole to pole.
  CHECK(great_circle_km(GeoPoint(90, 0), GeoPoint(-90, 0)) ==
        doctest::Approx(constants::kEarthRadiusKm * constants::kPi).epsilon(1e-12));
  CHECK(great_circle_km(GeoPoint(12, 34), GeoPoint(12, 34)) == doctest::Approx(0.0));
}

TEST_CASE("interpolate_state matches the dense orbit on a hold-out grid") {
  // Frozen oracle: a 1 s-sampled orbit provides the reference states that the
  // 20 s-sampled ephemeris must reproduce by interpolation.
  const auto sparse = testutil::circular_ephemeris(0, 600, 20, 0.3);
  const auto dense = testutil::circular_ephemeris(0, 600, 1, 0.3);
  for (std::size_t i = 0; i < dense.size(); i += 7) {
    const auto& ref = dense[i];
    const SatelliteState got = interpolate_state(sparse, ref.timestamp_ms);
    CHECK(norm(got.position_eci_km - ref.position_eci_km) < 0.5);     // km
    CHECK(norm(got.velocity_eci_km_s - ref.velocity_eci_km_s) < 0.01);  // km/s
  }
  // Exact at the knots.
  const SatelliteState knot = interpolate_state(sparse, 40'000);
  CHECK(knot.position_eci_km.x == sparse[2].position_eci_km.x);
  CHECK_THROWS_AS(interpolate_state(sparse, -1), std::out_of_range);
  CHECK_THROWS_AS(interpolate_state(sparse, 600'001), std::out_of_range);
}

TEST_CASE("boresight components invert attitude_pointing") {
  // Independent frame construction: x along-track, z nadir, y = z cross x.
  const auto eph = testutil::circular_ephemeris(0, 1200, 20, 1.1);
  const SatelliteState s = interpolate_state(eph, 500'000);
  const Vec3 z = normalized(s.position_eci_km) * -1.0;
  const Vec3 x = normalized(s.velocity_eci_km_s - z * dot(s.velocity_eci_km_s, z));
  const Vec3 y = cross(z, x);

  Rng rng(77);
  for (int i = 0; i < 50; ++i) {
    const GeoPoint target(rng.uniform(-60.0, 60.0), rng.uniform(-180.0, 180.0));
    const Vec3 b = normalized(geodetic_to_eci(target, 500'000) - s.position_eci_km);
    const Attitude att = attitude_pointing(s, target, 500'000);
    const Vec3 bb = boresight_from_attitude(att);
    // boresight in local frame must equal the direct direction cosines
    CHECK(bb.x == doctest::Approx(dot(b, x)).epsilon(1e-9));
    CHECK(bb.y == doctest::Approx(dot(b, y)).epsilon(1e-9));
    CHECK(bb.z == doctest::Approx(dot(b, z)).epsilon(1e-9));
    CHECK(att.yaw_deg == 0.0);
  }
}

TEST_CASE("angular separation and maneuver durations") {
  const Attitude nadir{};
  CHECK(angular_separation_deg(nadir, nadir) == doctest::Approx(0.0));
  CHECK(maneuver_duration_s(nadir, nadir) == 0);

  // Pure roll difference: separation equals the roll delta.
  const Attitude r10{10.0, 0.0, 0.0};
  const Attitude r25{25.0, 0.0, 0.0};
  CHECK(angular_separation_deg(r10, r25) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(maneuver_duration_s(r10, r25) == 15);

  // Rounded up at 1 deg/s.
  const Attitude r102{10.2, 0.0, 0.0};
  CHECK(maneuver_duration_s(r10, r102) == 1);

  SUBCASE("symmetry over 10^4 random pairs") {
    Rng rng(99);
    for (int i = 0; i < 10'000; ++i) {
      const Attitude a{rng.uniform(-45.0, 45.0), rng.uniform(-45.0, 45.0), 0.0};
      const Attitude b{rng.uniform(-45.0, 45.0), rng.uniform(-45.0, 45.0), 0.0};
      CHECK(maneuver_duration_s(a, b) == maneuver_duration_s(b, a));
      CHECK(angular_separation_deg(a, b) == doctest::Approx(angular_separation_deg(b, a)));
    }
  }
}

TEST_CASE("acquisition duration from the median line") {
  // Floor of one second for a degenerate line.
  CHECK(acquisition_duration_ms(GeoPoint(1, 2), GeoPoint(1, 2)) == 1000);
  // Independent arithmetic for a 30 km equatorial segment.
  const GeoPoint a(0.0, 0.0);
  const double lon = rad2deg(30.0 / constants::kEarthRadiusKm);
  const GeoPoint b(0.0, lon);
  const double dist = great_circle_km(a, b);
  const auto expected =
      static_cast<std::int64_t>(std::llround(dist / constants::kGroundTrackSpeedKmS * 1000.0));
  CHECK(acquisition_duration_ms(a, b) == expected);
  CHECK(expected > 4000);
  CHECK(expected < 4500);
}

TEST_CASE("compute_dto_window endpoints sit at the 45 deg cone") {
  const auto eph = testutil::circular_ephemeris(0, 3600, 20, 0.0);
  const std::int64_t t_mid = 1'200'000;
  const GeoPoint target = testutil::subsatellite_point(eph, t_mid);
  const DtoWindow w = compute_dto_window(target, eph);
  CHECK(w.start_ms < t_mid);
  CHECK(w.end_ms > t_mid);
  const double d_start = depointing_angle_deg(interpolate_state(eph, w.start_ms), target, w.start_ms);
  const double d_end = depointing_angle_deg(interpolate_state(eph, w.end_ms), target, w.end_ms);
  CHECK(std::fabs(d_start - constants::kMaxDepointingDeg) < 0.01);
  CHECK(std::fabs(d_end - constants::kMaxDepointingDeg) < 0.01);
  // Interior of the window is inside the cone.
  for (std::int64_t t = w.start_ms + 1000; t < w.end_ms; t += 30'000) {
    CHECK(depointing_angle_deg(interpolate_state(eph, t), target, t) <=
          constants::kMaxDepointingDeg);
  }
}

TEST_CASE("opposite side of the Earth yields no opportunity") {
  const auto eph = testutil::circular_ephemeris(0, 3000, 20, 0.0);
  const GeoPoint nadir0 = testutil::subsatellite_point(eph, 1'000'000);
  const GeoPoint antipode(-nadir0.latitude_deg, nadir0.longitude_deg + 180.0);
  CHECK_THROWS_AS(compute_dto_window(antipode, eph, 900'000, 1'100'000), NoOpportunityError);
}

TEST_CASE("min_relay_from_attitude matches an independent 1 s sweep") {
  const auto eph = testutil::circular_ephemeris(0, 3600, 20, 0.0);
  const std::int64_t t_mid = 1'500'000;
  const GeoPoint target = testutil::subsatellite_point(eph, t_mid);
  const GeoPoint target2(target.latitude_deg, target.longitude_deg + 0.3);
  const DtoWindow w = compute_dto_window(target, eph);
  RequestGeometry geo{target, target2, w.start_ms, w.end_ms};

  const Attitude from{8.0, -3.0, 0.0};
  const std::int64_t t_ms = w.start_ms - 120'000;
  const auto got = min_relay_from_attitude(t_ms, from, geo, eph, 1);
  REQUIRE(got.has_value());

  // Oracle: brute 1 s sweep with the public depointing/maneuver primitives.
  const std::int64_t tau = acquisition_duration_ms(target, target2);
  std::int64_t expected = -1;
  for (std::int64_t d = 1; d < 4000; ++d) {
    const std::int64_t arrival = t_ms + d * 1000;
    if (arrival > w.end_ms - tau) break;
    if (arrival < w.start_ms) continue;
    const Attitude at = attitude_pointing(interpolate_state(eph, arrival), target, arrival);
    if (maneuver_duration_s(from, at) <= d) {
      expected = d;
      break;
    }
  }
  CHECK(*got == expected);

  // Window closes before any feasible arrival: nullopt.
  RequestGeometry dead{target, target2, w.start_ms, w.start_ms + tau};
  CHECK_FALSE(min_relay_from_attitude(w.start_ms + 1, from, dead, eph, 1).has_value());
}

TEST_CASE("min_relay_time anchors at the end attitude of the first request") {
  const auto eph = testutil::circular_ephemeris(0, 3600, 20, 0.0);
  const GeoPoint t1 = testutil::subsatellite_point(eph, 1'000'000);
  const GeoPoint t2 = testutil::subsatellite_point(eph, 1'300'000);
  const DtoWindow w1 = compute_dto_window(t1, eph);
  const DtoWindow w2 = compute_dto_window(t2, eph);
  RequestGeometry f1{t1, t1, w1.start_ms, w1.end_ms};
  RequestGeometry f2{t2, t2, w2.start_ms, w2.end_ms};
  const std::int64_t t_end = 1'000'000;
  const auto t_min = min_relay_time(t_end, f1, f2, eph);
  REQUIRE(t_min.has_value());
  const Attitude end_att = attitude_pointing(interpolate_state(eph, t_end), f1.median_end, t_end);
  const auto direct = min_relay_from_attitude(t_end, end_att, f2, eph, 1);
  REQUIRE(direct.has_value());
  CHECK(*t_min == *direct);
  CHECK(*t_min >= 1);
}
