#include "orbitsched/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace orbitsched {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return v * (1.0 / n);
}

double deg2rad(double deg) { return deg * constants::kPi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / constants::kPi; }

namespace {
double wrap_longitude(double lon_deg) {
  double lon = std::fmod(lon_deg + 180.0, 360.0);
  if (lon < 0.0) lon += 360.0;
  return lon - 180.0;
}
}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg)
    : latitude_deg(lat_deg), longitude_deg(wrap_longitude(lon_deg)) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) {
    throw std::invalid_argument("latitude outside [-90, 90]");
  }
}

double great_circle_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = deg2rad(a.latitude_deg);
  const double lat2 = deg2rad(b.latitude_deg);
  const double dlat = lat2 - lat1;
  const double dlon = deg2rad(b.longitude_deg - a.longitude_deg);
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  return 2.0 * constants::kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

Vec3 geodetic_to_eci(const GeoPoint& point, std::int64_t timestamp_ms) {
  const double lat = deg2rad(point.latitude_deg);
  const double lon =
      deg2rad(point.longitude_deg) + constants::kEarthRotationRateRadS * (timestamp_ms / 1000.0);
  const double r = constants::kEarthRadiusKm;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
          r * std::sin(lat)};
}

GeoPoint eci_to_geodetic(const Vec3& position, std::int64_t timestamp_ms) {
  const double r = norm(position);
  const double lat = rad2deg(std::asin(std::clamp(position.z / r, -1.0, 1.0)));
  const double lon_inertial = rad2deg(std::atan2(position.y, position.x));
  const double lon =
      lon_inertial - rad2deg(constants::kEarthRotationRateRadS * (timestamp_ms / 1000.0));
  return GeoPoint(lat, lon);
}

SatelliteState interpolate_state(const std::vector<EphemerisRecord>& ephemeris,
                                 std::int64_t timestamp_ms) {
  if (ephemeris.empty()) throw std::out_of_range("empty ephemeris");
  if (timestamp_ms < ephemeris.front().timestamp_ms ||
      timestamp_ms > ephemeris.back().timestamp_ms) {
    throw std::out_of_range("timestamp outside ephemeris span");
  }
  auto it = std::lower_bound(ephemeris.begin(), ephemeris.end(), timestamp_ms,
                             [](const EphemerisRecord& r, std::int64_t t) { return r.timestamp_ms < t; });
  if (it->timestamp_ms == timestamp_ms) {
    return {timestamp_ms, it->position_eci_km, it->velocity_eci_km_s};
  }
  const EphemerisRecord& b = *it;
  const EphemerisRecord& a = *(it - 1);
  const double u = static_cast<double>(timestamp_ms - a.timestamp_ms) /
                   static_cast<double>(b.timestamp_ms - a.timestamp_ms);
  SatelliteState s;
  s.timestamp_ms = timestamp_ms;
  s.position_eci_km = a.position_eci_km + (b.position_eci_km - a.position_eci_km) * u;
  s.velocity_eci_km_s = a.velocity_eci_km_s + (b.velocity_eci_km_s - a.velocity_eci_km_s) * u;
  return s;
}

Vec3 boresight_from_attitude(const Attitude& a) {
  const double r = deg2rad(a.roll_deg);
  const double p = deg2rad(a.pitch_deg);
  return {std::sin(p), std::sin(r) * std::cos(p), std::cos(r) * std::cos(p)};
}

namespace {
// Local orbital frame: x along velocity, z toward nadir, y completing it.
struct OrbitalFrame {
  Vec3 x, y, z;
};

OrbitalFrame local_frame(const SatelliteState& state) {
  const Vec3 z = normalized(state.position_eci_km) * -1.0;
  const Vec3 v = state.velocity_eci_km_s;
  const Vec3 x = normalized(v - z * dot(v, z));
  return {x, cross(z, x), z};
}
}  // namespace

Attitude attitude_pointing(const SatelliteState& state, const GeoPoint& target,
                           std::int64_t timestamp_ms) {
  const Vec3 target_eci = geodetic_to_eci(target, timestamp_ms);
  const Vec3 b = normalized(target_eci - state.position_eci_km);
  const OrbitalFrame f = local_frame(state);
  const double u1 = dot(b, f.x);
  const double u2 = dot(b, f.y);
  const double u3 = dot(b, f.z);
  Attitude a;
  a.pitch_deg = rad2deg(std::asin(std::clamp(u1, -1.0, 1.0)));
  a.roll_deg = rad2deg(std::atan2(u2, u3));
  a.yaw_deg = 0.0;
  return a;
}

double angular_separation_deg(const Attitude& a1, const Attitude& a2) {
  const double c = std::clamp(dot(boresight_from_attitude(a1), boresight_from_attitude(a2)),
                              -1.0, 1.0);
  return rad2deg(std::acos(c));
}

std::int64_t maneuver_duration_s(const Attitude& a1, const Attitude& a2) {
  const double angle = angular_separation_deg(a1, a2);
  // 1 deg/s, rounded up; the epsilon absorbs fp noise at whole degrees.
  return static_cast<std::int64_t>(std::ceil(angle / constants::kSlewRateDegS - 1e-9));
}

std::int64_t acquisition_duration_ms(const GeoPoint& median_start, const GeoPoint& median_end) {
  const double dist_km = great_circle_km(median_start, median_end);
  const auto ms = static_cast<std::int64_t>(
      std::llround(dist_km / constants::kGroundTrackSpeedKmS * 1000.0));
  return std::max<std::int64_t>(1000, ms);
}

double depointing_angle_deg(const SatelliteState& state, const GeoPoint& target,
                            std::int64_t timestamp_ms) {
  const Vec3 to_target = geodetic_to_eci(target, timestamp_ms) - state.position_eci_km;
  // A target beyond the horizon is occluded by the Earth even if the line of
  // sight happens to pass near nadir (e.g. the exact antipode): report it as
  // fully depointed instead of the raw boresight angle.
  const double r = norm(state.position_eci_km);
  const double horizon_km = std::sqrt(std::max(
      0.0, r * r - constants::kEarthRadiusKm * constants::kEarthRadiusKm));
  if (norm(to_target) > horizon_km) return 180.0;
  const Vec3 nadir = normalized(state.position_eci_km) * -1.0;
  return rad2deg(std::acos(std::clamp(dot(nadir, normalized(to_target)), -1.0, 1.0)));
}

namespace {
double depointing_at(const GeoPoint& target, const std::vector<EphemerisRecord>& eph,
                     std::int64_t t) {
  return depointing_angle_deg(interpolate_state(eph, t), target, t);
}

// Bisect the 45 deg crossing between t_out (angle > 45) and t_in (angle <= 45).
std::int64_t bisect_crossing(const GeoPoint& target, const std::vector<EphemerisRecord>& eph,
                             std::int64_t t_out, std::int64_t t_in) {
  while (std::llabs(t_in - t_out) > 1) {
    const std::int64_t mid = t_out + (t_in - t_out) / 2;
    if (depointing_at(target, eph, mid) <= constants::kMaxDepointingDeg) {
      t_in = mid;
    } else {
      t_out = mid;
    }
  }
  return t_in;
}
}  // namespace

DtoWindow compute_dto_window(const GeoPoint& target, const std::vector<EphemerisRecord>& ephemeris,
                             std::int64_t scan_start_ms, std::int64_t scan_end_ms) {
  if (ephemeris.empty()) throw NoOpportunityError("empty ephemeris");
  const std::int64_t lo = std::max(scan_start_ms, ephemeris.front().timestamp_ms);
  const std::int64_t hi = std::min(scan_end_ms, ephemeris.back().timestamp_ms);
  if (lo > hi) throw NoOpportunityError("scan range outside ephemeris span");

  std::int64_t first_in = -1;
  for (std::int64_t t = lo; t <= hi; t += 1000) {
    if (depointing_at(target, ephemeris, t) <= constants::kMaxDepointingDeg) {
      first_in = t;
      break;
    }
  }
  if (first_in < 0) throw NoOpportunityError("target never within the depointing cone");

  std::int64_t last_in = first_in;
  for (std::int64_t t = first_in + 1000; t <= hi; t += 1000) {
    if (depointing_at(target, ephemeris, t) <= constants::kMaxDepointingDeg) {
      last_in = t;
    } else {
      break;
    }
  }

  DtoWindow w;
  w.start_ms = (first_in == lo) ? lo : bisect_crossing(target, ephemeris, first_in - 1000, first_in);
  w.end_ms = (last_in + 1000 > hi) ? std::min(hi, last_in)
                                   : bisect_crossing(target, ephemeris, last_in + 1000, last_in);
  if (w.start_ms >= w.end_ms) throw NoOpportunityError("degenerate opportunity window");
  return w;
}

std::optional<std::int64_t> min_relay_from_attitude(std::int64_t t_ms, const Attitude& from,
                                                    const RequestGeometry& to,
                                                    const std::vector<EphemerisRecord>& ephemeris,
                                                    std::int64_t min_d) {
  const std::int64_t tau = acquisition_duration_ms(to.median_start, to.median_end);
  const std::int64_t latest_start = to.dto_end_ms - tau;
  for (std::int64_t d = min_d;; ++d) {
    const std::int64_t arrival = t_ms + d * 1000;
    if (arrival > latest_start) return std::nullopt;
    if (arrival < to.dto_start_ms) continue;
    if (arrival < ephemeris.front().timestamp_ms || arrival > ephemeris.back().timestamp_ms) {
      return std::nullopt;
    }
    const SatelliteState s = interpolate_state(ephemeris, arrival);
    const Attitude start_att = attitude_pointing(s, to.median_start, arrival);
    if (maneuver_duration_s(from, start_att) <= d) return d;
  }
}

std::optional<std::int64_t> min_relay_time(std::int64_t t_end_ms, const RequestGeometry& f1,
                                           const RequestGeometry& f2,
                                           const std::vector<EphemerisRecord>& ephemeris) {
  if (t_end_ms < ephemeris.front().timestamp_ms || t_end_ms > ephemeris.back().timestamp_ms) {
    return std::nullopt;
  }
  const SatelliteState s = interpolate_state(ephemeris, t_end_ms);
  const Attitude end_att = attitude_pointing(s, f1.median_end, t_end_ms);
  return min_relay_from_attitude(t_end_ms, end_att, f2, ephemeris, 1);
}

}  // namespace orbitsched
