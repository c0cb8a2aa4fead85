#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace orbitsched {

namespace constants {
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kSiderealDayS = 86164.0;
inline constexpr double kEarthRotationRateRadS = 2.0 * 3.14159265358979323846 / kSiderealDayS;
inline constexpr double kSlewRateDegS = 1.0;
inline constexpr double kMaxDepointingDeg = 45.0;
// 15 orbits in ~24 hours.
inline constexpr double kOrbitPeriodS = 86400.0 / 15.0;
inline constexpr double kOrbitAngularRateRadS = 2.0 * 3.14159265358979323846 / kOrbitPeriodS;
inline constexpr double kGroundTrackSpeedKmS = kEarthRadiusKm * kOrbitAngularRateRadS;
inline constexpr double kMuEarthKm3S2 = 398600.4418;
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace constants

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);

// Latitude in [-90, 90]; longitude wrapped to [-180, 180) on construction.
struct GeoPoint {
  double latitude_deg{0.0};
  double longitude_deg{0.0};

  GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg);
};

struct Attitude {
  double roll_deg{0.0};
  double pitch_deg{0.0};
  double yaw_deg{0.0};
};

struct DtoWindow {
  std::int64_t start_ms{0};
  std::int64_t end_ms{0};
};

struct SatelliteState {
  std::int64_t timestamp_ms{0};
  Vec3 position_eci_km;
  Vec3 velocity_eci_km_s;
};

struct EphemerisRecord {
  int orbit_number{0};
  std::int64_t timestamp_ms{0};
  Vec3 position_eci_km;
  Vec3 velocity_eci_km_s;
};

double deg2rad(double deg);
double rad2deg(double rad);

// Great-circle distance between two surface points, km (haversine).
double great_circle_km(const GeoPoint& a, const GeoPoint& b);

// Surface point to ECI at the given time. At timestamp 0 longitude 0 lies on
// the inertial +x axis; the Earth spins at the sidereal rate.
Vec3 geodetic_to_eci(const GeoPoint& point, std::int64_t timestamp_ms);

// Inverse of geodetic_to_eci for a position direction (radius ignored).
GeoPoint eci_to_geodetic(const Vec3& position, std::int64_t timestamp_ms);

SatelliteState interpolate_state(const std::vector<EphemerisRecord>& ephemeris,
                                 std::int64_t timestamp_ms);

// Boresight unit vector implied by an attitude, expressed in the local orbital
// frame (x along velocity, z toward nadir). Yaw is ignored (always 0 here).
Vec3 boresight_from_attitude(const Attitude& a);

// Roll/pitch pointing the boresight from the satellite to the target; yaw 0.
Attitude attitude_pointing(const SatelliteState& state, const GeoPoint& target,
                           std::int64_t timestamp_ms);

// Angle between the boresight vectors of two attitudes, degrees in [0, 180].
double angular_separation_deg(const Attitude& a1, const Attitude& a2);

// Whole seconds to slew between attitudes at 1 deg/s, rounded up.
std::int64_t maneuver_duration_s(const Attitude& a1, const Attitude& a2);

// Time to sweep the median line at the nominal ground-track speed, >= 1000 ms.
std::int64_t acquisition_duration_ms(const GeoPoint& median_start, const GeoPoint& median_end);

// Angle between nadir and the boresight to the target, degrees.
double depointing_angle_deg(const SatelliteState& state, const GeoPoint& target,
                            std::int64_t timestamp_ms);

struct NoOpportunityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First contiguous interval with depointing <= 45 deg toward `target`.
// Scans at 1 s steps within [scan_start_ms, scan_end_ms] (clamped to the
// ephemeris span), then bisects the crossings to 1 ms.
DtoWindow compute_dto_window(const GeoPoint& target, const std::vector<EphemerisRecord>& ephemeris,
                             std::int64_t scan_start_ms = 0,
                             std::int64_t scan_end_ms = std::numeric_limits<std::int64_t>::max());

struct RequestGeometry {
  GeoPoint median_start;
  GeoPoint median_end;
  std::int64_t dto_start_ms{0};
  std::int64_t dto_end_ms{0};
};

// Smallest d >= min_d seconds such that arriving at t_ms + d*1000 the slew
// from `from` fits in d and the full acquisition of `to` fits in its DTO.
// Mirrors the 1 s increment procedure; nullopt when the window closes first.
std::optional<std::int64_t> min_relay_from_attitude(std::int64_t t_ms, const Attitude& from,
                                                    const RequestGeometry& to,
                                                    const std::vector<EphemerisRecord>& ephemeris,
                                                    std::int64_t min_d = 1);

// t_min of the chaining identity: relay between the end of f1's acquisition
// at t_end_ms and the start of f2.
std::optional<std::int64_t> min_relay_time(std::int64_t t_end_ms, const RequestGeometry& f1,
                                           const RequestGeometry& f2,
                                           const std::vector<EphemerisRecord>& ephemeris);

}  // namespace orbitsched
