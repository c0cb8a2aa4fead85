#include "orbitsched/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "orbitsched/rng.hpp"

namespace orbitsched {

using nlohmann::json;

const AcquisitionRequest* ProblemInstance::find_request(const std::string& id) const {
  for (const auto& r : requests) {
    if (r.request_id == id) return &r;
  }
  return nullptr;
}

std::size_t Plan::size() const {
  std::size_t n = 0;
  for (const auto& [_, acqs] : satellites) n += acqs.size();
  return n;
}

// --- file I/O ------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

double require_number(const json& obj, const char* field, std::size_t index) {
  if (!obj.contains(field) || !obj[field].is_number()) {
    throw ParseError("entry " + std::to_string(index) + ": missing or non-numeric field '" +
                     field + "'");
  }
  return obj[field].get<double>();
}

std::string require_string(const json& obj, const char* field, std::size_t index) {
  if (!obj.contains(field) || !obj[field].is_string()) {
    throw ParseError("entry " + std::to_string(index) + ": missing or non-string field '" +
                     field + "'");
  }
  return obj[field].get<std::string>();
}

Vec3 require_vec3(const json& obj, const char* field, std::size_t index) {
  if (!obj.contains(field) || !obj[field].is_array() || obj[field].size() != 3) {
    throw ParseError("entry " + std::to_string(index) + ": field '" + field +
                     "' must be a 3-element array");
  }
  const auto& a = obj[field];
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

json attitude_to_json(const Attitude& a) {
  return json{{"pitch_deg", a.pitch_deg}, {"roll_deg", a.roll_deg}, {"yaw_deg", a.yaw_deg}};
}

Attitude attitude_from_json(const json& j) {
  Attitude a;
  a.roll_deg = j.at("roll_deg").get<double>();
  a.pitch_deg = j.at("pitch_deg").get<double>();
  a.yaw_deg = j.at("yaw_deg").get<double>();
  return a;
}

}  // namespace

EphemerisMap parse_ephemeris_text(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_array()) throw ParseError("ephemeris file must be a JSON array");
  EphemerisMap out;
  std::size_t i = 0;
  for (const auto& obj : root) {
    EphemerisRecord rec;
    const std::string sat = require_string(obj, "satellite_id", i);
    rec.orbit_number = static_cast<int>(require_number(obj, "orbit_number", i));
    rec.timestamp_ms = static_cast<std::int64_t>(require_number(obj, "timestamp_ms", i));
    rec.position_eci_km = require_vec3(obj, "position_km", i);
    rec.velocity_eci_km_s = require_vec3(obj, "velocity_km_s", i);
    if (rec.orbit_number < 0) {
      throw DataError("entry " + std::to_string(i) + ": negative orbit_number");
    }
    auto& list = out[sat];
    if (!list.empty()) {
      if (rec.timestamp_ms == list.back().timestamp_ms) {
        throw DataError("satellite " + sat + ": duplicate timestamp " +
                        std::to_string(rec.timestamp_ms));
      }
      if (rec.timestamp_ms < list.back().timestamp_ms) {
        throw DataError("satellite " + sat + ": non-monotone timestamp at entry " +
                        std::to_string(i));
      }
    }
    list.push_back(rec);
    ++i;
  }
  return out;
}

EphemerisMap parse_ephemeris(const std::string& path) {
  return parse_ephemeris_text(read_file(path));
}

std::string serialize_ephemeris(const EphemerisMap& ephemeris) {
  json root = json::array();
  for (const auto& [sat, records] : ephemeris) {
    for (const auto& r : records) {
      root.push_back(json{
          {"satellite_id", sat},
          {"orbit_number", r.orbit_number},
          {"timestamp_ms", r.timestamp_ms},
          {"position_km", {r.position_eci_km.x, r.position_eci_km.y, r.position_eci_km.z}},
          {"velocity_km_s",
           {r.velocity_eci_km_s.x, r.velocity_eci_km_s.y, r.velocity_eci_km_s.z}},
      });
    }
  }
  return canonical_dump(root);
}

std::vector<AcquisitionRequest> parse_requests_text(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_array()) throw ParseError("requests file must be a JSON array");
  std::vector<AcquisitionRequest> out;
  std::size_t i = 0;
  for (const auto& obj : root) {
    AcquisitionRequest r;
    r.request_id = require_string(obj, "request_id", i);
    r.priority = static_cast<int>(require_number(obj, "priority", i));
    if (r.priority < 1 || r.priority > 4) {
      throw DataError("request " + r.request_id + ": priority outside 1-4");
    }
    r.dto_start_ms = static_cast<std::int64_t>(require_number(obj, "dto_start_ms", i));
    r.dto_end_ms = static_cast<std::int64_t>(require_number(obj, "dto_end_ms", i));
    if (r.dto_start_ms >= r.dto_end_ms) {
      throw DataError("request " + r.request_id + ": empty DTO window");
    }
    for (const char* field : {"median_start", "median_end"}) {
      if (!obj.contains(field) || !obj[field].is_object()) {
        throw ParseError("entry " + std::to_string(i) + ": missing object field '" + field + "'");
      }
      const auto& p = obj[field];
      GeoPoint gp;
      try {
        gp = GeoPoint(p.at("lat").get<double>(), p.at("lon").get<double>());
      } catch (const std::exception& e) {
        throw DataError("request " + r.request_id + ": bad " + field + ": " + e.what());
      }
      if (std::string(field) == "median_start") {
        r.median_start = gp;
      } else {
        r.median_end = gp;
      }
    }
    r.satellite_id = require_string(obj, "satellite_id", i);
    r.completed = obj.value("completed", false);
    out.push_back(std::move(r));
    ++i;
  }
  return out;
}

std::vector<AcquisitionRequest> parse_requests(const std::string& path) {
  return parse_requests_text(read_file(path));
}

std::string serialize_requests(const std::vector<AcquisitionRequest>& requests) {
  json root = json::array();
  for (const auto& r : requests) {
    root.push_back(json{
        {"request_id", r.request_id},
        {"priority", r.priority},
        {"dto_start_ms", r.dto_start_ms},
        {"dto_end_ms", r.dto_end_ms},
        {"median_start", {{"lat", r.median_start.latitude_deg}, {"lon", r.median_start.longitude_deg}}},
        {"median_end", {{"lat", r.median_end.latitude_deg}, {"lon", r.median_end.longitude_deg}}},
        {"satellite_id", r.satellite_id},
        {"completed", r.completed},
    });
  }
  return canonical_dump(root);
}

std::string serialize_plan(const Plan& plan) {
  json sats = json::object();
  for (const auto& [sat, acqs] : plan.satellites) {
    json list = json::array();
    for (const auto& a : acqs) {
      list.push_back(json{
          {"request_id", a.request_id},
          {"acquisition_start_ms", a.acquisition_start_ms},
          {"acquisition_duration_ms", a.acquisition_duration_ms},
          {"relay_duration_s", a.relay_duration_s_from_previous},
          {"start_attitude", attitude_to_json(a.start_attitude)},
          {"end_attitude", attitude_to_json(a.end_attitude)},
      });
    }
    sats[sat] = std::move(list);
  }
  json stats = json::object();
  for (int p = 0; p < 4; ++p) {
    stats["p" + std::to_string(p + 1)] = json{{"total", plan.stats[p].total},
                                              {"completed", plan.stats[p].completed},
                                              {"rate", plan.stats[p].rate()}};
  }
  return canonical_dump(json{{"satellites", sats}, {"stats", stats}});
}

Plan parse_plan_text(const std::string& text) {
  const json root = parse_json(text);
  Plan plan;
  for (const auto& [sat, list] : root.at("satellites").items()) {
    std::vector<ChainedAcquisition>& acqs = plan.satellites[sat];
    for (const auto& obj : list) {
      ChainedAcquisition a;
      a.request_id = obj.at("request_id").get<std::string>();
      a.acquisition_start_ms = obj.at("acquisition_start_ms").get<std::int64_t>();
      a.acquisition_duration_ms = obj.at("acquisition_duration_ms").get<std::int64_t>();
      a.relay_duration_s_from_previous = obj.at("relay_duration_s").get<std::int64_t>();
      a.start_attitude = attitude_from_json(obj.at("start_attitude"));
      a.end_attitude = attitude_from_json(obj.at("end_attitude"));
      acqs.push_back(std::move(a));
    }
  }
  for (int p = 0; p < 4; ++p) {
    const auto& s = root.at("stats").at("p" + std::to_string(p + 1));
    plan.stats[p].total = s.at("total").get<int>();
    plan.stats[p].completed = s.at("completed").get<int>();
  }
  return plan;
}

// --- generation ----------------------------------------------------------

namespace {

Vec3 rotate_towards(const Vec3& unit_from, const Vec3& unit_towards, double angle_rad) {
  return unit_from * std::cos(angle_rad) + unit_towards * std::sin(angle_rad);
}

}  // namespace

ProblemInstance generate_instance(const GeneratorOptions& options) {
  if (options.n_satellites < 1) throw std::invalid_argument("n_satellites must be >= 1");
  if (options.n_requests < 0) throw std::invalid_argument("n_requests must be >= 0");
  double mix_sum = 0.0;
  for (double m : options.priority_mix) mix_sum += m;
  if (std::abs(mix_sum - 1.0) > 1e-9) throw std::invalid_argument("priority_mix must sum to 1");

  Rng rng(options.seed);
  ProblemInstance instance;

  const double period_s = constants::kOrbitPeriodS;
  const double omega = constants::kOrbitAngularRateRadS;
  const double a_km = std::cbrt(constants::kMuEarthKm3S2 * (period_s / (2.0 * constants::kPi)) *
                                (period_s / (2.0 * constants::kPi)));
  const std::int64_t t0 = kGeneratorEpochMs;
  const std::int64_t t_end = t0 + options.span_s * 1000;

  std::vector<std::string> sat_ids;
  for (int s = 0; s < options.n_satellites; ++s) {
    const std::string sat_id = "S" + std::to_string(s + 1);
    sat_ids.push_back(sat_id);
    // Near-polar circular orbit along the terminator; planes a few degrees
    // apart, phases randomized.
    const double raan = deg2rad(5.0 * s);
    const double phase = rng.uniform(0.0, 2.0 * constants::kPi);
    const Vec3 e1{std::cos(raan), std::sin(raan), 0.0};
    const Vec3 e2{0.0, 0.0, 1.0};
    std::vector<EphemerisRecord>& records = instance.satellites[sat_id];
    for (std::int64_t t = t0; t <= t_end; t += options.ephemeris_step_s * 1000) {
      const double u = omega * static_cast<double>(t - t0) / 1000.0 + phase;
      EphemerisRecord rec;
      rec.timestamp_ms = t;
      rec.orbit_number = static_cast<int>((t - t0) / static_cast<std::int64_t>(period_s * 1000.0));
      rec.position_eci_km = e1 * (a_km * std::cos(u)) + e2 * (a_km * std::sin(u));
      rec.velocity_eci_km_s = e1 * (-a_km * omega * std::sin(u)) + e2 * (a_km * omega * std::cos(u));
      records.push_back(rec);
    }
  }

  const std::int64_t margin_ms = 900'000;
  std::vector<AcquisitionRequest> requests;
  int made = 0;
  while (made < options.n_requests) {
    const std::size_t sat_index = static_cast<std::size_t>(rng.uniform_int(sat_ids.size()));
    const std::string& sat_id = sat_ids[sat_index];
    const auto& eph = instance.satellites.at(sat_id);
    const std::int64_t t_mid =
        t0 + margin_ms +
        static_cast<std::int64_t>(rng.uniform() *
                                  static_cast<double>(t_end - t0 - 2 * margin_ms));
    const double cross_deg = rng.uniform(-4.5, 4.5);
    const double length_km = rng.uniform(10.0, 60.0);
    const double priority_draw = rng.uniform();

    const SatelliteState st = interpolate_state(eph, t_mid);
    const Vec3 p_hat = normalized(st.position_eci_km);
    const Vec3 t_hat = normalized(st.velocity_eci_km_s -
                                  p_hat * dot(st.velocity_eci_km_s, p_hat));
    const Vec3 c_hat = normalized(cross(p_hat, t_hat));

    const Vec3 mid_dir = rotate_towards(p_hat, c_hat, deg2rad(cross_deg));
    const Vec3 along = normalized(t_hat - mid_dir * dot(t_hat, mid_dir));
    const double half_angle = length_km / (2.0 * constants::kEarthRadiusKm);
    const Vec3 start_dir = rotate_towards(mid_dir, along, -half_angle);
    const Vec3 end_dir = rotate_towards(mid_dir, along, half_angle);

    AcquisitionRequest r;
    r.median_start = eci_to_geodetic(start_dir * constants::kEarthRadiusKm, t_mid);
    r.median_end = eci_to_geodetic(end_dir * constants::kEarthRadiusKm, t_mid);
    const GeoPoint midpoint = eci_to_geodetic(mid_dir * constants::kEarthRadiusKm, t_mid);

    DtoWindow window;
    try {
      window = compute_dto_window(midpoint, eph, t_mid - 1'500'000, t_mid + 1'500'000);
    } catch (const NoOpportunityError&) {
      continue;  // offset too wide for this pass; redraw
    }
    const std::int64_t tau = r.acquisition_ms();
    if (window.end_ms - window.start_ms < tau + 5000) continue;

    r.dto_start_ms = window.start_ms;
    r.dto_end_ms = window.end_ms;
    r.satellite_id = sat_id;
    double cum = 0.0;
    r.priority = 4;
    for (int p = 0; p < 4; ++p) {
      cum += options.priority_mix[p];
      if (priority_draw < cum) {
        r.priority = p + 1;
        break;
      }
    }
    r.completed = false;
    requests.push_back(std::move(r));
    ++made;
  }

  std::sort(requests.begin(), requests.end(),
            [](const AcquisitionRequest& a, const AcquisitionRequest& b) {
              if (a.dto_start_ms != b.dto_start_ms) return a.dto_start_ms < b.dto_start_ms;
              if (a.satellite_id != b.satellite_id) return a.satellite_id < b.satellite_id;
              return a.dto_end_ms < b.dto_end_ms;
            });
  for (std::size_t i = 0; i < requests.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "R%05zu", i);
    requests[i].request_id = buf;
  }
  instance.requests = std::move(requests);
  return instance;
}

// --- plan bookkeeping -----------------------------------------------------

void compute_stats(Plan& plan, const ProblemInstance& instance) {
  plan.stats = {};
  std::set<std::string> done;
  for (const auto& [_, acqs] : plan.satellites) {
    for (const auto& a : acqs) done.insert(a.request_id);
  }
  for (const auto& r : instance.requests) {
    if (r.completed) continue;  // pre-completed requests are not planned
    auto& s = plan.stats[r.priority - 1];
    s.total += 1;
    if (done.count(r.request_id)) s.completed += 1;
  }
}

ValidationReport validate_plan(const Plan& plan, const ProblemInstance& instance) {
  ValidationReport report;
  auto add = [&report](const std::string& rule, const std::string& id, const std::string& msg) {
    report.violations.push_back({rule, id, msg});
  };

  std::set<std::string> seen;
  for (const auto& [sat, acqs] : plan.satellites) {
    const auto eph_it = instance.satellites.find(sat);
    if (eph_it == instance.satellites.end()) {
      add("structural", "", "plan references unknown satellite " + sat);
      continue;
    }
    const auto& eph = eph_it->second;
    const AcquisitionRequest* prev = nullptr;
    std::int64_t prev_end_ms = 0;

    for (const auto& acq : acqs) {
      const AcquisitionRequest* req = instance.find_request(acq.request_id);
      if (req == nullptr) {
        add("structural", acq.request_id, "request not present in instance");
        continue;
      }
      if (req->satellite_id != sat) {
        add("satellite_assignment", acq.request_id,
            "request assigned to " + req->satellite_id + " but planned on " + sat);
      }
      if (req->completed) {
        add("completed_input", acq.request_id, "request was already completed in the input");
      }
      if (!seen.insert(acq.request_id).second) {
        add("duplicate_request", acq.request_id, "request appears more than once");
      }
      if (acq.acquisition_start_ms < req->dto_start_ms ||
          acq.acquisition_start_ms + acq.acquisition_duration_ms > req->dto_end_ms) {
        add("dto_containment", acq.request_id, "acquisition leaves the DTO window");
      }
      if (acq.acquisition_duration_ms != req->acquisition_ms()) {
        add("duration_mismatch", acq.request_id, "stored duration differs from the median-line duration");
      }
      if (prev != nullptr) {
        if (acq.acquisition_start_ms <= prev_end_ms - prev->acquisition_ms()) {
          add("monotone_start", acq.request_id, "start times do not strictly increase");
        }
        const auto t_min = min_relay_time(prev_end_ms, prev->geometry(), req->geometry(), eph);
        if (!t_min.has_value()) {
          add("chaining", acq.request_id, "no feasible relay from previous acquisition");
        } else if (acq.acquisition_start_ms < prev_end_ms + *t_min * 1000) {
          add("chaining", acq.request_id,
              "relay shorter than the minimum relay time (" + std::to_string(*t_min) + " s)");
        }
        if (req->priority < prev->priority) {
          report.notes.push_back("priority inversion: " + acq.request_id + " (p" +
                                 std::to_string(req->priority) + ") follows " + prev->request_id +
                                 " (p" + std::to_string(prev->priority) + ")");
        }
      }
      prev = req;
      prev_end_ms = acq.acquisition_start_ms + acq.acquisition_duration_ms;
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace orbitsched
