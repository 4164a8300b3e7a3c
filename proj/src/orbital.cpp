#include "leofl/orbital.hpp"
#include "leofl/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace leofl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double orbit_period_s(const OrbitTrack& track) {
    return kTwoPi / track.angular_speed_rad_s;
}

GroundPoint position_at(const SatelliteState& sat, double t_s) {
    const double phase = std::fmod(
        sat.phase_rad + sat.direction * sat.track.angular_speed_rad_s * t_s, kTwoPi);
    return GroundPoint{
        sat.track.center.x_km + sat.track.radius_km * std::cos(phase),
        sat.track.center.y_km + sat.track.radius_km * std::sin(phase),
        sat.track.altitude_km,
    };
}

bool in_coverage(const GroundPoint& sat_pos, const GatewayConfig& gw) {
    const double dx = sat_pos.x_km - gw.position.x_km;
    const double dy = sat_pos.y_km - gw.position.y_km;
    return std::hypot(dx, dy) <= gw.coverage_radius_km;
}

double slant_distance_km(const GroundPoint& sat_pos, const GatewayConfig& gw) {
    const double dx = sat_pos.x_km - gw.position.x_km;
    const double dy = sat_pos.y_km - gw.position.y_km;
    const double dz = sat_pos.z_km - gw.position.z_km;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double window_time(const SatelliteState& sat, const GatewayConfig& gw) {
    if (!in_coverage(position_at(sat, 0.0), gw))
        throw NotInCoverage("satellite " + std::to_string(sat.id) +
                            " outside coverage of gateway " + std::to_string(gw.id));

    const double r = sat.track.radius_km;
    const double R = gw.coverage_radius_km;
    const double ux = sat.track.center.x_km - gw.position.x_km;
    const double uy = sat.track.center.y_km - gw.position.y_km;
    const double d = std::hypot(ux, uy);
    const double period = orbit_period_s(sat.track);

    if (d < 1e-9)               // concentric: covered means the whole track is
        return period;

    // satellite-to-gateway planar distance^2 = d^2 + r^2 + 2 r d cos(phase - alpha),
    // so the covered arc is (phase - alpha) mod 2pi in [theta0, 2pi - theta0]
    // with cos(theta0) = q
    const double q = (R * R - d * d - r * r) / (2.0 * r * d);
    if (q >= 1.0)               // disk contains the whole track
        return period;

    const double alpha = std::atan2(uy, ux);
    const double theta0 = std::acos(std::max(q, -1.0));
    double x = std::fmod(sat.phase_rad - alpha, kTwoPi);
    if (x < 0.0) x += kTwoPi;

    const double remaining_rad =
        sat.direction > 0 ? (kTwoPi - theta0) - x : x - theta0;
    // at the exit boundary the angular test can land epsilon past the arc
    return std::max(remaining_rad, 0.0) / sat.track.angular_speed_rad_s;
}

} // namespace leofl
