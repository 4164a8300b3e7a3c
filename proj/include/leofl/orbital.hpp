#pragma once
#include <cstdint>

namespace leofl {

struct GroundPoint {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_km = 0.0;   // 0 for gateways on the ground plane
};

// circular track at fixed altitude over the z=0 plane
struct OrbitTrack {
    GroundPoint center;            // ground-plane projection of the orbit center
    double radius_km = 0.0;
    double altitude_km = 0.0;
    double angular_speed_rad_s = 0.0;   // v / radius
};

struct SatelliteState {
    int id = 0;
    OrbitTrack track;
    double phase_rad = 0.0;        // in [0, 2pi)
    int direction = +1;            // +1 counterclockwise, -1 clockwise
    long data_count = 0;           // D_s, samples
    double energy_budget_j = 0.0;  // E^m_s
    double max_freq_hz = 0.0;      // C^m_s
    double chip_const = 0.0;       // eps_s, J s^2 / cycles / Hz^2
};

struct GatewayConfig {
    int id = 0;
    GroundPoint position;
    double coverage_radius_km = 0.0;
    int n_antennas_x = 1;
    int n_antennas_y = 1;
    int n_beams = 1;
    double noise_power_w = 0.0;    // sigma^2
    double antenna_gain_dbi = 0.0; // G_g
};

double orbit_period_s(const OrbitTrack& track);

// position after t seconds of travel from the current phase
GroundPoint position_at(const SatelliteState& sat, double t_s);

// ground-plane (x,y) projection distance <= coverage radius; boundary counts as covered
bool in_coverage(const GroundPoint& sat_pos, const GatewayConfig& gw);

// remaining time inside gw's coverage disk from the current phase, traveling in
// `direction`; capped at one orbital period when the track never exits.
// throws NotInCoverage when the satellite is currently outside the disk.
double window_time(const SatelliteState& sat, const GatewayConfig& gw);

// straight-line distance from the satellite's current 3D position to the gateway
double slant_distance_km(const GroundPoint& sat_pos, const GatewayConfig& gw);

} // namespace leofl
