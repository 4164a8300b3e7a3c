#pragma once
#include <complex>
#include <vector>

namespace leofl {

inline constexpr double kSpeedOfLightKmS = 299792.458;

struct ChannelRealization {
    double gain = 0.0;        // dimensionless magnitude g_{s,g}
    double doppler_hz = 0.0;  // nu_{s,g}
    double delay_s = 0.0;     // tau_{s,g}
    double carrier_hz = 0.0;  // f
    double time_s = 0.0;      // t
};

struct LinkBudget {
    double sinr = 0.0;          // linear gamma_{s,g}
    double bandwidth_hz = 0.0;  // B_{s,g}
    double rate_bps = 0.0;      // R_{s,g}
    double uplink_s = 0.0;      // t^{s->g}
    double downlink_s = 0.0;    // t^{g->s}
    double distance_km = 0.0;   // d_{s,g}
};

// sqrt(10^(Gs/10) * 10^(Gg/10)) * 10^(-PL/10)
double channel_gain(double sat_gain_dbi, double gw_gain_dbi, double pathloss_db);

// gain * e^{j 2 pi (t nu - f tau)}
std::complex<double> channel_at(double gain, double doppler_hz, double delay_s,
                                double t_s, double carrier_hz);

// signal / (noise + sum of interferers); throws NonPositiveNoise
double sinr(double signal_power_w, const std::vector<double>& interferer_powers_w,
            double noise_power_w);

// chi * B * log2(1 + gamma); 0 when not associated
double achievable_rate(bool assoc, double bandwidth_hz, double sinr_linear);

// serialization + propagation; throws ZeroRate
double transfer_time(double model_bits, double rate_bps, double distance_km);

// true iff every satellite's summed allocation fits the budget B_tot
bool bandwidth_check(const std::vector<std::vector<double>>& allocations_per_sat_hz,
                     double budget_hz);

} // namespace leofl
