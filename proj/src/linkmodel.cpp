#include "leofl/linkmodel.hpp"
#include "leofl/errors.hpp"

#include <cmath>
#include <numbers>

namespace leofl {

double channel_gain(double sat_gain_dbi, double gw_gain_dbi, double pathloss_db) {
    const double g_lin = std::sqrt(std::pow(10.0, sat_gain_dbi / 10.0) *
                                   std::pow(10.0, gw_gain_dbi / 10.0));
    return g_lin * std::pow(10.0, -pathloss_db / 10.0);
}

std::complex<double> channel_at(double gain, double doppler_hz, double delay_s,
                                double t_s, double carrier_hz) {
    const double cycles = t_s * doppler_hz - carrier_hz * delay_s;
    const double phase = 2.0 * std::numbers::pi * cycles;
    return std::polar(gain, phase);
}

double sinr(double signal_power_w, const std::vector<double>& interferer_powers_w,
            double noise_power_w) {
    if (noise_power_w <= 0.0)
        throw NonPositiveNoise("noise power must be > 0");
    double denom = noise_power_w;
    for (double p : interferer_powers_w) denom += p;
    return signal_power_w / denom;
}

double achievable_rate(bool assoc, double bandwidth_hz, double sinr_linear) {
    if (!assoc) return 0.0;
    return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

double transfer_time(double model_bits, double rate_bps, double distance_km) {
    if (rate_bps <= 0.0)
        throw ZeroRate("transfer rate must be > 0");
    return model_bits / rate_bps + distance_km / kSpeedOfLightKmS;
}

bool bandwidth_check(const std::vector<std::vector<double>>& allocations_per_sat_hz,
                     double budget_hz) {
    for (const auto& sat_alloc : allocations_per_sat_hz) {
        double total = 0.0;
        for (double b : sat_alloc) total += b;
        if (total > budget_hz) return false;
    }
    return true;
}

} // namespace leofl
