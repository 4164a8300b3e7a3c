#include "leofl/resource.hpp"
#include "leofl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leofl {

double epoch_time(long data_count, double cycles_per_sample, double freq_hz) {
    if (freq_hz <= 0.0)
        throw ZeroFrequency("computing frequency must be > 0");
    return static_cast<double>(data_count) * cycles_per_sample / freq_hz;
}

double epoch_energy(double chip_const, double freq_hz, double cycles_per_sample,
                    long data_count) {
    return chip_const * freq_hz * freq_hz * cycles_per_sample *
           static_cast<double>(data_count);
}

double optimal_frequency(double energy_budget_j, double chip_const, double window_s,
                         double uplink_s, double downlink_s, double max_freq_hz) {
    const double t_eff = window_s - uplink_s - downlink_s;
    if (t_eff <= 0.0)
        throw WindowTooShort("window leaves no compute time");
    const double unclamped = std::cbrt(energy_budget_j / (chip_const * t_eff));
    return std::min(max_freq_hz, unclamped);
}

long epoch_count(double energy_budget_j, double chip_const, double freq_hz,
                 double cycles_per_sample, long data_count,
                 double effective_window_s) {
    if (data_count == 0)
        throw NoData("satellite has no training data");
    if (freq_hz <= 0.0)
        throw ZeroFrequency("computing frequency must be > 0");

    const double e_epoch = epoch_energy(chip_const, freq_hz, cycles_per_sample, data_count);
    const double t_epoch = epoch_time(data_count, cycles_per_sample, freq_hz);

    long k_energy = e_epoch > 0.0
        ? static_cast<long>(std::floor(energy_budget_j / e_epoch))
        : std::numeric_limits<long>::max() / 4;
    long k_time = t_epoch > 0.0
        ? static_cast<long>(std::floor(effective_window_s / t_epoch))
        : std::numeric_limits<long>::max() / 4;

    long k = std::max(std::min(k_energy, k_time), 0l);
    // flooring in floating point can land one epoch over either budget
    while (k > 0 && static_cast<double>(k) * e_epoch > energy_budget_j) --k;
    while (k > 0 && static_cast<double>(k) * t_epoch > effective_window_s) --k;
    return k;
}

} // namespace leofl
