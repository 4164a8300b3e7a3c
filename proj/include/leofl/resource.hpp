#pragma once

namespace leofl {

struct ComputePlan {
    double freq_hz = 0.0;        // C_s
    long epochs = 0;             // K_s
    double epoch_time_s = 0.0;   // t_s = D C_d / C
    double epoch_energy_j = 0.0; // E_s = eps C^2 C_d D
    double window_s = 0.0;       // T_s
    double uplink_s = 0.0;       // t^{s->g}
    double downlink_s = 0.0;     // t^{g->s}
};

// D_s * C_d / C_s; throws ZeroFrequency
double epoch_time(long data_count, double cycles_per_sample, double freq_hz);

// eps * C^2 * C_d * D
double epoch_energy(double chip_const, double freq_hz, double cycles_per_sample,
                    long data_count);

// min(C^m, cbrt(E / (eps * (T - t_down - t_up)))); throws WindowTooShort
double optimal_frequency(double energy_budget_j, double chip_const, double window_s,
                         double uplink_s, double downlink_s, double max_freq_hz);

// largest integer K with K * epoch_energy <= budget and K * epoch_time <= window;
// throws NoData when data_count == 0, ZeroFrequency when freq_hz <= 0
long epoch_count(double energy_budget_j, double chip_const, double freq_hz,
                 double cycles_per_sample, long data_count,
                 double effective_window_s);

} // namespace leofl
