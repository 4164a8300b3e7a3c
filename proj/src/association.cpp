#include "leofl/association.hpp"
#include "leofl/errors.hpp"
#include "leofl/linkmodel.hpp"

#include <algorithm>
#include <cmath>

namespace leofl {

namespace {

const GatewayConfig* find_gateway(const std::vector<GatewayConfig>& gws, int id) {
    for (const auto& g : gws)
        if (g.id == id) return &g;
    return nullptr;
}

// window-based (proposed) or distance-based (nearest) gateway choice
std::map<int, int> assign(const std::vector<SatelliteState>& sats,
                          const std::vector<GatewayConfig>& gws,
                          bool by_window) {
    std::map<int, int> assignments;
    for (const auto& sat : sats) {
        const GroundPoint pos = position_at(sat, 0.0);
        int best_id = -1;
        double best_score = 0.0;
        for (const auto& gw : gws) {
            if (!in_coverage(pos, gw)) continue;
            // longer window wins; shorter distance wins (negated for one argmax)
            const double score = by_window ? window_time(sat, gw)
                                           : -slant_distance_km(pos, gw);
            if (best_id < 0 || score > best_score ||
                (score == best_score && gw.id < best_id)) {
                best_id = gw.id;
                best_score = score;
            }
        }
        if (best_id >= 0) assignments[sat.id] = best_id;
    }
    return assignments;
}

AssociationPlan allocate(const std::vector<SatelliteState>& sats,
                         const std::vector<GatewayConfig>& gws,
                         const LinkParams& link,
                         std::map<int, int> assignments) {
    AssociationPlan plan;
    plan.assignments = std::move(assignments);

    // subcarrier index = position in the gateway's association list (sat-id order)
    std::map<int, std::vector<int>> members;   // gateway id -> satellite ids
    std::map<int, int> subcarrier;             // satellite id -> index
    for (const auto& [sid, gid] : plan.assignments) {
        subcarrier[sid] = static_cast<int>(members[gid].size());
        members[gid].push_back(sid);
    }

    for (const auto& sat : sats) {
        auto it = plan.assignments.find(sat.id);
        if (it == plan.assignments.end()) continue;
        const GatewayConfig* gw = find_gateway(gws, it->second);
        if (!gw) continue;

        const GroundPoint pos = position_at(sat, 0.0);
        const double window = window_time(sat, *gw);
        const double dist = slant_distance_km(pos, *gw);

        const double gain = channel_gain(link.sat_gain_dbi, gw->antenna_gain_dbi,
                                         link.pathloss_db);
        const double signal = gain * gain * link.tx_power_w;

        // cross-gateway satellites on the same subcarrier index interfere;
        // their channel into this gateway carries the same fixed-PL gain
        const int idx = subcarrier[sat.id];
        std::vector<double> interferers;
        for (const auto& [gid, list] : members) {
            if (gid == it->second) continue;
            if (idx < static_cast<int>(list.size()))
                interferers.push_back(gain * gain * link.tx_power_w);
        }

        const double gamma = sinr(signal, interferers, gw->noise_power_w);
        const double rate = achievable_rate(true, link.bandwidth_hz, gamma);
        if (rate <= 0.0) continue;

        const double up = transfer_time(link.model_bits, rate, dist);
        const double down = up;   // broadcast carries the same serialized model
        const double t_eff = window - up - down;
        if (t_eff <= 0.0) continue;

        ComputePlan cp;
        cp.window_s = window;
        cp.uplink_s = up;
        cp.downlink_s = down;
        cp.freq_hz = optimal_frequency(sat.energy_budget_j, sat.chip_const, window,
                                       up, down, sat.max_freq_hz);
        if (cp.freq_hz <= 0.0) continue;   // zero energy budget
        cp.epoch_time_s = epoch_time(sat.data_count, link.cycles_per_sample, cp.freq_hz);
        cp.epoch_energy_j = epoch_energy(sat.chip_const, cp.freq_hz,
                                         link.cycles_per_sample, sat.data_count);
        cp.epochs = sat.data_count == 0
            ? 0
            : epoch_count(sat.energy_budget_j, sat.chip_const, cp.freq_hz,
                          link.cycles_per_sample, sat.data_count, t_eff);
        // the time budget is stated on the full window; trim if summing differs
        while (cp.epochs > 0 &&
               cp.downlink_s + static_cast<double>(cp.epochs) * cp.epoch_time_s +
                       cp.uplink_s > cp.window_s)
            --cp.epochs;
        plan.plans[sat.id] = cp;
    }
    return plan;
}

} // namespace

AssociationPlan associate(const std::vector<SatelliteState>& sats,
                          const std::vector<GatewayConfig>& gws,
                          const LinkParams& link) {
    return allocate(sats, gws, link, assign(sats, gws, /*by_window=*/true));
}

AssociationPlan nearest_associate(const std::vector<SatelliteState>& sats,
                                  const std::vector<GatewayConfig>& gws,
                                  const LinkParams& link) {
    return allocate(sats, gws, link, assign(sats, gws, /*by_window=*/false));
}

} // namespace leofl
