#pragma once
#include "leofl/orbital.hpp"
#include "leofl/resource.hpp"

#include <map>
#include <vector>

namespace leofl {

// link constants shared by every satellite-gateway pair
struct LinkParams {
    double model_bits = 0.0;        // serialized ParamVector size, both directions
    double bandwidth_hz = 0.0;      // B_{s,g} = B_tot (single association)
    double sat_gain_dbi = 0.0;      // G_s
    double pathloss_db = 0.0;       // PL
    double tx_power_w = 1.0;
    double cycles_per_sample = 0.0; // C_d
    double carrier_hz = 0.0;        // f
    double doppler_hz = 0.0;        // nu
};

struct AssociationPlan {
    std::map<int, int> assignments;      // satellite id -> gateway id; absent = uncovered
    std::map<int, ComputePlan> plans;    // per assigned satellite
};

// Assign each covered satellite to the gateway with the longest remaining window
// (ties to the lowest gateway id), then allocate frequency and epochs.
AssociationPlan associate(const std::vector<SatelliteState>& sats,
                          const std::vector<GatewayConfig>& gws,
                          const LinkParams& link);

// Benchmark: same allocation step, but assignment by smallest 3D distance.
AssociationPlan nearest_associate(const std::vector<SatelliteState>& sats,
                                  const std::vector<GatewayConfig>& gws,
                                  const LinkParams& link);

} // namespace leofl
