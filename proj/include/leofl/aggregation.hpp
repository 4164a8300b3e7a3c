#pragma once
#include <string>
#include <vector>

namespace leofl {

struct ParamVector {
    std::vector<double> values;
    std::string layout_tag;   // architecture fingerprint; must match across merges
};

struct ClientReport {
    ParamVector params;
    long data_count = 0;   // D_s
    long epochs = 0;       // K_s
    double loss = 0.0;     // L_s
};

enum class Scheme { FedAvg, FedAvep, FedIndi, FedLol, FedSEL };

struct AggregatorConfig {
    Scheme scheme = Scheme::FedSEL;
    double beta = 0.5;    // mass/loss blend in [0,1]
    double kappa = 0.5;   // epoch exponent >= 0
};

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

// D K^kappa / sum(D K^kappa)
std::vector<double> mass_share(const std::vector<ClientReport>& reports, double kappa);

// (sum L - L_i) / ((U-1) sum L); requires U >= 2 and sum L > 0
std::vector<double> loss_share(const std::vector<ClientReport>& reports);

// per-scheme weights; always a simplex. Single-report sets collapse to [1].
std::vector<double> subregion_weights(const std::vector<ClientReport>& reports,
                                      const AggregatorConfig& cfg);

// elementwise sum of w_s * params_s
ParamVector merge(const std::vector<ClientReport>& reports,
                  const std::vector<double>& weights);

// W_g = sum_s D K^kappa / sum_g sum_s D K^kappa
std::vector<double> global_weights(
    const std::vector<std::vector<ClientReport>>& per_gateway_reports, double kappa);

ParamVector global_merge(const std::vector<ParamVector>& gateway_models,
                         const std::vector<double>& weights);

} // namespace leofl
