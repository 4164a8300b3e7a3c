#include "leofl/aggregation.hpp"
#include "leofl/errors.hpp"

#include <cmath>
#include <cstddef>

namespace leofl {

Scheme scheme_from_name(const std::string& name) {
    if (name == "fedavg") return Scheme::FedAvg;
    if (name == "fedavep") return Scheme::FedAvep;
    if (name == "fedindi") return Scheme::FedIndi;
    if (name == "fedlol") return Scheme::FedLol;
    if (name == "fedsel") return Scheme::FedSEL;
    throw Error("unknown aggregation scheme: " + name);
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::FedAvg: return "fedavg";
        case Scheme::FedAvep: return "fedavep";
        case Scheme::FedIndi: return "fedindi";
        case Scheme::FedLol: return "fedlol";
        case Scheme::FedSEL: return "fedsel";
    }
    return "?";
}

std::vector<double> mass_share(const std::vector<ClientReport>& reports, double kappa) {
    std::vector<double> mass(reports.size());
    double total = 0.0;
    for (size_t i = 0; i < reports.size(); ++i) {
        mass[i] = static_cast<double>(reports[i].data_count) *
                  std::pow(static_cast<double>(reports[i].epochs), kappa);
        total += mass[i];
    }
    if (total <= 0.0)
        throw AllZeroMass("all reports carry zero D*K^kappa mass");
    for (double& m : mass) m /= total;
    return mass;
}

std::vector<double> loss_share(const std::vector<ClientReport>& reports) {
    const size_t u = reports.size();
    if (u < 2)
        throw Error("loss share needs at least two reports");
    double total = 0.0;
    for (const auto& r : reports) total += r.loss;
    if (total <= 0.0)
        throw ZeroTotalLoss("loss term undefined when total loss is 0");
    std::vector<double> share(u);
    for (size_t i = 0; i < u; ++i)
        share[i] = (total - reports[i].loss) / ((static_cast<double>(u) - 1.0) * total);
    return share;
}

std::vector<double> subregion_weights(const std::vector<ClientReport>& reports,
                                      const AggregatorConfig& cfg) {
    if (reports.empty())
        throw EmptyReportSet("no client reports to weight");
    const size_t u = reports.size();
    if (u == 1)
        return {1.0};   // single client: weighting degenerates to passthrough

    switch (cfg.scheme) {
        case Scheme::FedAvg: {
            std::vector<double> w(u);
            double total = 0.0;
            for (size_t i = 0; i < u; ++i) {
                w[i] = static_cast<double>(reports[i].data_count);
                total += w[i];
            }
            if (total <= 0.0)
                throw AllZeroMass("all reports carry zero samples");
            for (double& x : w) x /= total;
            return w;
        }
        case Scheme::FedAvep:
            return mass_share(reports, cfg.kappa);
        case Scheme::FedLol:
            return loss_share(reports);
        case Scheme::FedSEL: {
            const auto mass = mass_share(reports, cfg.kappa);
            if (cfg.beta >= 1.0) return mass;   // loss term vanishes at beta=1
            const auto loss = loss_share(reports);
            std::vector<double> w(u);
            for (size_t i = 0; i < u; ++i)
                w[i] = cfg.beta * mass[i] + (1.0 - cfg.beta) * loss[i];
            return w;
        }
        case Scheme::FedIndi: {
            // independently normalized sample, epoch, and inverse-loss shares
            const auto loss = loss_share(reports);
            std::vector<double> dshare(u), kshare(u);
            double dtot = 0.0, ktot = 0.0;
            for (size_t i = 0; i < u; ++i) {
                dshare[i] = static_cast<double>(reports[i].data_count);
                kshare[i] = std::pow(static_cast<double>(reports[i].epochs), cfg.kappa);
                dtot += dshare[i];
                ktot += kshare[i];
            }
            if (dtot <= 0.0 || ktot <= 0.0)
                throw AllZeroMass("zero total sample or epoch share");
            std::vector<double> w(u);
            double wtot = 0.0;
            for (size_t i = 0; i < u; ++i) {
                w[i] = (dshare[i] / dtot) * (kshare[i] / ktot) * loss[i];
                wtot += w[i];
            }
            if (wtot <= 0.0)
                throw AllZeroMass("product shares are all zero");
            for (double& x : w) x /= wtot;
            return w;
        }
    }
    throw Error("unhandled aggregation scheme");
}

ParamVector merge(const std::vector<ClientReport>& reports,
                  const std::vector<double>& weights) {
    if (reports.empty())
        throw EmptyReportSet("nothing to merge");
    if (reports.size() != weights.size())
        throw UnnormalizedWeights("weight count does not match report count");
    double total = 0.0;
    for (double w : weights) total += w;
    if (std::abs(total - 1.0) > 1e-9)
        throw UnnormalizedWeights("weights sum to " + std::to_string(total));

    const auto& tag = reports.front().params.layout_tag;
    const size_t n = reports.front().params.values.size();
    for (const auto& r : reports)
        if (r.params.layout_tag != tag || r.params.values.size() != n)
            throw LayoutMismatch("parameter layouts differ across reports");

    ParamVector out;
    out.layout_tag = tag;
    out.values.assign(n, 0.0);
    for (size_t s = 0; s < reports.size(); ++s) {
        const double w = weights[s];
        const auto& v = reports[s].params.values;
        for (size_t i = 0; i < n; ++i) out.values[i] += w * v[i];
    }
    return out;
}

std::vector<double> global_weights(
    const std::vector<std::vector<ClientReport>>& per_gateway_reports, double kappa) {
    std::vector<double> mass(per_gateway_reports.size(), 0.0);
    double total = 0.0;
    for (size_t g = 0; g < per_gateway_reports.size(); ++g) {
        for (const auto& r : per_gateway_reports[g])
            mass[g] += static_cast<double>(r.data_count) *
                       std::pow(static_cast<double>(r.epochs), kappa);
        total += mass[g];
    }
    if (total <= 0.0)
        throw AllZeroMass("no gateway carries D*K^kappa mass");
    for (double& m : mass) m /= total;
    return mass;
}

ParamVector global_merge(const std::vector<ParamVector>& gateway_models,
                         const std::vector<double>& weights) {
    std::vector<ClientReport> as_reports(gateway_models.size());
    for (size_t g = 0; g < gateway_models.size(); ++g)
        as_reports[g].params = gateway_models[g];
    return merge(as_reports, weights);
}

} // namespace leofl
