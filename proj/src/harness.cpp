#include "leofl/harness.hpp"
#include "leofl/errors.hpp"
#include "leofl/linkmodel.hpp"
#include "leofl/resource.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace leofl {

namespace {

int log_level() {   // 0 quiet, 1 info, 2 debug
    static const int level = [] {
        const char* env = std::getenv("LEOFL_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "%s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "%s\n", msg.c_str());
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void advance_phases(std::vector<SatelliteState>& sats, double dt_s) {
    for (auto& s : sats) {
        double ph = std::fmod(
            s.phase_rad + s.direction * s.track.angular_speed_rad_s * dt_s, kTwoPi);
        if (ph < 0.0) ph += kTwoPi;
        s.phase_rad = ph;
    }
}

RunResult run_impl(const Scenario& sc, const std::vector<GatewayConfig>& gateways,
                   const AggregatorConfig& agg) {
    if (sc.satellites.empty()) throw Error("scenario has no satellites");
    if (gateways.empty()) throw Error("scenario has no gateways");
    if (sc.global_rounds < 1 || sc.subregion_rounds < 1)
        throw Error("round counts must be >= 1");

    Dataset corpus = synthetic_tiles(sc.train_samples + sc.holdout_samples,
                                     sc.tile_side, derive_seed(sc.seed, kSeedData));
    Dataset train_all;
    train_all.samples.assign(corpus.samples.begin(),
                             corpus.samples.begin() + sc.train_samples);
    std::vector<std::vector<double>> holdout(
        corpus.samples.begin() + sc.train_samples, corpus.samples.end());

    const int n_sats = static_cast<int>(sc.satellites.size());
    auto shards = dirichlet_partition(train_all, n_sats, sc.dirichlet_lambda,
                                      derive_seed(sc.seed, kSeedPartition));

    std::vector<SatelliteState> sats = sc.satellites;   // shard i -> i-th satellite
    std::map<int, const Dataset*> shard_of;
    for (int i = 0; i < n_sats; ++i) {
        sats[i].data_count = static_cast<long>(shards[i].samples.size());
        shards[i].owner = sats[i].id;
        shard_of[sats[i].id] = &shards[i];
    }

    LinkParams link = sc.link;
    if (link.model_bits <= 0.0)
        link.model_bits = static_cast<double>(param_count(sc.arch)) * 64.0;

    ParamVector global = init_params(sc.arch, derive_seed(sc.seed, kSeedInit));

    std::mt19937_64 energy_rng(derive_seed(sc.seed, kSeedEnergy));
    std::normal_distribution<double> energy_draw(sc.energy_mean_j, sc.energy_std_j);

    RunResult result;

    for (long t = 0; t < sc.global_rounds; ++t) {
        for (auto& s : sats)
            s.energy_budget_j = std::max(sc.energy_floor_j, energy_draw(energy_rng));

        // broadcast the global model to every gateway
        std::map<int, ParamVector> gw_model;
        for (const auto& gw : gateways) gw_model[gw.id] = global;

        std::map<int, std::vector<ClientReport>> last_reports;
        RoundMetrics rm;
        rm.round = t;
        rm.subrounds = sc.subregion_rounds;

        for (long m = 0; m < sc.subregion_rounds; ++m) {
            const AssociationPlan plan =
                sc.association_mode == "nearest"
                    ? nearest_associate(sats, gateways, link)
                    : associate(sats, gateways, link);

            // satellites that actually train this sub-round, grouped per gateway
            std::map<int, std::vector<int>> members;
            for (const auto& [sid, gid] : plan.assignments) {
                auto pit = plan.plans.find(sid);
                if (pit == plan.plans.end() || pit->second.epochs < 1) continue;
                members[gid].push_back(sid);
            }

            std::map<int, std::future<ClientReport>> training;
            for (const auto& [gid, ids] : members) {
                for (int sid : ids) {
                    const ComputePlan& cp = plan.plans.at(sid);
                    TrainConfig cfg = sc.train;
                    cfg.seed = derive_seed(sc.seed, kSeedTrain,
                                           static_cast<std::uint64_t>(t) * 100000 +
                                               static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(sid));
                    const ParamVector& start = gw_model.at(gid);
                    training.emplace(sid, std::async(std::launch::async, [&, sid, cfg] {
                        return train_epochs(sc.arch, start, *shard_of.at(sid),
                                            plan.plans.at(sid).epochs, cfg);
                    }));
                    log_debug("round " + std::to_string(t) + "." + std::to_string(m) +
                              " sat " + std::to_string(sid) + " -> gw " +
                              std::to_string(gid) + " K=" + std::to_string(cp.epochs) +
                              " C=" + fmt6(cp.freq_hz) + "Hz window=" +
                              fmt6(cp.window_s) + "s");
                }
            }

            last_reports.clear();
            double span_s = 0.0;
            for (auto& [gid, ids] : members) {
                std::vector<ClientReport> reports;
                for (int sid : ids) {
                    ClientReport rep = training.at(sid).get();
                    const ComputePlan& cp = plan.plans.at(sid);
                    auto sit = std::find_if(sats.begin(), sats.end(),
                                            [sid](const SatelliteState& s) {
                                                return s.id == sid;
                                            });

                    // time feasibility: downlink + K t_s + uplink <= window
                    result.honesty_checks++;
                    const double used_time = cp.downlink_s +
                        static_cast<double>(cp.epochs) * cp.epoch_time_s + cp.uplink_s;
                    if (used_time > cp.window_s) {
                        result.honesty_violations++;
                        throw Error("time budget violated at round " +
                                    std::to_string(t) + ", satellite " +
                                    std::to_string(sid));
                    }
                    // energy feasibility: K E_s <= remaining budget
                    result.honesty_checks++;
                    const double used_energy =
                        static_cast<double>(cp.epochs) * cp.epoch_energy_j;
                    if (used_energy > sit->energy_budget_j) {
                        result.honesty_violations++;
                        throw Error("energy budget violated at round " +
                                    std::to_string(t) + ", satellite " +
                                    std::to_string(sid));
                    }
                    sit->energy_budget_j -= used_energy;

                    span_s = std::max(span_s, used_time);
                    rm.epochs_executed[sid] = cp.epochs;
                    rm.window_s[sid] = cp.window_s;
                    rm.freq_hz[sid] = cp.freq_hz;
                    reports.push_back(std::move(rep));
                }
                const auto weights = subregion_weights(reports, agg);
                gw_model[gid] = merge(reports, weights);
                rm.weights_used[gid] = weights;
                last_reports[gid] = std::move(reports);
            }

            advance_phases(sats, span_s > 0.0 ? span_s : 60.0);
        }

        // cloud merge over gateways that produced a sub-region model
        std::vector<std::vector<ClientReport>> per_gateway;
        std::vector<ParamVector> models;
        for (const auto& [gid, reports] : last_reports) {
            per_gateway.push_back(reports);
            models.push_back(gw_model.at(gid));
        }
        if (!per_gateway.empty()) {
            const auto gw_weights = global_weights(per_gateway, agg.kappa);
            global = global_merge(models, gw_weights);
        }

        for (const auto& [gid, reports] : last_reports) {
            double mean_loss = 0.0;
            for (const auto& r : reports) mean_loss += r.loss;
            rm.per_gateway_loss[gid] = mean_loss / static_cast<double>(reports.size());
        }

        for (std::size_t i = 0; i < sc.eval_snrs_db.size(); ++i) {
            const EvalStats st =
                evaluate(sc.arch, global, holdout, sc.eval_snrs_db[i],
                         derive_seed(sc.seed, kSeedEval, i));
            rm.global_psnr_db.push_back(st.psnr_db);
            rm.global_ssim.push_back(st.ssim);
        }

        std::ostringstream info;
        info << "round " << t << " participants " << rm.epochs_executed.size();
        if (!rm.global_psnr_db.empty())
            info << " psnr " << fmt6(rm.global_psnr_db.front()) << " dB @ "
                 << fmt6(sc.eval_snrs_db.front()) << " dB SNR";
        log_info(info.str());

        result.log.push_back(std::move(rm));
    }

    result.final_params = std::move(global);
    return result;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = splitmix64(master);
    x = splitmix64(x ^ (stream * 0xd1342543de82ef95ull));
    x = splitmix64(x ^ (a * 0xaf251af3b0f025b5ull));
    x = splitmix64(x ^ (b * 0x9e3779b97f4a7c15ull));
    return x;
}

RunResult run(const Scenario& scenario) {
    return run_impl(scenario, scenario.gateways, scenario.aggregator);
}

RunResult run_single_gateway(const Scenario& scenario, int gateway_id) {
    std::vector<GatewayConfig> one;
    for (const auto& gw : scenario.gateways)
        if (gw.id == gateway_id) one.push_back(gw);
    if (one.empty())
        throw Error("gateway " + std::to_string(gateway_id) + " not in scenario");
    AggregatorConfig agg = scenario.aggregator;
    agg.scheme = Scheme::FedAvg;
    return run_impl(scenario, one, agg);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open scenario file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoFailure("cannot parse scenario file " + path + ": " + e.what());
    }

    Scenario sc;
    sc.name = j.value("name", std::string("scenario"));
    sc.seed = j.value("seed", std::uint64_t{1});

    const auto& cons = j.at("constellation");
    const auto center = cons.at("center_km");
    GroundPoint ctr{center.at(0), center.at(1),
                    center.size() > 2 ? double(center.at(2)) : 0.0};
    const double altitude = cons.at("altitude_km");
    const double v_km_s = double(cons.at("velocity_km_h")) / 3600.0;
    const int direction = cons.value("direction", 1);
    const double max_freq = cons.value("max_freq_hz", 1e9);
    const double chip = cons.value("chip_const", 5e-24);

    int sat_id = 0;
    for (const auto& orb : cons.at("orbits")) {
        const double radius = orb.at("radius_km");
        const int count = orb.at("count");
        const double offset = orb.value("phase_offset_rad", 0.0);
        for (int k = 0; k < count; ++k) {
            SatelliteState s;
            s.id = sat_id++;
            s.track = OrbitTrack{ctr, radius, altitude, v_km_s / radius};
            s.phase_rad = std::fmod(offset + kTwoPi * k / count, kTwoPi);
            s.direction = direction >= 0 ? +1 : -1;
            s.max_freq_hz = max_freq;
            s.chip_const = chip;
            sc.satellites.push_back(s);
        }
    }

    for (const auto& g : j.at("gateways")) {
        GatewayConfig gw;
        gw.id = g.at("id");
        const auto pos = g.at("position_km");
        gw.position = GroundPoint{pos.at(0), pos.at(1),
                                  pos.size() > 2 ? double(pos.at(2)) : 0.0};
        gw.coverage_radius_km = g.at("coverage_radius_km");
        gw.n_antennas_x = g.value("n_antennas_x", 1);
        gw.n_antennas_y = g.value("n_antennas_y", 1);
        gw.n_beams = g.value("n_beams", 1);
        gw.noise_power_w = g.value("noise_power_w", 1e-9);
        gw.antenna_gain_dbi = g.value("antenna_gain_dbi", 0.0);
        sc.gateways.push_back(gw);
    }

    if (j.contains("link")) {
        const auto& l = j.at("link");
        sc.link.bandwidth_hz = l.value("bandwidth_hz", 1e9);
        sc.link.sat_gain_dbi = l.value("sat_gain_dbi", 0.0);
        sc.link.pathloss_db = l.value("pathloss_db", 0.0);
        sc.link.tx_power_w = l.value("tx_power_w", 1.0);
        sc.link.cycles_per_sample = l.value("cycles_per_sample", 1e8);
        sc.link.carrier_hz = l.value("carrier_hz", 1e10);
        sc.link.doppler_hz = l.value("doppler_hz", 2e4);
        sc.link.model_bits = l.value("model_bits", 0.0);
    }

    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        sc.energy_mean_j = e.value("mean_j", 1e5);
        sc.energy_std_j = e.value("std_j", 2e4);
        sc.energy_floor_j = e.value("floor_j", 1e3);
    }

    if (j.contains("data")) {
        const auto& d = j.at("data");
        sc.tile_side = d.value("tile_side", 8);
        sc.train_samples = d.value("train_samples", 2000);
        sc.holdout_samples = d.value("holdout_samples", 128);
        sc.dirichlet_lambda = d.value("dirichlet_lambda", 0.1);
    }
    sc.arch.input_dim = sc.tile_side * sc.tile_side;

    if (j.contains("arch")) {
        const auto& a = j.at("arch");
        sc.arch.latent_dim = a.value("latent_dim", 16);
        if (a.contains("hidden_dims"))
            sc.arch.hidden_dims = a.at("hidden_dims").get<std::vector<int>>();
        const std::string act = a.value("activation", std::string("relu"));
        sc.arch.activation = act == "tanh" ? AutoencoderSpec::Activation::tanh
                                           : AutoencoderSpec::Activation::relu;
    }

    if (j.contains("train")) {
        const auto& tr = j.at("train");
        sc.train.learning_rate = tr.value("learning_rate", 0.05);
        sc.train.batch_size = tr.value("batch_size", 16);
        sc.train.snr_db = tr.value("snr_db", 5.0);
    }

    if (j.contains("aggregator")) {
        const auto& a = j.at("aggregator");
        sc.aggregator.scheme =
            scheme_from_name(a.value("scheme", std::string("fedsel")));
        sc.aggregator.beta = a.value("beta", 0.5);
        sc.aggregator.kappa = a.value("kappa", 0.5);
    }

    sc.association_mode = j.value("association_mode", std::string("proposed"));
    sc.global_rounds = j.value("global_rounds", 10);
    sc.subregion_rounds = j.value("subregion_rounds", 1);
    if (j.contains("eval_snrs_db"))
        sc.eval_snrs_db = j.at("eval_snrs_db").get<std::vector<double>>();
    return sc;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
    std::string label;
    std::vector<double> values;   // indexed by round
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& y_label, const std::vector<Series>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot write " + path);

    const double width = 720, height = 440;
    const double ml = 64, mr = 160, mt = 40, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::size_t n = 0;
    double lo = 1e300, hi = -1e300;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    if (n == 0 || lo > hi) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        hi += 0.5;
        lo -= 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto px = [&](std::size_t i) {
        return ml + (n > 1 ? pw * static_cast<double>(i) / (n - 1) : pw / 2);
    };
    auto py = [&](double v) { return mt + ph * (1.0 - (v - lo) / (hi - lo)); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"15\" fill=\"#222\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"#444\"/>\n";
    // y ticks
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = py(v);
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml
            << "\" y2=\"" << y << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\" "
               "text-anchor=\"end\">" << fmt6(v) << "</text>\n";
    }
    // x ticks: first, middle, last round
    if (n > 0) {
        for (std::size_t i : {std::size_t{0}, n / 2, n - 1}) {
            out << "<line x1=\"" << px(i) << "\" y1=\"" << mt + ph << "\" x2=\""
                << px(i) << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << px(i) << "\" y=\"" << mt + ph + 18
                << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\" "
                   "text-anchor=\"middle\">" << i << "</text>\n";
        }
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" "
           "text-anchor=\"middle\">round</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
        << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        std::ostringstream pts;
        for (std::size_t i = 0; i < series[si].values.size(); ++i) {
            const double v = series[si].values[i];
            if (!std::isfinite(v)) continue;
            pts << px(i) << "," << py(v) << " ";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const double ly = mt + 16 + 16 * static_cast<double>(si);
        out << "<line x1=\"" << ml + pw + 8 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << ml + pw + 28 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << ml + pw + 32 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">"
            << series[si].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out.good())
        throw IoFailure("failed writing " + path);
}

} // namespace

void emit_reports(const std::vector<std::pair<std::string, RunResult>>& runs,
                  const std::vector<double>& eval_snrs_db,
                  const std::string& out_dir) {
    if (runs.empty() || runs.front().second.log.empty())
        throw IoFailure("nothing to report");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoFailure("cannot create output directory " + out_dir);

    const RunResult& primary = runs.front().second;

    // every gateway id that ever reported a loss, in id order
    std::vector<int> gw_ids;
    for (const auto& rm : primary.log)
        for (const auto& [gid, _] : rm.per_gateway_loss)
            if (std::find(gw_ids.begin(), gw_ids.end(), gid) == gw_ids.end())
                gw_ids.push_back(gid);
    std::sort(gw_ids.begin(), gw_ids.end());

    {   // metrics.csv: one row per global round
        const std::string path = out_dir + "/metrics.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot write " + path);
        out << "round";
        for (int gid : gw_ids) out << ",loss_gw" << gid;
        for (double snr : eval_snrs_db) out << ",psnr_" << fmt6(snr) << "db";
        for (double snr : eval_snrs_db) out << ",ssim_" << fmt6(snr) << "db";
        out << "\n";
        for (const auto& rm : primary.log) {
            out << rm.round;
            for (int gid : gw_ids) {
                auto it = rm.per_gateway_loss.find(gid);
                out << ","
                    << (it == rm.per_gateway_loss.end() ? "nan" : fmt6(it->second));
            }
            for (std::size_t i = 0; i < eval_snrs_db.size(); ++i)
                out << ","
                    << (i < rm.global_psnr_db.size() ? fmt6(rm.global_psnr_db[i])
                                                     : "nan");
            for (std::size_t i = 0; i < eval_snrs_db.size(); ++i)
                out << ","
                    << (i < rm.global_ssim.size() ? fmt6(rm.global_ssim[i]) : "nan");
            out << "\n";
        }
        if (!out.good()) throw IoFailure("failed writing " + path);
    }

    {   // summary.csv: rows = eval SNR, columns = final-round PSNR/SSIM per run
        const std::string path = out_dir + "/summary.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot write " + path);
        out << "snr_db";
        for (const auto& [label, _] : runs)
            out << ",psnr_" << label << ",ssim_" << label;
        out << "\n";
        for (std::size_t i = 0; i < eval_snrs_db.size(); ++i) {
            out << fmt6(eval_snrs_db[i]);
            for (const auto& [label, rr] : runs) {
                const auto& last = rr.log.back();
                out << ","
                    << (i < last.global_psnr_db.size() ? fmt6(last.global_psnr_db[i])
                                                       : "nan")
                    << ","
                    << (i < last.global_ssim.size() ? fmt6(last.global_ssim[i])
                                                    : "nan");
            }
            out << "\n";
        }
        if (!out.good()) throw IoFailure("failed writing " + path);
    }

    auto chart_series = [&](bool want_psnr) {
        std::vector<Series> series;
        for (const auto& [label, rr] : runs) {
            for (std::size_t i = 0; i < eval_snrs_db.size(); ++i) {
                Series s;
                s.label = (runs.size() > 1 ? label + " " : std::string()) +
                          fmt6(eval_snrs_db[i]) + " dB";
                for (const auto& rm : rr.log) {
                    const auto& vals = want_psnr ? rm.global_psnr_db : rm.global_ssim;
                    s.values.push_back(i < vals.size()
                                           ? vals[i]
                                           : std::numeric_limits<double>::quiet_NaN());
                }
                series.push_back(std::move(s));
            }
        }
        return series;
    };

    write_line_chart(out_dir + "/psnr.svg", "reconstruction PSNR vs round",
                     "PSNR (dB)", chart_series(true));
    write_line_chart(out_dir + "/ssim.svg", "reconstruction SSIM vs round", "SSIM",
                     chart_series(false));
}

} // namespace leofl
