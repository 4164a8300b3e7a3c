#include "leofl/learner.hpp"
#include "leofl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace leofl {

namespace {

struct Layer {
    int in = 0;
    int out = 0;
    std::size_t w_off = 0;   // into the flat parameter vector
    std::size_t b_off = 0;
};

struct Net {
    std::vector<Layer> layers;   // encoder then decoder
    int n_enc = 0;               // encoder layer count
    std::size_t n_params = 0;
};

Net build_net(const AutoencoderSpec& spec) {
    std::vector<int> dims;
    dims.push_back(spec.input_dim);
    for (int h : spec.hidden_dims) dims.push_back(h);
    dims.push_back(spec.latent_dim);
    const int n_enc = static_cast<int>(dims.size()) - 1;
    for (auto it = spec.hidden_dims.rbegin(); it != spec.hidden_dims.rend(); ++it)
        dims.push_back(*it);
    dims.push_back(spec.input_dim);

    Net net;
    net.n_enc = n_enc;
    std::size_t off = 0;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.in = dims[i];
        l.out = dims[i + 1];
        l.w_off = off;
        off += static_cast<std::size_t>(l.in) * l.out;
        l.b_off = off;
        off += l.out;
        net.layers.push_back(l);
    }
    net.n_params = off;
    return net;
}

double noise_sigma(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
    return std::pow(10.0, -snr_db / 20.0);   // variance 10^(-snr/10)
}

inline double activate(double z, AutoencoderSpec::Activation a) {
    return a == AutoencoderSpec::Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

inline double activate_deriv(double z, double a_val, AutoencoderSpec::Activation a) {
    return a == AutoencoderSpec::Activation::relu ? (z > 0.0 ? 1.0 : 0.0)
                                                  : 1.0 - a_val * a_val;
}

// scratch buffers reused across samples in a batch
struct Pass {
    std::vector<std::vector<double>> pre;    // pre-activation per layer
    std::vector<std::vector<double>> act;    // inputs per layer; act[0] = x
    std::vector<double> latent_norm;         // power-normalized latent
    std::vector<double> channel;             // latent + noise
    double norm = 0.0;                       // ||pre-norm latent||
};

void forward_sample(const Net& net, const AutoencoderSpec& spec, const double* p,
                    const std::vector<double>& x, const double* noise, Pass& pass) {
    const int n_layers = static_cast<int>(net.layers.size());
    pass.pre.resize(n_layers);
    pass.act.resize(n_layers + 1);
    pass.act[0] = x;

    for (int li = 0; li < n_layers; ++li) {
        const Layer& L = net.layers[li];
        const std::vector<double>& in =
            li == net.n_enc ? pass.channel : pass.act[li];
        auto& z = pass.pre[li];
        z.assign(L.out, 0.0);
        for (int i = 0; i < L.in; ++i) {
            const double ai = in[i];
            if (ai == 0.0) continue;
            const double* wrow = p + L.w_off + static_cast<std::size_t>(i) * L.out;
            for (int j = 0; j < L.out; ++j) z[j] += ai * wrow[j];
        }
        for (int j = 0; j < L.out; ++j) z[j] += p[L.b_off + j];

        const bool is_latent = li == net.n_enc - 1;
        const bool is_output = li == n_layers - 1;
        auto& a = pass.act[li + 1];
        a.resize(L.out);
        if (is_latent || is_output) {
            a = z;
        } else {
            for (int j = 0; j < L.out; ++j) a[j] = activate(z[j], spec.activation);
        }

        if (is_latent) {
            // unit average symbol power: y = sqrt(n) z / ||z||
            const int n = L.out;
            double ss = 0.0;
            for (double v : a) ss += v * v;
            pass.norm = std::sqrt(ss);
            pass.latent_norm.resize(n);
            pass.channel.resize(n);
            const double scale =
                pass.norm > 1e-300 ? std::sqrt(static_cast<double>(n)) / pass.norm : 0.0;
            for (int j = 0; j < n; ++j) {
                pass.latent_norm[j] = scale * a[j];
                pass.channel[j] = pass.latent_norm[j] + noise[j];
            }
        }
    }
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

} // namespace

std::size_t param_count(const AutoencoderSpec& spec) {
    return build_net(spec).n_params;
}

std::string layout_tag(const AutoencoderSpec& spec) {
    std::ostringstream os;
    os << "ae" << spec.input_dim;
    for (int h : spec.hidden_dims) os << "-h" << h;
    os << "-z" << spec.latent_dim;
    os << (spec.activation == AutoencoderSpec::Activation::relu ? ":relu" : ":tanh");
    return os.str();
}

ParamVector init_params(const AutoencoderSpec& spec, std::uint64_t seed) {
    const Net net = build_net(spec);
    ParamVector pv;
    pv.layout_tag = layout_tag(spec);
    pv.values.assign(net.n_params, 0.0);
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double fan_scale =
        spec.activation == AutoencoderSpec::Activation::relu ? 2.0 : 1.0;
    for (const Layer& L : net.layers) {
        const double sd = std::sqrt(fan_scale / L.in);
        for (std::size_t k = 0; k < static_cast<std::size_t>(L.in) * L.out; ++k)
            pv.values[L.w_off + k] = sd * normal(rng);
        // biases stay zero
    }
    return pv;
}

ForwardOut forward(const AutoencoderSpec& spec, const ParamVector& params,
                   const std::vector<double>& x, double snr_db,
                   std::uint64_t noise_seed) {
    const Net net = build_net(spec);
    if (static_cast<int>(x.size()) != spec.input_dim)
        throw DimensionMismatch("input size " + std::to_string(x.size()) +
                                " != input_dim " + std::to_string(spec.input_dim));
    if (params.values.size() != net.n_params)
        throw DimensionMismatch("parameter vector does not match architecture");

    const double sigma = noise_sigma(snr_db);
    std::vector<double> noise(spec.latent_dim, 0.0);
    if (sigma > 0.0) {
        auto rng = make_rng(noise_seed);
        std::normal_distribution<double> normal(0.0, sigma);
        for (double& v : noise) v = normal(rng);
    }

    Pass pass;
    forward_sample(net, spec, params.values.data(), x, noise.data(), pass);
    return ForwardOut{pass.act.back(), pass.latent_norm};
}

double batch_loss_grad(const AutoencoderSpec& spec, const ParamVector& params,
                       const std::vector<std::vector<double>>& samples,
                       const std::vector<std::size_t>& batch_index, double snr_db,
                       std::uint64_t noise_seed, std::vector<double>* grad) {
    const Net net = build_net(spec);
    if (params.values.size() != net.n_params)
        throw DimensionMismatch("parameter vector does not match architecture");
    if (batch_index.empty())
        throw EmptyDataset("empty batch");

    const double sigma = noise_sigma(snr_db);
    const double* p = params.values.data();
    const int n_layers = static_cast<int>(net.layers.size());
    const int d = spec.input_dim;
    const double batch_n = static_cast<double>(batch_index.size());

    if (grad) grad->assign(net.n_params, 0.0);

    // noise drawn per sample in batch order; independent of the parameters so
    // central differences see identical channel instances
    auto rng = make_rng(noise_seed);
    std::normal_distribution<double> normal(0.0, sigma > 0.0 ? sigma : 1.0);

    double total_loss = 0.0;
    Pass pass;
    std::vector<double> noise(spec.latent_dim);
    std::vector<double> delta, delta_prev;

    for (std::size_t bi : batch_index) {
        const auto& x = samples[bi];
        if (static_cast<int>(x.size()) != d)
            throw DimensionMismatch("sample size != input_dim");
        for (double& v : noise) v = sigma > 0.0 ? normal(rng) : 0.0;

        forward_sample(net, spec, p, x, noise.data(), pass);

        const auto& recon = pass.act.back();
        double mse = 0.0;
        for (int i = 0; i < d; ++i) {
            const double e = recon[i] - x[i];
            mse += e * e;
        }
        mse /= d;
        total_loss += mse / batch_n;
        if (!grad) continue;

        // d(mean batch loss)/d(recon)
        delta.assign(d, 0.0);
        for (int i = 0; i < d; ++i)
            delta[i] = 2.0 * (recon[i] - x[i]) / (d * batch_n);

        double* g = grad->data();
        for (int li = n_layers - 1; li >= 0; --li) {
            const Layer& L = net.layers[li];
            const bool hidden = li != net.n_enc - 1 && li != n_layers - 1;
            if (hidden) {
                for (int j = 0; j < L.out; ++j)
                    delta[j] *= activate_deriv(pass.pre[li][j], pass.act[li + 1][j],
                                               spec.activation);
            }
            const std::vector<double>& in =
                li == net.n_enc ? pass.channel : pass.act[li];
            for (int i = 0; i < L.in; ++i) {
                const double ai = in[i];
                double* grow = g + L.w_off + static_cast<std::size_t>(i) * L.out;
                if (ai != 0.0)
                    for (int j = 0; j < L.out; ++j) grow[j] += ai * delta[j];
            }
            for (int j = 0; j < L.out; ++j) g[L.b_off + j] += delta[j];

            if (li == 0) break;
            delta_prev.assign(L.in, 0.0);
            const double* wbase = p + L.w_off;
            for (int i = 0; i < L.in; ++i) {
                const double* wrow = wbase + static_cast<std::size_t>(i) * L.out;
                double acc = 0.0;
                for (int j = 0; j < L.out; ++j) acc += wrow[j] * delta[j];
                delta_prev[i] = acc;
            }
            delta.swap(delta_prev);

            if (li == net.n_enc) {
                // back through noise (identity) and y = sqrt(n) z / ||z||:
                // dL/dz = s (g - (g . yhat) yhat), s = sqrt(n)/||z||
                const int n = spec.latent_dim;
                if (pass.norm > 1e-300) {
                    const double s = std::sqrt(static_cast<double>(n)) / pass.norm;
                    double dot = 0.0;
                    for (int j = 0; j < n; ++j)
                        dot += delta[j] * (pass.latent_norm[j] /
                                           std::sqrt(static_cast<double>(n)));
                    for (int j = 0; j < n; ++j) {
                        const double yhat =
                            pass.latent_norm[j] / std::sqrt(static_cast<double>(n));
                        delta[j] = s * (delta[j] - dot * yhat);
                    }
                } else {
                    std::fill(delta.begin(), delta.end(), 0.0);
                }
            }
        }
    }
    return total_loss;
}

ClientReport train_epochs(const AutoencoderSpec& spec, const ParamVector& start,
                          const Dataset& data, long k, const TrainConfig& cfg) {
    if (data.samples.empty())
        throw EmptyDataset("cannot train on an empty dataset");
    const std::size_t n = data.samples.size();
    const std::size_t bs = std::max<std::size_t>(1, cfg.batch_size);

    ParamVector params = start;
    auto rng = make_rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> grad;
    double epoch_loss = 0.0;

    auto run_epoch = [&](bool update) {
        if (update) std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t s = 0; s < n; s += bs) {
            const std::size_t e = std::min(n, s + bs);
            const std::vector<std::size_t> batch(order.begin() + s, order.begin() + e);
            const std::uint64_t noise_seed = rng();
            const double loss =
                batch_loss_grad(spec, params, data.samples, batch, cfg.snr_db,
                                noise_seed, update ? &grad : nullptr);
            if (update)
                for (std::size_t i = 0; i < grad.size(); ++i)
                    params.values[i] -= cfg.learning_rate * grad[i];
            total += loss * static_cast<double>(e - s);
        }
        return total / static_cast<double>(n);
    };

    if (k <= 0) {
        epoch_loss = run_epoch(false);
    } else {
        for (long ep = 0; ep < k; ++ep) epoch_loss = run_epoch(true);
    }

    ClientReport report;
    report.params = std::move(params);
    report.data_count = static_cast<long>(n);
    report.epochs = std::max<long>(k, 0);
    report.loss = epoch_loss;
    return report;
}

double psnr(const std::vector<double>& original,
            const std::vector<double>& reconstruction, double max_value) {
    if (original.size() != reconstruction.size() || original.empty())
        throw ShapeMismatch("psnr inputs must share a nonempty shape");
    double mse = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double e = reconstruction[i] - original[i];
        mse += e * e;
    }
    mse /= static_cast<double>(original.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / mse);
}

double ssim(const std::vector<double>& original,
            const std::vector<double>& reconstruction, double max_value) {
    if (original.size() != reconstruction.size() || original.empty())
        throw ShapeMismatch("ssim inputs must share a nonempty shape");
    const int side = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(original.size()))));
    if (static_cast<std::size_t>(side) * side != original.size())
        throw TooSmall("ssim expects square tiles");
    constexpr int kWin = 8;
    if (side < kWin)
        throw TooSmall("ssim needs at least an 8x8 tile");

    const double c1 = 0.01 * max_value * 0.01 * max_value;
    const double c2 = 0.03 * max_value * 0.03 * max_value;
    const double win_n = static_cast<double>(kWin) * kWin;

    double total = 0.0;
    int windows = 0;
    for (int y0 = 0; y0 + kWin <= side; ++y0) {
        for (int x0 = 0; x0 + kWin <= side; ++x0) {
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int y = y0; y < y0 + kWin; ++y) {
                for (int x = x0; x < x0 + kWin; ++x) {
                    const double a = original[static_cast<std::size_t>(y) * side + x];
                    const double b =
                        reconstruction[static_cast<std::size_t>(y) * side + x];
                    sa += a; sb += b;
                    saa += a * a; sbb += b * b; sab += a * b;
                }
            }
            const double ma = sa / win_n, mb = sb / win_n;
            const double va = saa / win_n - ma * ma;
            const double vb = sbb / win_n - mb * mb;
            const double cov = sab / win_n - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++windows;
        }
    }
    return total / windows;
}

std::vector<Dataset> dirichlet_partition(const Dataset& total, int n_clients,
                                         double lambda, std::uint64_t seed) {
    std::vector<Dataset> shards;
    if (n_clients <= 1) {
        Dataset d = total;
        d.owner = 0;
        shards.push_back(std::move(d));
        return shards;
    }

    auto rng = make_rng(seed);
    // Dirichlet via normalized gamma draws; concentration lambda scaled by the
    // client count so lambda=10 keeps 10x2000 shards near-uniform and
    // lambda=0.1 produces heavily skewed shards
    const double alpha = lambda * n_clients;
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> prop(n_clients);
    double sum = 0.0;
    for (double& v : prop) {
        v = gamma(rng);
        sum += v;
    }
    if (sum <= 0.0) {            // pathological underflow: fall back to uniform
        std::fill(prop.begin(), prop.end(), 1.0);
        sum = n_clients;
    }
    for (double& v : prop) v /= sum;

    const std::size_t n = total.samples.size();
    std::vector<std::size_t> counts(n_clients);
    double cum = 0.0;
    std::size_t prev = 0;
    for (int i = 0; i < n_clients; ++i) {
        cum += prop[i];
        std::size_t edge = i + 1 == n_clients
            ? n
            : static_cast<std::size_t>(std::llround(cum * static_cast<double>(n)));
        edge = std::min(std::max(edge, prev), n);
        counts[i] = edge - prev;
        prev = edge;
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::size_t at = 0;
    for (int i = 0; i < n_clients; ++i) {
        Dataset d;
        d.owner = i;
        d.samples.reserve(counts[i]);
        for (std::size_t k = 0; k < counts[i]; ++k)
            d.samples.push_back(total.samples[perm[at++]]);
        shards.push_back(std::move(d));
    }
    return shards;
}

Dataset synthetic_tiles(int count, int side, std::uint64_t seed) {
    Dataset out;
    out.samples.reserve(count);
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> kind_pick(0, 4);
    const double pi = std::acos(-1.0);

    std::vector<double> img(static_cast<std::size_t>(side) * side);
    for (int k = 0; k < count; ++k) {
        const int kind = kind_pick(rng);
        auto at = [&](int y, int x) -> double& {
            return img[static_cast<std::size_t>(y) * side + x];
        };
        switch (kind) {
            case 0: {   // oriented linear gradient
                const double th = unit(rng) * 2.0 * pi;
                double lo = 1e300, hi = -1e300;
                for (int y = 0; y < side; ++y)
                    for (int x = 0; x < side; ++x) {
                        const double v = x * std::cos(th) + y * std::sin(th);
                        at(y, x) = v;
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                const double span = std::max(hi - lo, 1e-12);
                for (double& v : img) v = (v - lo) / span;
                break;
            }
            case 1: {   // sinusoidal grating
                const double th = unit(rng) * pi;
                const double f = 0.5 + 2.0 * unit(rng);
                const double ph = unit(rng) * 2.0 * pi;
                for (int y = 0; y < side; ++y)
                    for (int x = 0; x < side; ++x)
                        at(y, x) = 0.5 + 0.5 * std::sin(2.0 * pi * f *
                                       (x * std::cos(th) + y * std::sin(th)) / side + ph);
                break;
            }
            case 2: {   // checkerboard
                std::uniform_int_distribution<int> cell(1, 3);
                std::uniform_int_distribution<int> offset(0, 3);
                const int s = cell(rng);
                const int ox = offset(rng), oy = offset(rng);
                for (int y = 0; y < side; ++y)
                    for (int x = 0; x < side; ++x)
                        at(y, x) = 0.15 + 0.7 * (((x + ox) / s + (y + oy) / s) % 2);
                break;
            }
            case 3: {   // gaussian blob
                const double cx = 1.0 + unit(rng) * (side - 2);
                const double cy = 1.0 + unit(rng) * (side - 2);
                const double sg = 1.0 + 2.0 * unit(rng);
                for (int y = 0; y < side; ++y)
                    for (int x = 0; x < side; ++x)
                        at(y, x) = std::exp(-((x - cx) * (x - cx) +
                                              (y - cy) * (y - cy)) / (2.0 * sg * sg));
                break;
            }
            default: {  // smoothed uniform noise (wrap-around 5-point mean)
                std::vector<double> raw(img.size());
                for (double& v : raw) v = unit(rng);
                auto raw_at = [&](int y, int x) {
                    return raw[static_cast<std::size_t>((y + side) % side) * side +
                               (x + side) % side];
                };
                for (int y = 0; y < side; ++y)
                    for (int x = 0; x < side; ++x)
                        at(y, x) = (raw_at(y, x) + raw_at(y - 1, x) + raw_at(y + 1, x) +
                                    raw_at(y, x - 1) + raw_at(y, x + 1)) / 5.0;
                break;
            }
        }
        for (double& v : img) v = std::clamp(v, 0.0, 1.0);
        out.samples.push_back(img);
    }
    return out;
}

EvalStats evaluate(const AutoencoderSpec& spec, const ParamVector& params,
                   const std::vector<std::vector<double>>& samples, double snr_db,
                   std::uint64_t noise_seed) {
    if (samples.empty())
        throw EmptyDataset("nothing to evaluate");
    const Net net = build_net(spec);
    if (params.values.size() != net.n_params)
        throw DimensionMismatch("parameter vector does not match architecture");

    const double sigma = noise_sigma(snr_db);
    auto rng = make_rng(noise_seed);
    std::normal_distribution<double> normal(0.0, sigma > 0.0 ? sigma : 1.0);

    EvalStats stats;
    Pass pass;
    std::vector<double> noise(spec.latent_dim);
    for (const auto& x : samples) {
        for (double& v : noise) v = sigma > 0.0 ? normal(rng) : 0.0;
        forward_sample(net, spec, params.values.data(), x, noise.data(), pass);
        const auto& recon = pass.act.back();
        stats.psnr_db += psnr(x, recon, 1.0);
        stats.ssim += ssim(x, recon, 1.0);
        double mse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = recon[i] - x[i];
            mse += e * e;
        }
        stats.mse += mse / static_cast<double>(x.size());
    }
    const double n = static_cast<double>(samples.size());
    stats.psnr_db /= n;
    stats.ssim /= n;
    stats.mse /= n;
    return stats;
}

} // namespace leofl
