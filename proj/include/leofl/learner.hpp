#pragma once
#include "leofl/aggregation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace leofl {

// dense autoencoder: input -> hidden... -> latent (linear) -> unit-power
// normalization -> AWGN -> reversed hidden... -> output (linear)
struct AutoencoderSpec {
    int input_dim = 64;                // pixels per tile
    int latent_dim = 16;               // channel symbols
    std::vector<int> hidden_dims{48};  // encoder widths; decoder mirrors them
    enum class Activation { relu, tanh } activation = Activation::relu;
};

struct TrainConfig {
    double learning_rate = 0.05;  // alpha
    int batch_size = 16;
    double snr_db = 5.0;          // training-channel SNR; +inf disables noise
    std::uint64_t seed = 0;
};

struct Dataset {
    std::vector<std::vector<double>> samples;  // pixel vectors in [0,1]
    int owner = -1;                            // satellite id
};

std::size_t param_count(const AutoencoderSpec& spec);
std::string layout_tag(const AutoencoderSpec& spec);

ParamVector init_params(const AutoencoderSpec& spec, std::uint64_t seed);

struct ForwardOut {
    std::vector<double> reconstruction;
    std::vector<double> latent;   // power-normalized, before noise
};

ForwardOut forward(const AutoencoderSpec& spec, const ParamVector& params,
                   const std::vector<double>& x, double snr_db,
                   std::uint64_t noise_seed);

// mean squared reconstruction error over the batch; when grad is non-null,
// fills it with the analytic gradient (noise reparameterized as a constant)
double batch_loss_grad(const AutoencoderSpec& spec, const ParamVector& params,
                       const std::vector<std::vector<double>>& samples,
                       const std::vector<std::size_t>& batch_index, double snr_db,
                       std::uint64_t noise_seed, std::vector<double>* grad);

// k full passes of mini-batch SGD; report carries the final epoch's mean loss
ClientReport train_epochs(const AutoencoderSpec& spec, const ParamVector& start,
                          const Dataset& data, long k, const TrainConfig& cfg);

// 10 log10(MAX^2 / MSE); +inf when MSE == 0
double psnr(const std::vector<double>& original,
            const std::vector<double>& reconstruction, double max_value);

// single-scale SSIM, 8x8 uniform sliding window, on square tiles
double ssim(const std::vector<double>& original,
            const std::vector<double>& reconstruction, double max_value = 1.0);

// symmetric Dirichlet split into disjoint shards covering the whole set
std::vector<Dataset> dirichlet_partition(const Dataset& total, int n_clients,
                                         double lambda, std::uint64_t seed);

// procedural grayscale tiles: gradients, gratings, checkers, blobs, smoothed noise
Dataset synthetic_tiles(int count, int side, std::uint64_t seed);

struct EvalStats {
    double psnr_db = 0.0;   // mean over samples
    double ssim = 0.0;      // mean over samples
    double mse = 0.0;       // mean over samples
};

EvalStats evaluate(const AutoencoderSpec& spec, const ParamVector& params,
                   const std::vector<std::vector<double>>& samples, double snr_db,
                   std::uint64_t noise_seed);

} // namespace leofl
