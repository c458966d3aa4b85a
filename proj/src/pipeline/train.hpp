// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dynamics/model.hpp"
#include "io/metrics_csv.hpp"
#include "pipeline/windows.hpp"

namespace hbrom::pipeline {

enum class Task { vks_steady_vae, vks_full_seq, kpp_seq, euler_param_seq };

std::string to_string(Task t);
Task task_from_string(const std::string& name); // accepts kpp/euler/vks-... aliases

struct TrainConfig {
    Task task = Task::kpp_seq;
    dynamics::ModelKind model = dynamics::ModelKind::node;

    // architecture
    std::size_t ode_layers = 2;
    std::size_t ode_hidden = 64;
    std::size_t latent_dim = 8;
    std::size_t enc_layers = 1;  // stacked GRU depth (VAE architecture)
    std::size_t enc_hidden = 0;  // 0 -> latent_dim
    std::size_t dec_layers = 1;  // decoder MLP depth (VAE architecture)
    std::size_t dec_hidden = 0;

    // windowing
    std::size_t seq_in = 4;
    std::size_t seq_out = 1;
    std::size_t stride = 1;
    double split_fraction = 0.8;

    // optimization
    double lr = 0.01;
    double lr_decay = 1.0; // per-epoch multiplicative factor
    std::size_t epochs = 100;
    std::size_t batch_size = 0; // 0 = full batch
    double weight_decay = 0.0;
    double clip_norm = 0.0; // 0 = off
    double kl_weight = 1e-3;

    // integration
    double rtol = 1e-8;
    double atol = 1e-10;
    double epsilon = 1.0; // damping bound

    std::uint64_t seed = 1;
    std::size_t rank = 8;           // POD order
    std::size_t max_timesteps = 0;  // cap on coefficient rows used (0 = all)

    std::size_t encoder_width() const { return enc_hidden ? enc_hidden : latent_dim; }
    void validate() const;
};

// Task presets: the protocol hyperparameters each experiment ships with.
TrainConfig default_config(Task task, dynamics::ModelKind kind);

struct TrainRun {
    std::vector<io::EpochRecord> records;
    std::vector<double> max_latent_norm; // per-epoch audit of ||h(t)||
    bool diverged = false;
    long diverged_epoch = -1;
    std::uint64_t seed = 0;
};

struct EvalMetrics {
    double mse = 0.0;
    std::vector<double> per_mode;
};

// Elementwise mean squared error plus the per-mode breakdown.
EvalMetrics evaluate(const numkit::DenseMatrix& prediction, const numkit::DenseMatrix& truth);

} // namespace hbrom::pipeline
