// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "neural/adamw.hpp"
#include "neural/gru.hpp"
#include "neural/vae.hpp"
#include "pipeline/train.hpp"

namespace hbrom::pipeline {

// Single-step predictor: stacked GRU encoder -> variational heads sampling
// the latent state (and the momentum state for heavy-ball kinds) -> one unit
// of latent ODE time -> MLP decoder.
struct VaeOneStepModel {
    std::vector<neural::GruParams> enc; // stacked cells, bottom first
    neural::VaeHead head_h;
    std::optional<neural::VaeHead> head_m;
    dynamics::OdeModel ode;
    neural::MlpParams dec;

    std::vector<neural::GruGrads> g_enc;
    neural::VaeHeadGrads g_head_h, g_head_m;
    dynamics::ModelGrads g_ode;
    neural::MlpGrads g_dec;

    std::size_t rank = 0;
    std::vector<neural::ParamBlock> param_blocks();
};

VaeOneStepModel make_vae_onestep(const TrainConfig& cfg, std::size_t rank, Rng& rng);

struct VaeOutcome {
    TrainRun run;
    VaeOneStepModel model;
};

// Trains on one-step windows (seq_in inputs, 1 label); the loss is
// reconstruction MSE plus kl_weight times the KL term. Training draws one
// noise sample per window per epoch; validation uses the mean path.
VaeOutcome train_vae_onestep(const WindowDataset& data, const TrainConfig& cfg);

// Loss (reconstruction MSE + kl_weight * mean KL) with gradients
// accumulated into the model's grad blocks; noise vectors are injected per
// window so the computation is deterministic for auditing.
double vae_loss_and_gradients(VaeOneStepModel& model,
                              const std::vector<const numkit::DenseMatrix*>& inputs,
                              const std::vector<const numkit::DenseMatrix*>& labels,
                              const TrainConfig& cfg,
                              const std::vector<std::vector<double>>& noise_h,
                              const std::vector<std::vector<double>>* noise_m);

// Same loss without gradients.
double vae_loss_only(VaeOneStepModel& model,
                     const std::vector<const numkit::DenseMatrix*>& inputs,
                     const std::vector<const numkit::DenseMatrix*>& labels,
                     const TrainConfig& cfg, const std::vector<std::vector<double>>& noise_h,
                     const std::vector<std::vector<double>>* noise_m);

// Deterministic one-step predictions (mean path).
std::vector<std::vector<double>> vae_predict(VaeOneStepModel& model,
                                             const std::vector<const numkit::DenseMatrix*>& inputs,
                                             const TrainConfig& cfg);

// Iterated one-step map from the seed window.
numkit::DenseMatrix rollout_vae(VaeOneStepModel& model, const numkit::DenseMatrix& seed_window,
                                std::size_t horizon, const TrainConfig& cfg);

} // namespace hbrom::pipeline
