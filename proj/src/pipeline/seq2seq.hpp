// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "neural/adamw.hpp"
#include "neural/gru.hpp"
#include "pipeline/train.hpp"

namespace hbrom::pipeline {

// Sequence-to-sequence learner: GRU encoder(s) -> latent ODE across the
// output horizon -> GRU decoder with a linear readout. Heavy-ball variants
// carry a second encoder producing the momentum latent.
struct Seq2SeqModel {
    neural::GruParams enc_h;
    std::optional<neural::GruParams> enc_m;
    dynamics::OdeModel ode;
    neural::GruParams dec;
    numkit::DenseMatrix w_out; // r x latent
    std::vector<double> b_out;
    std::uint64_t out_version = 0;

    // gradient accumulators
    neural::GruGrads g_enc_h, g_enc_m, g_dec;
    dynamics::ModelGrads g_ode;
    numkit::DenseMatrix g_w_out;
    std::vector<double> g_b_out;

    std::size_t rank = 0;
    std::vector<neural::ParamBlock> param_blocks();
};

Seq2SeqModel make_seq2seq(const TrainConfig& cfg, std::size_t rank, Rng& rng);

// Deterministic forward prediction of one window batch (mean path, no
// learning). Returns per-window prediction blocks (seq_out x r).
std::vector<numkit::DenseMatrix> seq2seq_predict(Seq2SeqModel& model,
                                                 const std::vector<const numkit::DenseMatrix*>& inputs,
                                                 const TrainConfig& cfg);

struct Seq2SeqOutcome {
    TrainRun run;
    Seq2SeqModel model;
};

Seq2SeqOutcome train_seq2seq(const WindowDataset& data, const TrainConfig& cfg);

// One full forward/backward over a window batch: returns the batch MSE and
// accumulates parameter gradients into the model's grad blocks (caller
// zeroes). Exposed so the whole chain can be audited against finite
// differences.
double seq2seq_loss_and_gradients(Seq2SeqModel& model,
                                  const std::vector<const numkit::DenseMatrix*>& inputs,
                                  const std::vector<const numkit::DenseMatrix*>& labels,
                                  const TrainConfig& cfg);

// Autoregressive continuation from a seed window (normalized coefficients).
numkit::DenseMatrix rollout_seq2seq(Seq2SeqModel& model, const numkit::DenseMatrix& seed_window,
                                    std::size_t horizon, const TrainConfig& cfg);

} // namespace hbrom::pipeline
