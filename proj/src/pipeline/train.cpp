// SPDX-License-Identifier: Apache-2.0
#include "pipeline/train.hpp"

#include "util/error.hpp"

namespace hbrom::pipeline {

std::string to_string(Task t) {
    switch (t) {
        case Task::vks_steady_vae: return "vks_steady_vae";
        case Task::vks_full_seq: return "vks_full_seq";
        case Task::kpp_seq: return "kpp_seq";
        case Task::euler_param_seq: return "euler_param_seq";
    }
    return "kpp_seq";
}

Task task_from_string(const std::string& name) {
    if (name == "vks_steady_vae" || name == "vks-steady-vae" || name == "vks-steady")
        return Task::vks_steady_vae;
    if (name == "vks_full_seq" || name == "vks-full-seq" || name == "vks-full")
        return Task::vks_full_seq;
    if (name == "kpp_seq" || name == "kpp") return Task::kpp_seq;
    if (name == "euler_param_seq" || name == "euler") return Task::euler_param_seq;
    fail(ErrorKind::invalid_argument, "unknown task '" + name + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) fail(ErrorKind::invalid_argument, "TrainConfig: epochs must be >= 1");
    if (rank < 1) fail(ErrorKind::invalid_argument, "TrainConfig: rank must be >= 1");
    if (!(lr > 0.0)) fail(ErrorKind::invalid_argument, "TrainConfig: learning rate must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0))
        fail(ErrorKind::invalid_argument, "TrainConfig: tolerances must be positive");
    if (seq_in == 0 || seq_out == 0)
        fail(ErrorKind::invalid_argument, "TrainConfig: sequence lengths must be positive");
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        fail(ErrorKind::invalid_argument, "TrainConfig: split fraction must lie in (0, 1)");
    if (latent_dim == 0 || ode_layers == 0)
        fail(ErrorKind::invalid_argument, "TrainConfig: degenerate architecture");
}

TrainConfig default_config(Task task, dynamics::ModelKind kind) {
    TrainConfig cfg;
    cfg.task = task;
    cfg.model = kind;
    switch (task) {
        case Task::vks_steady_vae:
            cfg.latent_dim = 6;
            cfg.enc_layers = 4;
            cfg.enc_hidden = 10;
            cfg.ode_layers = 12;
            cfg.ode_hidden = 41;
            cfg.dec_layers = 4;
            cfg.dec_hidden = 41;
            cfg.seq_in = 1;
            cfg.seq_out = 1;
            cfg.lr = 0.00153;
            cfg.epochs = 2000;
            cfg.split_fraction = 0.75;
            break;
        case Task::vks_full_seq:
            cfg.ode_layers = 12;
            cfg.ode_hidden = 64;
            cfg.seq_in = 9;
            cfg.seq_out = 1;
            cfg.lr = 0.001;
            cfg.epochs = 500;
            cfg.split_fraction = 0.8;
            break;
        case Task::kpp_seq:
            cfg.ode_layers = 2;
            cfg.ode_hidden = 64;
            cfg.seq_in = 4;
            cfg.seq_out = 1;
            cfg.lr = 0.01;
            cfg.epochs = 500;
            cfg.split_fraction = 0.8;
            break;
        case Task::euler_param_seq:
            cfg.ode_layers = 6;
            cfg.ode_hidden = 16;
            cfg.seq_in = 150;
            cfg.seq_out = 30;
            cfg.lr = 0.01;
            cfg.epochs = 100;
            cfg.batch_size = 16;
            cfg.split_fraction = 0.9; // fraction of parameters used for training
            break;
    }
    return cfg;
}

EvalMetrics evaluate(const numkit::DenseMatrix& prediction, const numkit::DenseMatrix& truth) {
    if (prediction.rows() != truth.rows() || prediction.cols() != truth.cols())
        fail(ErrorKind::shape, "evaluate: shape mismatch");
    EvalMetrics m;
    m.per_mode.assign(prediction.cols(), 0.0);
    for (std::size_t i = 0; i < prediction.rows(); ++i)
        for (std::size_t j = 0; j < prediction.cols(); ++j) {
            const double d = prediction(i, j) - truth(i, j);
            m.per_mode[j] += d * d;
        }
    double total = 0.0;
    for (auto& v : m.per_mode) {
        total += v;
        v /= static_cast<double>(prediction.rows());
    }
    m.mse = total / static_cast<double>(prediction.rows() * prediction.cols());
    return m;
}

} // namespace hbrom::pipeline
