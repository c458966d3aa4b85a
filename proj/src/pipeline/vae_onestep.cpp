// SPDX-License-Identifier: Apache-2.0
#include "pipeline/vae_onestep.hpp"

#include <cmath>

#include "dynamics/adjoint.hpp"
#include "odeint/stiffness.hpp"

namespace hbrom::pipeline {

std::vector<neural::ParamBlock> VaeOneStepModel::param_blocks() {
    std::vector<neural::ParamBlock> blocks;
    if (g_enc.size() != enc.size()) g_enc.resize(enc.size());
    for (std::size_t l = 0; l < enc.size(); ++l) {
        auto more = enc[l].param_blocks("enc" + std::to_string(l), g_enc[l]);
        blocks.insert(blocks.end(), more.begin(), more.end());
    }
    auto hh = head_h.param_blocks("head_h", g_head_h);
    blocks.insert(blocks.end(), hh.begin(), hh.end());
    if (head_m) {
        auto hm = head_m->param_blocks("head_m", g_head_m);
        blocks.insert(blocks.end(), hm.begin(), hm.end());
    }
    auto ob = ode.param_blocks("ode", g_ode);
    blocks.insert(blocks.end(), ob.begin(), ob.end());
    auto db = dec.param_blocks("dec", g_dec);
    blocks.insert(blocks.end(), db.begin(), db.end());
    return blocks;
}

VaeOneStepModel make_vae_onestep(const TrainConfig& cfg, std::size_t rank, Rng& rng) {
    VaeOneStepModel m;
    m.rank = rank;
    const std::size_t encw = cfg.encoder_width();
    for (std::size_t l = 0; l < std::max<std::size_t>(cfg.enc_layers, 1); ++l)
        m.enc.push_back(neural::make_gru(l == 0 ? rank : encw, encw, rng));
    m.head_h = neural::make_vae_head(encw, cfg.latent_dim, rng);
    if (cfg.model != dynamics::ModelKind::node)
        m.head_m = neural::make_vae_head(encw, cfg.latent_dim, rng);
    m.ode = dynamics::make_model(cfg.model, cfg.latent_dim, cfg.ode_layers, cfg.ode_hidden, rng,
                                 cfg.epsilon);
    const std::size_t dech = cfg.dec_hidden ? cfg.dec_hidden : cfg.latent_dim;
    m.dec = neural::make_mlp(cfg.latent_dim, rank, std::max<std::size_t>(cfg.dec_layers, 1), dech,
                             rng);
    return m;
}

namespace {

odeint::Dopri5Config integ_config(const TrainConfig& cfg) {
    odeint::Dopri5Config ic;
    ic.rtol = cfg.rtol;
    ic.atol = cfg.atol;
    return ic;
}

struct VaeBatchWork {
    std::vector<std::vector<std::vector<neural::GruTape>>> enc_tapes; // [w][step][layer]
    std::vector<neural::VaeSample> sample_h, sample_m;
    std::vector<double> y0;
    odeint::Trajectory traj;
    std::vector<neural::MlpTape> dec_tapes;
    std::vector<std::vector<double>> preds; // [w] r
    double kl_sum = 0.0;
    double max_state_norm = 0.0;
};

VaeBatchWork forward_batch(VaeOneStepModel& model,
                           const std::vector<const numkit::DenseMatrix*>& inputs,
                           const TrainConfig& cfg, bool keep_tapes,
                           const std::vector<std::vector<double>>* noise_h,
                           const std::vector<std::vector<double>>* noise_m) {
    const std::size_t batch = inputs.size();
    const std::size_t d = cfg.latent_dim;
    const std::size_t encw = cfg.encoder_width();
    const std::size_t width = model.ode.state_width();
    const std::vector<double> zero_noise(d, 0.0);

    VaeBatchWork work;
    work.y0.assign(batch * width, 0.0);
    work.sample_h.resize(batch);
    if (model.head_m) work.sample_m.resize(batch);
    if (keep_tapes) work.enc_tapes.resize(batch);
    work.dec_tapes.resize(batch);
    work.preds.resize(batch);

    for (std::size_t w = 0; w < batch; ++w) {
        const auto& win = *inputs[w];
        std::vector<std::vector<double>> hidden(model.enc.size(),
                                                std::vector<double>(encw, 0.0));
        if (keep_tapes) {
            work.enc_tapes[w].resize(win.rows());
            for (auto& per_step : work.enc_tapes[w]) per_step.resize(model.enc.size());
        }
        for (std::size_t s = 0; s < win.rows(); ++s) {
            std::vector<double> layer_in(win.row(s).begin(), win.row(s).end());
            for (std::size_t l = 0; l < model.enc.size(); ++l) {
                hidden[l] = neural::gru_step(model.enc[l], hidden[l], layer_in,
                                             keep_tapes ? &work.enc_tapes[w][s][l] : nullptr);
                layer_in = hidden[l];
            }
        }
        const auto& top = hidden.back();
        work.sample_h[w] =
            neural::vae_sample(model.head_h, top, noise_h ? (*noise_h)[w] : zero_noise);
        work.kl_sum += work.sample_h[w].kl;
        std::copy(work.sample_h[w].latent.begin(), work.sample_h[w].latent.end(),
                  work.y0.begin() + static_cast<std::ptrdiff_t>(w * width));
        if (model.head_m) {
            work.sample_m[w] =
                neural::vae_sample(*model.head_m, top, noise_m ? (*noise_m)[w] : zero_noise);
            work.kl_sum += work.sample_m[w].kl;
            std::copy(work.sample_m[w].latent.begin(), work.sample_m[w].latent.end(),
                      work.y0.begin() + static_cast<std::ptrdiff_t>(w * width + d));
        }
    }

    work.traj = dynamics::integrate_model(model.ode, work.y0, 0.0, 1.0, integ_config(cfg), batch);
    for (const auto& state : work.traj.states)
        for (std::size_t w = 0; w < batch; ++w) {
            double nrm = 0.0;
            for (std::size_t i = 0; i < d; ++i) nrm += state[w * width + i] * state[w * width + i];
            work.max_state_norm = std::max(work.max_state_norm, std::sqrt(nrm));
        }

    const auto& final_state = work.traj.final_state();
    for (std::size_t w = 0; w < batch; ++w) {
        const std::span<const double> h1(final_state.data() + w * width, d);
        work.preds[w] = neural::mlp_forward(model.dec, h1, keep_tapes ? &work.dec_tapes[w] : nullptr);
    }
    return work;
}

double batch_mse(const VaeBatchWork& work, const std::vector<const numkit::DenseMatrix*>& labels) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t w = 0; w < labels.size(); ++w) {
        const auto& lab = *labels[w];
        for (std::size_t j = 0; j < lab.cols(); ++j) {
            const double d = work.preds[w][j] - lab(0, j);
            acc += d * d;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

struct BackwardInfo {
    long bwd_nfe = 0;
    double adj_norm_t0 = 0.0;
    double adj_norm_tT = 0.0;
};

BackwardInfo backward_batch(VaeOneStepModel& model, VaeBatchWork& work,
                            const std::vector<const numkit::DenseMatrix*>& labels,
                            const TrainConfig& cfg) {
    const std::size_t batch = labels.size();
    const std::size_t d = cfg.latent_dim;
    const std::size_t width = model.ode.state_width();
    const double inv_batch = 1.0 / static_cast<double>(batch);
    std::size_t count = 0;
    for (std::size_t w = 0; w < batch; ++w) count += labels[w]->cols();

    // decoder -> cotangent at t = 1
    std::vector<dynamics::CotangentPulse> pulses(1);
    pulses[0].time = 1.0;
    pulses[0].value.assign(batch * width, 0.0);
    for (std::size_t w = 0; w < batch; ++w) {
        std::vector<double> dpred(model.rank);
        for (std::size_t j = 0; j < model.rank; ++j)
            dpred[j] =
                2.0 * (work.preds[w][j] - (*labels[w])(0, j)) / static_cast<double>(count);
        const auto dh1 = neural::mlp_vjp(model.dec, work.dec_tapes[w], dpred, model.g_dec);
        for (std::size_t i = 0; i < d; ++i) pulses[0].value[w * width + i] += dh1[i];
    }

    dynamics::AdjointOptions opts;
    opts.integ = integ_config(cfg);
    auto adj =
        dynamics::adjoint_gradient_multi(model.ode, work.traj, std::move(pulses), opts, batch);
    dynamics::add_param_gradient(model.ode, adj.param_gradient, model.g_ode);

    // heads and stacked encoder backward
    for (std::size_t w = 0; w < batch; ++w) {
        const std::span<const double> a0(adj.initial_adjoint.data() + w * width, width);
        std::vector<double> denc_top = neural::vae_vjp(
            model.head_h, work.sample_h[w], a0.subspan(0, d), cfg.kl_weight * inv_batch,
            model.g_head_h);
        if (model.head_m) {
            const auto denc_m = neural::vae_vjp(*model.head_m, work.sample_m[w],
                                                a0.subspan(d, d), cfg.kl_weight * inv_batch,
                                                model.g_head_m);
            for (std::size_t i = 0; i < denc_top.size(); ++i) denc_top[i] += denc_m[i];
        }

        const std::size_t steps = work.enc_tapes[w].size();
        const std::size_t layers = model.enc.size();
        std::vector<std::vector<double>> carry(layers,
                                               std::vector<double>(cfg.encoder_width(), 0.0));
        for (std::size_t s = steps; s-- > 0;) {
            std::vector<std::vector<double>> inject(layers);
            inject[layers - 1] =
                (s + 1 == steps) ? denc_top : std::vector<double>(cfg.encoder_width(), 0.0);
            for (std::size_t l = layers; l-- > 0;) {
                std::vector<double> dh_next = carry[l];
                if (!inject[l].empty())
                    for (std::size_t i = 0; i < dh_next.size(); ++i) dh_next[i] += inject[l][i];
                std::vector<double> dh_prev, dx;
                neural::gru_vjp(model.enc[l], work.enc_tapes[w][s][l], dh_next, dh_prev, dx,
                                model.g_enc[l]);
                carry[l] = std::move(dh_prev);
                if (l > 0) inject[l - 1] = std::move(dx); // input of layer l is output of l-1
            }
        }
    }

    BackwardInfo info;
    info.bwd_nfe = adj.backward_nfe;
    info.adj_norm_t0 = adj.trace.initial_norm;
    info.adj_norm_tT = adj.trace.terminal_norm;
    return info;
}

} // namespace

std::vector<std::vector<double>> vae_predict(VaeOneStepModel& model,
                                             const std::vector<const numkit::DenseMatrix*>& inputs,
                                             const TrainConfig& cfg) {
    auto work = forward_batch(model, inputs, cfg, false, nullptr, nullptr);
    return std::move(work.preds);
}

double vae_loss_and_gradients(VaeOneStepModel& model,
                              const std::vector<const numkit::DenseMatrix*>& inputs,
                              const std::vector<const numkit::DenseMatrix*>& labels,
                              const TrainConfig& cfg,
                              const std::vector<std::vector<double>>& noise_h,
                              const std::vector<std::vector<double>>* noise_m) {
    auto work = forward_batch(model, inputs, cfg, true, &noise_h, noise_m);
    const double mse = batch_mse(work, labels);
    backward_batch(model, work, labels, cfg);
    return mse + cfg.kl_weight * work.kl_sum / static_cast<double>(inputs.size());
}

double vae_loss_only(VaeOneStepModel& model,
                     const std::vector<const numkit::DenseMatrix*>& inputs,
                     const std::vector<const numkit::DenseMatrix*>& labels,
                     const TrainConfig& cfg, const std::vector<std::vector<double>>& noise_h,
                     const std::vector<std::vector<double>>* noise_m) {
    auto work = forward_batch(model, inputs, cfg, false, &noise_h, noise_m);
    const double mse = batch_mse(work, labels);
    return mse + cfg.kl_weight * work.kl_sum / static_cast<double>(inputs.size());
}

VaeOutcome train_vae_onestep(const WindowDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (cfg.task != Task::vks_steady_vae)
        fail(ErrorKind::invalid_argument, "train_vae_onestep: task must be vks_steady_vae");
    if (data.train_idx.empty())
        fail(ErrorKind::invalid_argument, "train_vae_onestep: no training windows");
    if (data.seq_out != 1)
        fail(ErrorKind::invalid_argument, "train_vae_onestep: labels must be single-step");

    Rng rng(cfg.seed);
    VaeOutcome outcome{TrainRun{}, make_vae_onestep(cfg, data.rank, rng)};
    VaeOneStepModel& model = outcome.model;
    TrainRun& run = outcome.run;
    run.seed = cfg.seed;

    neural::AdamW optimizer(neural::AdamWConfig{.lr = cfg.lr, .weight_decay = cfg.weight_decay});
    auto blocks = model.param_blocks();

    std::vector<const numkit::DenseMatrix*> train_in, train_lab, val_in, val_lab;
    for (std::size_t t : data.train_idx) {
        train_in.push_back(&data.inputs[t]);
        train_lab.push_back(&data.labels[t]);
    }
    for (std::size_t v : data.val_idx) {
        val_in.push_back(&data.inputs[v]);
        val_lab.push_back(&data.labels[v]);
    }

    const bool second_order = model.head_m.has_value();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        optimizer.set_lr(cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch)));
        // one noise draw per window per epoch, in fixed order
        std::vector<std::vector<double>> noise_h(train_in.size()), noise_m;
        if (second_order) noise_m.resize(train_in.size());
        for (std::size_t w = 0; w < train_in.size(); ++w) {
            noise_h[w].resize(cfg.latent_dim);
            for (auto& v : noise_h[w]) v = rng.normal();
            if (second_order) {
                noise_m[w].resize(cfg.latent_dim);
                for (auto& v : noise_m[w]) v = rng.normal();
            }
        }

        neural::zero_grads(blocks);
        auto work = forward_batch(model, train_in, cfg, true, &noise_h,
                                  second_order ? &noise_m : nullptr);
        const double mse = batch_mse(work, train_lab);
        const double loss = mse + cfg.kl_weight * work.kl_sum / static_cast<double>(train_in.size());
        bool diverged = !std::isfinite(loss);

        BackwardInfo info;
        if (!diverged) {
            info = backward_batch(model, work, train_lab, cfg);
            try {
                optimizer.step(blocks);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::divergence)
                    diverged = true;
                else
                    throw;
            }
        }
        if (diverged) {
            run.diverged = true;
            run.diverged_epoch = static_cast<long>(epoch);
            break;
        }

        double val_mse = 0.0;
        if (!val_in.empty()) {
            auto vwork = forward_batch(model, val_in, cfg, false, nullptr, nullptr);
            val_mse = batch_mse(vwork, val_lab);
        }

        const std::size_t width = model.ode.state_width();
        std::vector<double> y_mean(width, 0.0);
        for (std::size_t w = 0; w < train_in.size(); ++w)
            for (std::size_t i = 0; i < width; ++i) y_mean[i] += work.y0[w * width + i];
        for (auto& v : y_mean) v /= static_cast<double>(train_in.size());
        const auto rhs = dynamics::make_batched_rhs(model.ode, 1);
        const double stiffness = odeint::stiffness_estimate(rhs, y_mean, 0.0).kappa;

        io::EpochRecord rec;
        rec.epoch = static_cast<long>(epoch);
        rec.train_mse = mse;
        rec.val_mse = val_mse;
        rec.fwd_nfe = static_cast<double>(work.traj.nfe);
        rec.bwd_nfe = static_cast<double>(info.bwd_nfe);
        rec.stiffness = stiffness;
        rec.adj_norm_t0 = info.adj_norm_t0;
        rec.adj_norm_tT = info.adj_norm_tT;
        if (!std::isfinite(rec.val_mse)) {
            run.diverged = true;
            run.diverged_epoch = static_cast<long>(epoch);
            break;
        }
        run.records.push_back(rec);
        run.max_latent_norm.push_back(work.max_state_norm);
    }
    return outcome;
}

numkit::DenseMatrix rollout_vae(VaeOneStepModel& model, const numkit::DenseMatrix& seed_window,
                                std::size_t horizon, const TrainConfig& cfg) {
    if (seed_window.cols() != model.rank)
        fail(ErrorKind::shape, "rollout_vae: seed width mismatch");
    numkit::DenseMatrix window = seed_window;
    numkit::DenseMatrix out(horizon, model.rank);
    for (std::size_t k = 0; k < horizon; ++k) {
        const auto preds = vae_predict(model, {&window}, cfg);
        std::copy(preds.front().begin(), preds.front().end(), out.row_ptr(k));
        // shift the window and append the prediction
        for (std::size_t i = 0; i + 1 < window.rows(); ++i)
            std::copy(window.row_ptr(i + 1), window.row_ptr(i + 1) + model.rank, window.row_ptr(i));
        std::copy(preds.front().begin(), preds.front().end(), window.row_ptr(window.rows() - 1));
    }
    return out;
}

} // namespace hbrom::pipeline
