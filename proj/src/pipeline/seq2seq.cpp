// SPDX-License-Identifier: Apache-2.0
#include "pipeline/seq2seq.hpp"

#include <cmath>

#include "dynamics/adjoint.hpp"
#include "odeint/stiffness.hpp"

namespace hbrom::pipeline {

std::vector<neural::ParamBlock> Seq2SeqModel::param_blocks() {
    auto blocks = enc_h.param_blocks("enc_h", g_enc_h);
    if (enc_m) {
        auto more = enc_m->param_blocks("enc_m", g_enc_m);
        blocks.insert(blocks.end(), more.begin(), more.end());
    }
    auto ode_blocks = ode.param_blocks("ode", g_ode);
    blocks.insert(blocks.end(), ode_blocks.begin(), ode_blocks.end());
    auto dec_blocks = dec.param_blocks("dec", g_dec);
    blocks.insert(blocks.end(), dec_blocks.begin(), dec_blocks.end());
    if (g_w_out.rows() != w_out.rows()) {
        g_w_out = numkit::DenseMatrix(w_out.rows(), w_out.cols());
        g_b_out.assign(b_out.size(), 0.0);
    }
    blocks.push_back({"out.weight", w_out.data().data(), g_w_out.data().data(),
                      w_out.data().size(), &out_version});
    blocks.push_back({"out.bias", b_out.data(), g_b_out.data(), b_out.size(), &out_version});
    return blocks;
}

Seq2SeqModel make_seq2seq(const TrainConfig& cfg, std::size_t rank, Rng& rng) {
    Seq2SeqModel m;
    m.rank = rank;
    const std::size_t d = cfg.latent_dim;
    m.enc_h = neural::make_gru(rank, d, rng);
    if (cfg.model != dynamics::ModelKind::node) m.enc_m = neural::make_gru(rank, d, rng);
    m.ode = dynamics::make_model(cfg.model, d, cfg.ode_layers, cfg.ode_hidden, rng, cfg.epsilon);
    m.dec = neural::make_gru(d, d, rng);
    const double bound = std::sqrt(1.0 / static_cast<double>(d));
    m.w_out = numkit::DenseMatrix(rank, d);
    for (auto& v : m.w_out.data()) v = rng.uniform(-bound, bound);
    m.b_out.assign(rank, 0.0);
    for (auto& v : m.b_out) v = rng.uniform(-bound, bound);
    return m;
}

namespace {

struct BatchWork {
    std::vector<std::vector<neural::GruTape>> enc_tapes_h; // [window][input step]
    std::vector<std::vector<neural::GruTape>> enc_tapes_m;
    std::vector<double> y0;
    odeint::Trajectory traj;
    std::vector<std::vector<neural::GruTape>> dec_tapes;   // [window][output step]
    std::vector<numkit::DenseMatrix> dec_hiddens;          // [window] seq_out x d
    std::vector<numkit::DenseMatrix> preds;                // [window] seq_out x r
    double max_state_norm = 0.0;
};

odeint::Dopri5Config integ_config(const TrainConfig& cfg) {
    odeint::Dopri5Config ic;
    ic.rtol = cfg.rtol;
    ic.atol = cfg.atol;
    return ic;
}

// encode + integrate + decode one batch of windows
BatchWork forward_batch(Seq2SeqModel& model, const std::vector<const numkit::DenseMatrix*>& inputs,
                        const TrainConfig& cfg, bool keep_tapes) {
    const std::size_t batch = inputs.size();
    const std::size_t d = cfg.latent_dim;
    const std::size_t width = model.ode.state_width();
    const std::size_t seq_out = cfg.seq_out;

    BatchWork work;
    work.y0.assign(batch * width, 0.0);
    if (keep_tapes) {
        work.enc_tapes_h.resize(batch);
        if (model.enc_m) work.enc_tapes_m.resize(batch);
        work.dec_tapes.resize(batch);
    }
    work.dec_hiddens.assign(batch, numkit::DenseMatrix(seq_out, d));
    work.preds.assign(batch, numkit::DenseMatrix(seq_out, model.rank));

    for (std::size_t w = 0; w < batch; ++w) {
        const auto& win = *inputs[w];
        std::vector<double> h(d, 0.0);
        if (keep_tapes) work.enc_tapes_h[w].resize(win.rows());
        for (std::size_t s = 0; s < win.rows(); ++s)
            h = neural::gru_step(model.enc_h, h, win.row(s),
                                 keep_tapes ? &work.enc_tapes_h[w][s] : nullptr);
        std::copy(h.begin(), h.end(), work.y0.begin() + static_cast<std::ptrdiff_t>(w * width));
        if (model.enc_m) {
            std::vector<double> m(d, 0.0);
            if (keep_tapes) work.enc_tapes_m[w].resize(win.rows());
            for (std::size_t s = 0; s < win.rows(); ++s)
                m = neural::gru_step(*model.enc_m, m, win.row(s),
                                     keep_tapes ? &work.enc_tapes_m[w][s] : nullptr);
            std::copy(m.begin(), m.end(),
                      work.y0.begin() + static_cast<std::ptrdiff_t>(w * width + d));
        }
    }

    work.traj = dynamics::integrate_model(model.ode, work.y0, 0.0,
                                          static_cast<double>(seq_out), integ_config(cfg), batch);
    for (const auto& state : work.traj.states)
        for (std::size_t w = 0; w < batch; ++w) {
            double nrm = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double v = state[w * width + i];
                nrm += v * v;
            }
            work.max_state_norm = std::max(work.max_state_norm, std::sqrt(nrm));
        }

    std::vector<std::vector<double>> hdec(batch, std::vector<double>(d, 0.0));
    for (std::size_t k = 1; k <= seq_out; ++k) {
        const auto latents = odeint::dense_eval(work.traj, static_cast<double>(k));
        for (std::size_t w = 0; w < batch; ++w) {
            const std::span<const double> hk(latents.data() + w * width, d);
            if (keep_tapes) {
                work.dec_tapes[w].resize(seq_out);
                hdec[w] = neural::gru_step(model.dec, hdec[w], hk, &work.dec_tapes[w][k - 1]);
            } else {
                hdec[w] = neural::gru_step(model.dec, hdec[w], hk);
            }
            for (std::size_t i = 0; i < d; ++i) work.dec_hiddens[w](k - 1, i) = hdec[w][i];
            const auto out = numkit::matvec(model.w_out, hdec[w]);
            for (std::size_t j = 0; j < model.rank; ++j)
                work.preds[w](k - 1, j) = out[j] + model.b_out[j];
        }
    }
    return work;
}

double batch_mse(const BatchWork& work, const std::vector<const numkit::DenseMatrix*>& labels) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t w = 0; w < labels.size(); ++w) {
        const auto& lab = *labels[w];
        for (std::size_t k = 0; k < lab.rows(); ++k)
            for (std::size_t j = 0; j < lab.cols(); ++j) {
                const double dd = work.preds[w](k, j) - lab(k, j);
                acc += dd * dd;
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

// gradients for one batch, accumulated into the model's grad blocks
BackwardInfo backward_batch(Seq2SeqModel& model, BatchWork& work,
                            const std::vector<const numkit::DenseMatrix*>& labels,
                            const TrainConfig& cfg) {
    const std::size_t batch = labels.size();
    const std::size_t d = cfg.latent_dim;
    const std::size_t width = model.ode.state_width();
    const std::size_t seq_out = cfg.seq_out;
    std::size_t count = 0;
    for (std::size_t w = 0; w < batch; ++w) count += labels[w]->data().size();

    // decoder backward-through-time; collects cotangents on the latent h
    // part at each integer output time
    std::vector<dynamics::CotangentPulse> pulses(seq_out);
    for (std::size_t k = 0; k < seq_out; ++k) {
        pulses[k].time = static_cast<double>(k + 1);
        pulses[k].value.assign(batch * width, 0.0);
    }
    for (std::size_t w = 0; w < batch; ++w) {
        std::vector<double> dh_dec(d, 0.0);
        for (std::size_t k = seq_out; k-- > 0;) {
            std::vector<double> dpred(model.rank);
            for (std::size_t j = 0; j < model.rank; ++j)
                dpred[j] = 2.0 * (work.preds[w](k, j) - (*labels[w])(k, j)) /
                           static_cast<double>(count);
            // linear readout
            for (std::size_t j = 0; j < model.rank; ++j) {
                double* gw = model.g_w_out.row_ptr(j);
                for (std::size_t i = 0; i < d; ++i) gw[i] += dpred[j] * work.dec_hiddens[w](k, i);
                model.g_b_out[j] += dpred[j];
                const double* wj = model.w_out.row_ptr(j);
                for (std::size_t i = 0; i < d; ++i) dh_dec[i] += wj[i] * dpred[j];
            }
            std::vector<double> dh_prev, dx;
            neural::gru_vjp(model.dec, work.dec_tapes[w][k], dh_dec, dh_prev, dx, model.g_dec);
            dh_dec = std::move(dh_prev);
            for (std::size_t i = 0; i < d; ++i) pulses[k].value[w * width + i] += dx[i];
        }
    }

    dynamics::AdjointOptions opts;
    opts.integ = integ_config(cfg);
    auto adj = dynamics::adjoint_gradient_multi(model.ode, work.traj, std::move(pulses), opts,
                                                batch);
    dynamics::add_param_gradient(model.ode, adj.param_gradient, model.g_ode);

    // encoder backward-through-time from the initial adjoint
    for (std::size_t w = 0; w < batch; ++w) {
        std::vector<double> dh(adj.initial_adjoint.begin() + static_cast<std::ptrdiff_t>(w * width),
                               adj.initial_adjoint.begin() +
                                   static_cast<std::ptrdiff_t>(w * width + d));
        for (std::size_t s = work.enc_tapes_h[w].size(); s-- > 0;) {
            std::vector<double> dh_prev, dx;
            neural::gru_vjp(model.enc_h, work.enc_tapes_h[w][s], dh, dh_prev, dx, model.g_enc_h);
            dh = std::move(dh_prev);
        }
        if (model.enc_m) {
            std::vector<double> dm(
                adj.initial_adjoint.begin() + static_cast<std::ptrdiff_t>(w * width + d),
                adj.initial_adjoint.begin() + static_cast<std::ptrdiff_t>(w * width + 2 * d));
            for (std::size_t s = work.enc_tapes_m[w].size(); s-- > 0;) {
                std::vector<double> dm_prev, dx;
                neural::gru_vjp(*model.enc_m, work.enc_tapes_m[w][s], dm, dm_prev, dx,
                                model.g_enc_m);
                dm = std::move(dm_prev);
            }
        }
    }

    BackwardInfo info;
    info.bwd_nfe = adj.backward_nfe;
    info.adj_norm_t0 = adj.trace.initial_norm;
    info.adj_norm_tT = adj.trace.terminal_norm;
    return info;
}

void clip_gradients(const std::vector<neural::ParamBlock>& blocks, double clip_norm) {
    if (clip_norm <= 0.0) return;
    double total = 0.0;
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.size; ++i) total += b.grad[i] * b.grad[i];
    total = std::sqrt(total);
    if (total <= clip_norm) return;
    const double scale = clip_norm / total;
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.size; ++i) b.grad[i] *= scale;
}

} // namespace

std::vector<numkit::DenseMatrix> seq2seq_predict(Seq2SeqModel& model,
                                                 const std::vector<const numkit::DenseMatrix*>& inputs,
                                                 const TrainConfig& cfg) {
    auto work = forward_batch(model, inputs, cfg, false);
    return std::move(work.preds);
}

double seq2seq_loss_and_gradients(Seq2SeqModel& model,
                                  const std::vector<const numkit::DenseMatrix*>& inputs,
                                  const std::vector<const numkit::DenseMatrix*>& labels,
                                  const TrainConfig& cfg) {
    auto work = forward_batch(model, inputs, cfg, true);
    const double mse = batch_mse(work, labels);
    backward_batch(model, work, labels, cfg);
    return mse;
}

Seq2SeqOutcome train_seq2seq(const WindowDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.train_idx.empty())
        fail(ErrorKind::invalid_argument, "train_seq2seq: no training windows");
    if (data.seq_in != cfg.seq_in || data.seq_out != cfg.seq_out)
        fail(ErrorKind::invalid_argument, "train_seq2seq: dataset does not match config windows");

    Rng rng(cfg.seed);
    Seq2SeqOutcome outcome{TrainRun{}, make_seq2seq(cfg, data.rank, rng)};
    Seq2SeqModel& model = outcome.model;
    TrainRun& run = outcome.run;
    run.seed = cfg.seed;

    neural::AdamW optimizer(
        neural::AdamWConfig{.lr = cfg.lr, .weight_decay = cfg.weight_decay});
    auto blocks = model.param_blocks();

    std::vector<const numkit::DenseMatrix*> val_in, val_lab;
    for (std::size_t v : data.val_idx) {
        val_in.push_back(&data.inputs[v]);
        val_lab.push_back(&data.labels[v]);
    }

    std::vector<std::size_t> order(data.train_idx);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        optimizer.set_lr(cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch)));
        if (cfg.batch_size > 0) rng.shuffle(order);
        const std::size_t bs = cfg.batch_size > 0 ? cfg.batch_size : order.size();

        double train_acc = 0.0;
        std::size_t train_count = 0;
        long fwd_nfe = 0, bwd_nfe = 0;
        double adj_t0 = 0.0, adj_tT = 0.0;
        double max_state = 0.0;
        std::vector<double> last_y0;
        bool diverged = false;

        for (std::size_t at = 0; at < order.size() && !diverged; at += bs) {
            const std::size_t stop = std::min(at + bs, order.size());
            std::vector<const numkit::DenseMatrix*> in, lab;
            for (std::size_t b = at; b < stop; ++b) {
                in.push_back(&data.inputs[order[b]]);
                lab.push_back(&data.labels[order[b]]);
            }
            neural::zero_grads(blocks);
            auto work = forward_batch(model, in, cfg, true);
            fwd_nfe += work.traj.nfe;
            max_state = std::max(max_state, work.max_state_norm);
            const double mse = batch_mse(work, lab);
            if (!std::isfinite(mse)) {
                diverged = true;
                break;
            }
            std::size_t elems = 0;
            for (const auto* l : lab) elems += l->data().size();
            train_acc += mse * static_cast<double>(elems);
            train_count += elems;

            const auto info = backward_batch(model, work, lab, cfg);
            bwd_nfe += info.bwd_nfe;
            adj_t0 = info.adj_norm_t0;
            adj_tT = info.adj_norm_tT;
            last_y0 = std::move(work.y0);

            clip_gradients(blocks, cfg.clip_norm);
            try {
                optimizer.step(blocks);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::divergence) {
                    diverged = true;
                    break;
                }
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
            auto vwork = forward_batch(model, val_in, cfg, false);
            val_mse = batch_mse(vwork, val_lab);
        }

        // stiffness at the batch-mean latent state
        double stiffness = 1.0;
        if (!last_y0.empty()) {
            const std::size_t width = model.ode.state_width();
            const std::size_t batch = last_y0.size() / width;
            std::vector<double> y_mean(width, 0.0);
            for (std::size_t w = 0; w < batch; ++w)
                for (std::size_t i = 0; i < width; ++i) y_mean[i] += last_y0[w * width + i];
            for (auto& v : y_mean) v /= static_cast<double>(batch);
            const auto rhs = dynamics::make_batched_rhs(model.ode, 1);
            stiffness = odeint::stiffness_estimate(rhs, y_mean, 0.0).kappa;
        }

        io::EpochRecord rec;
        rec.epoch = static_cast<long>(epoch);
        rec.train_mse = train_count ? train_acc / static_cast<double>(train_count) : 0.0;
        rec.val_mse = val_mse;
        rec.fwd_nfe = static_cast<double>(fwd_nfe);
        rec.bwd_nfe = static_cast<double>(bwd_nfe);
        rec.stiffness = stiffness;
        rec.adj_norm_t0 = adj_t0;
        rec.adj_norm_tT = adj_tT;
        if (!std::isfinite(rec.val_mse)) {
            run.diverged = true;
            run.diverged_epoch = static_cast<long>(epoch);
            break;
        }
        run.records.push_back(rec);
        run.max_latent_norm.push_back(max_state);
    }
    return outcome;
}

numkit::DenseMatrix rollout_seq2seq(Seq2SeqModel& model, const numkit::DenseMatrix& seed_window,
                                    std::size_t horizon, const TrainConfig& cfg) {
    if (seed_window.rows() != cfg.seq_in || seed_window.cols() != model.rank)
        fail(ErrorKind::shape, "rollout_seq2seq: seed window has wrong shape");
    numkit::DenseMatrix window = seed_window;
    numkit::DenseMatrix out(horizon, model.rank);
    std::size_t produced = 0;
    while (produced < horizon) {
        const auto preds = seq2seq_predict(model, {&window}, cfg);
        const auto& block = preds.front();
        for (std::size_t k = 0; k < block.rows() && produced < horizon; ++k, ++produced)
            std::copy(block.row_ptr(k), block.row_ptr(k) + model.rank, out.row_ptr(produced));
        // slide the window forward over the appended predictions
        numkit::DenseMatrix next(cfg.seq_in, model.rank);
        const std::size_t shift = std::min<std::size_t>(block.rows(), cfg.seq_in);
        for (std::size_t i = 0; i + shift < cfg.seq_in; ++i)
            std::copy(window.row_ptr(i + shift), window.row_ptr(i + shift) + model.rank,
                      next.row_ptr(i));
        for (std::size_t i = 0; i < shift; ++i)
            std::copy(block.row_ptr(block.rows() - shift + i),
                      block.row_ptr(block.rows() - shift + i) + model.rank,
                      next.row_ptr(cfg.seq_in - shift + i));
        window = std::move(next);
    }
    return out;
}

} // namespace hbrom::pipeline
