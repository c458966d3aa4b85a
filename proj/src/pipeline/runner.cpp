// SPDX-License-Identifier: Apache-2.0
#include "pipeline/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "io/metrics_csv.hpp"
#include "json.hpp"

namespace hbrom::pipeline {

namespace {

using nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': JSON parse error: " + e.what());
    }
}

json matrix_to_json(const numkit::DenseMatrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

numkit::DenseMatrix matrix_from_json(const json& j) {
    return numkit::DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                               j.at("data").get<std::vector<double>>());
}

json config_to_json_obj(const TrainConfig& cfg) {
    json j;
    j["task"] = to_string(cfg.task);
    j["model"] = dynamics::to_string(cfg.model);
    j["ode_layers"] = cfg.ode_layers;
    j["ode_hidden"] = cfg.ode_hidden;
    j["latent_dim"] = cfg.latent_dim;
    j["enc_layers"] = cfg.enc_layers;
    j["enc_hidden"] = cfg.enc_hidden;
    j["dec_layers"] = cfg.dec_layers;
    j["dec_hidden"] = cfg.dec_hidden;
    j["seq_in"] = cfg.seq_in;
    j["seq_out"] = cfg.seq_out;
    j["stride"] = cfg.stride;
    j["split_fraction"] = cfg.split_fraction;
    j["lr"] = cfg.lr;
    j["lr_decay"] = cfg.lr_decay;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["weight_decay"] = cfg.weight_decay;
    j["clip_norm"] = cfg.clip_norm;
    j["kl_weight"] = cfg.kl_weight;
    j["rtol"] = cfg.rtol;
    j["atol"] = cfg.atol;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["rank"] = cfg.rank;
    j["max_timesteps"] = cfg.max_timesteps;
    return j;
}

TrainConfig config_from_json_obj(const json& j) {
    TrainConfig base;
    if (j.contains("task")) base.task = task_from_string(j["task"].get<std::string>());
    dynamics::ModelKind kind = base.model;
    if (j.contains("model")) kind = dynamics::model_kind_from_string(j["model"].get<std::string>());
    TrainConfig cfg = default_config(base.task, kind);

    static const std::vector<std::string> known = {
        "task",       "model",        "ode_layers",  "ode_hidden", "latent_dim",
        "enc_layers", "enc_hidden",   "dec_layers",  "dec_hidden", "seq_in",
        "seq_out",    "stride",       "split_fraction", "lr",      "lr_decay",
        "epochs",     "batch_size",   "weight_decay", "clip_norm", "kl_weight",
        "rtol",       "atol",         "epsilon",     "seed",       "rank",
        "max_timesteps"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
    }
    auto get_sz = [&](const char* key, std::size_t& field) {
        if (j.contains(key)) field = j[key].get<std::size_t>();
    };
    auto get_d = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    get_sz("ode_layers", cfg.ode_layers);
    get_sz("ode_hidden", cfg.ode_hidden);
    get_sz("latent_dim", cfg.latent_dim);
    get_sz("enc_layers", cfg.enc_layers);
    get_sz("enc_hidden", cfg.enc_hidden);
    get_sz("dec_layers", cfg.dec_layers);
    get_sz("dec_hidden", cfg.dec_hidden);
    get_sz("seq_in", cfg.seq_in);
    get_sz("seq_out", cfg.seq_out);
    get_sz("stride", cfg.stride);
    get_d("split_fraction", cfg.split_fraction);
    get_d("lr", cfg.lr);
    get_d("lr_decay", cfg.lr_decay);
    get_sz("epochs", cfg.epochs);
    get_sz("batch_size", cfg.batch_size);
    get_d("weight_decay", cfg.weight_decay);
    get_d("clip_norm", cfg.clip_norm);
    get_d("kl_weight", cfg.kl_weight);
    get_d("rtol", cfg.rtol);
    get_d("atol", cfg.atol);
    get_d("epsilon", cfg.epsilon);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    get_sz("rank", cfg.rank);
    get_sz("max_timesteps", cfg.max_timesteps);
    return cfg;
}

json pod_artifact_to_json(const io::PodArtifact& a) {
    json j;
    j["rank"] = a.basis.rank;
    j["effective_rank"] = a.basis.effective_rank;
    j["rank_deficient"] = a.basis.rank_deficient;
    j["eigenvalues"] = a.basis.eigenvalues;
    j["mean"] = a.basis.mean;
    j["modes"] = matrix_to_json(a.basis.modes);
    j["coeffs"] = matrix_to_json(a.basis.coeffs);
    j["times"] = a.times;
    j["source"] = a.source;
    if (a.params)
        j["params"] = {{"eta_u", a.params->eta_u}, {"eta_rho", a.params->eta_rho}};
    return j;
}

io::PodArtifact pod_artifact_from_json(const json& j) {
    io::PodArtifact a;
    a.basis.rank = j.at("rank").get<std::size_t>();
    a.basis.effective_rank = j.at("effective_rank").get<std::size_t>();
    a.basis.rank_deficient = j.at("rank_deficient").get<bool>();
    a.basis.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    a.basis.mean = j.at("mean").get<std::vector<double>>();
    a.basis.modes = matrix_from_json(j.at("modes"));
    a.basis.coeffs = matrix_from_json(j.at("coeffs"));
    a.times = j.at("times").get<std::vector<double>>();
    a.source = j.at("source").get<std::string>();
    if (j.contains("params")) {
        fom::EulerParams p;
        p.eta_u = j["params"].at("eta_u").get<double>();
        p.eta_rho = j["params"].at("eta_rho").get<double>();
        a.params = p;
    }
    return a;
}

// first rank columns of the coefficient matrix, rows capped by max_timesteps
numkit::DenseMatrix sliced_coeffs(const io::PodArtifact& artifact, const TrainConfig& cfg) {
    const auto& c = artifact.basis.coeffs;
    if (cfg.rank > c.cols())
        fail(ErrorKind::invalid_argument,
             "training rank exceeds the rank of the reduction artifact");
    std::size_t rows = c.rows();
    if (cfg.max_timesteps > 0) rows = std::min(rows, cfg.max_timesteps);
    numkit::DenseMatrix out(rows, cfg.rank);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cfg.rank; ++j) out(i, j) = c(i, j);
    return out;
}

} // namespace

std::string config_to_json(const TrainConfig& cfg) { return config_to_json_obj(cfg).dump(); }

TrainConfig config_from_json(const std::string& text) {
    try {
        return config_from_json_obj(json::parse(text));
    } catch (const json::exception& e) {
        fail(ErrorKind::invalid_argument, std::string("config JSON parse error: ") + e.what());
    }
}

void write_checkpoint(TrainedModel& model, const std::string& path) {
    json j;
    j["version"] = 1;
    j["model_kind"] = dynamics::to_string(model.cfg.model);
    j["task"] = to_string(model.cfg.task);
    j["arch"] = {{"layers", model.cfg.ode_layers},
                 {"widths",
                  {{"hidden", model.cfg.ode_hidden},
                   {"latent", model.cfg.latent_dim},
                   {"encoder", model.cfg.encoder_width()},
                   {"enc_layers", model.cfg.enc_layers},
                   {"dec_layers", model.cfg.dec_layers},
                   {"dec_hidden", model.cfg.dec_hidden},
                   {"rank", model.cfg.rank}}},
                 {"activation", "tanh"}};
    const dynamics::OdeModel* ode = nullptr;
    std::vector<neural::ParamBlock> blocks;
    if (auto* s2s = std::get_if<Seq2SeqModel>(&model.net)) {
        blocks = s2s->param_blocks();
        ode = &s2s->ode;
    } else {
        auto& vae = std::get<VaeOneStepModel>(model.net);
        blocks = vae.param_blocks();
        ode = &vae.ode;
    }
    j["gamma_params"] = {{"omega", ode->omega}, {"epsilon", ode->epsilon}};
    if (ode->has_chi()) j["xi_param"] = {{"chi", ode->chi}};
    json params = json::object();
    for (const auto& b : blocks)
        params[b.name] = std::vector<double>(b.value, b.value + b.size);
    j["params"] = std::move(params);
    j["config"] = config_to_json_obj(model.cfg);
    j["normalization"] = {{"mode_scale", model.mode_scale}};
    j["seed_window"] = matrix_to_json(model.seed_window);
    j["t_start"] = model.t_start;
    j["dt"] = model.dt;
    if (model.basis) j["pod_basis"] = pod_artifact_to_json(*model.basis);
    write_text(path, j.dump());
}

TrainedModel read_checkpoint(const std::string& path) {
    const json j = read_json_file(path);
    try {
        TrainedModel model;
        model.cfg = config_from_json_obj(j.at("config"));
        Rng rng(model.cfg.seed);
        if (model.cfg.task == Task::vks_steady_vae)
            model.net = make_vae_onestep(model.cfg, model.cfg.rank, rng);
        else
            model.net = make_seq2seq(model.cfg, model.cfg.rank, rng);

        std::vector<neural::ParamBlock> blocks;
        dynamics::OdeModel* ode = nullptr;
        if (auto* s2s = std::get_if<Seq2SeqModel>(&model.net)) {
            blocks = s2s->param_blocks();
            ode = &s2s->ode;
        } else {
            auto& vae = std::get<VaeOneStepModel>(model.net);
            blocks = vae.param_blocks();
            ode = &vae.ode;
        }
        const auto& params = j.at("params");
        for (auto& b : blocks) {
            if (!params.contains(b.name))
                fail(ErrorKind::format, "checkpoint missing parameter block '" + b.name + "'");
            const auto values = params[b.name].get<std::vector<double>>();
            if (values.size() != b.size)
                fail(ErrorKind::format, "checkpoint block '" + b.name + "' has wrong length");
            std::copy(values.begin(), values.end(), b.value);
            if (b.version) ++*b.version;
        }
        ode->omega = j.at("gamma_params").at("omega").get<double>();
        ode->epsilon = j.at("gamma_params").at("epsilon").get<double>();
        if (j.contains("xi_param")) ode->chi = j["xi_param"].at("chi").get<double>();

        model.mode_scale = j.at("normalization").at("mode_scale").get<std::vector<double>>();
        model.seed_window = matrix_from_json(j.at("seed_window"));
        model.t_start = j.at("t_start").get<double>();
        model.dt = j.at("dt").get<double>();
        if (j.contains("pod_basis")) model.basis = pod_artifact_from_json(j["pod_basis"]);
        return model;
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': malformed checkpoint: " + e.what());
    }
}

numkit::DenseMatrix model_rollout(TrainedModel& model, std::size_t horizon) {
    numkit::DenseMatrix normalized(horizon, model.cfg.rank);
    if (horizon > 0) {
        if (auto* s2s = std::get_if<Seq2SeqModel>(&model.net))
            normalized = rollout_seq2seq(*s2s, model.seed_window, horizon, model.cfg);
        else
            normalized = rollout_vae(std::get<VaeOneStepModel>(model.net), model.seed_window,
                                     horizon, model.cfg);
    }
    return scale_columns(normalized, model.mode_scale, true);
}

std::vector<fom::EulerParams> euler_parameter_grid(std::size_t count) {
    if (count < 2) fail(ErrorKind::invalid_argument, "euler_parameter_grid: need at least two");
    // near-square grid, columns-major over eta_u
    std::size_t cols = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(count))));
    while (cols > 1 && count % cols != 0) --cols;
    const std::size_t rows = count / cols;
    std::vector<fom::EulerParams> grid;
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t k = 0; k < rows; ++k) {
            fom::EulerParams p;
            p.eta_u = 2.0 + (cols == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(cols - 1));
            p.eta_rho = 3.0 + (rows == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(rows - 1));
            grid.push_back(p);
        }
    return grid;
}

RunnerResult run_training(const TrainConfig& cfg, const std::string& reduction_path) {
    cfg.validate();
    RunnerResult result;
    result.model.cfg = cfg;

    if (cfg.task == Task::euler_param_seq) {
        // pod-ensemble manifest: {"kind":"pod_ensemble","members":[{"basis":..}]}
        const json manifest = read_json_file(reduction_path);
        if (!manifest.contains("kind") || manifest["kind"] != "pod_ensemble")
            fail(ErrorKind::format,
                 "'" + reduction_path + "': expected a pod_ensemble manifest for the euler task");
        const auto base_dir = std::filesystem::path(reduction_path).parent_path();
        std::vector<io::PodArtifact> members;
        for (const auto& m : manifest.at("members")) {
            auto p = std::filesystem::path(m.at("basis").get<std::string>());
            if (p.is_relative()) p = base_dir / p;
            members.push_back(io::read_pod_artifact(p.string()));
        }
        if (members.size() < 2)
            fail(ErrorKind::invalid_argument, "euler task needs at least two ensemble members");

        std::vector<numkit::DenseMatrix> trajectories;
        for (const auto& m : members) trajectories.push_back(sliced_coeffs(m, cfg));
        const std::size_t nt = trajectories.front().rows();
        if (nt < cfg.seq_in + cfg.seq_out)
            fail(ErrorKind::invalid_argument,
                 "euler trajectories are shorter than seq_in + seq_out");

        // shuffled parameter split: the held-out set is validation-only
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
        rng.shuffle(order);
        const std::size_t n_train = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::round(cfg.split_fraction *
                                                   static_cast<double>(members.size()))));
        std::vector<std::size_t> train_traj(order.begin(),
                                            order.begin() + static_cast<std::ptrdiff_t>(
                                                                std::min(n_train, order.size() - 1)));
        std::vector<std::size_t> val_traj(order.begin() + static_cast<std::ptrdiff_t>(
                                                              std::min(n_train, order.size() - 1)),
                                          order.end());

        // per-mode scale over the training trajectories
        numkit::DenseMatrix stacked(train_traj.size() * nt, cfg.rank);
        std::size_t at = 0;
        for (std::size_t t : train_traj) {
            for (std::size_t i = 0; i < nt; ++i, ++at)
                std::copy(trajectories[t].row_ptr(i), trajectories[t].row_ptr(i) + cfg.rank,
                          stacked.row_ptr(at));
        }
        result.model.mode_scale = mode_scales(stacked, stacked.rows());
        for (auto& traj : trajectories)
            traj = scale_columns(traj, result.model.mode_scale, false);

        const auto ds = make_ensemble_windows(trajectories, cfg.seq_in, cfg.seq_out, train_traj,
                                              val_traj);
        auto outcome = train_seq2seq(ds, cfg);
        result.run = std::move(outcome.run);
        result.model.net = std::move(outcome.model);

        // seed the rollout from the first held-out parameter
        const std::size_t probe = val_traj.empty() ? train_traj.front() : val_traj.front();
        result.model.seed_window = ds.inputs[probe];
        result.model.basis = members[probe];
        result.model.t_start = members[probe].times.size() > cfg.seq_in
                                   ? members[probe].times[cfg.seq_in]
                                   : static_cast<double>(cfg.seq_in);
        result.model.dt = members[probe].times.size() > 1
                              ? members[probe].times[1] - members[probe].times[0]
                              : 1.0;
        return result;
    }

    io::PodArtifact artifact = io::read_pod_artifact(reduction_path);
    const auto coeffs = sliced_coeffs(artifact, cfg);
    const std::size_t nt = coeffs.rows();
    const auto split_point =
        static_cast<std::size_t>(std::floor(cfg.split_fraction * static_cast<double>(nt)));
    if (split_point < cfg.seq_in + cfg.seq_out || split_point >= nt)
        fail(ErrorKind::invalid_argument, "split point leaves no usable training interval");

    result.model.mode_scale = mode_scales(coeffs, split_point);
    const auto normalized = scale_columns(coeffs, result.model.mode_scale, false);
    const auto ds = make_windows(normalized, cfg.seq_in, cfg.seq_out, cfg.stride, split_point);

    if (cfg.task == Task::vks_steady_vae) {
        auto outcome = train_vae_onestep(ds, cfg);
        result.run = std::move(outcome.run);
        result.model.net = std::move(outcome.model);
    } else {
        auto outcome = train_seq2seq(ds, cfg);
        result.run = std::move(outcome.run);
        result.model.net = std::move(outcome.model);
    }

    // rollout continues from the end of the training interval
    result.model.seed_window = numkit::DenseMatrix(cfg.seq_in, cfg.rank);
    for (std::size_t i = 0; i < cfg.seq_in; ++i)
        std::copy(normalized.row_ptr(split_point - cfg.seq_in + i),
                  normalized.row_ptr(split_point - cfg.seq_in + i) + cfg.rank,
                  result.model.seed_window.row_ptr(i));
    result.model.t_start = artifact.times.size() > split_point
                               ? artifact.times[split_point]
                               : static_cast<double>(split_point);
    result.model.dt =
        artifact.times.size() > 1 ? artifact.times[1] - artifact.times[0] : 1.0;
    result.model.basis = std::move(artifact);
    return result;
}

void write_run_outputs(RunnerResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    io::write_metrics_csv(result.run.records, (dir / "metrics.csv").string());
    write_checkpoint(result.model, (dir / "checkpoint.json").string());

    json meta;
    meta["task"] = to_string(result.model.cfg.task);
    meta["model"] = dynamics::to_string(result.model.cfg.model);
    meta["seed"] = result.model.cfg.seed;
    meta["epochs_completed"] = result.run.records.size();
    meta["diverged"] = result.run.diverged;
    if (result.run.diverged) meta["diverged_epoch"] = result.run.diverged_epoch;
    meta["max_latent_norm"] = result.run.max_latent_norm;
    meta["config"] = config_to_json_obj(result.model.cfg);
    write_text((dir / "run.json").string(), meta.dump());
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string report_runs(const std::vector<std::string>& run_dirs) {
    struct PerModel {
        std::vector<double> final_val_mse;
        std::vector<double> median_fwd_nfe;
        std::vector<double> median_bwd_nfe;
        std::vector<double> adj_ratio; // ||a(0)|| / ||a(T)|| at the last epoch
        std::vector<double> final_train_mse;
    };
    std::map<std::string, PerModel> models;
    json runs = json::array();

    for (const auto& dir : run_dirs) {
        const auto base = std::filesystem::path(dir);
        const json meta = read_json_file((base / "run.json").string());
        const auto records = io::read_metrics_csv((base / "metrics.csv").string());
        if (records.empty()) fail(ErrorKind::format, "'" + dir + "': empty metrics");
        const std::string kind = meta.at("model").get<std::string>();

        auto& slot = models[kind];
        slot.final_val_mse.push_back(records.back().val_mse);
        slot.final_train_mse.push_back(records.back().train_mse);
        std::vector<double> fwd, bwd;
        for (const auto& r : records) {
            fwd.push_back(r.fwd_nfe);
            bwd.push_back(r.bwd_nfe);
        }
        slot.median_fwd_nfe.push_back(median_of(fwd));
        slot.median_bwd_nfe.push_back(median_of(bwd));
        const auto& last = records.back();
        slot.adj_ratio.push_back(last.adj_norm_tT > 0.0 ? last.adj_norm_t0 / last.adj_norm_tT
                                                        : 0.0);

        json r;
        r["dir"] = dir;
        r["model"] = kind;
        r["seed"] = meta.at("seed");
        r["diverged"] = meta.at("diverged");
        r["epochs"] = records.size();
        r["final_val_mse"] = records.back().val_mse;
        runs.push_back(std::move(r));
    }

    json out;
    out["runs"] = std::move(runs);
    json per_model = json::object();
    for (const auto& [kind, slot] : models) {
        per_model[kind] = {{"median_final_val_mse", median_of(slot.final_val_mse)},
                           {"median_final_train_mse", median_of(slot.final_train_mse)},
                           {"median_epoch_fwd_nfe", median_of(slot.median_fwd_nfe)},
                           {"median_epoch_bwd_nfe", median_of(slot.median_bwd_nfe)},
                           {"median_adjoint_ratio", median_of(slot.adj_ratio)},
                           {"run_count", slot.final_val_mse.size()}};
    }
    out["models"] = std::move(per_model);
    if (models.count("node") && models.count("hbnode")) {
        out["hbnode_val_mse_lower"] = median_of(models["hbnode"].final_val_mse) <
                                      median_of(models["node"].final_val_mse);
        out["hbnode_fwd_nfe_leq"] = median_of(models["hbnode"].median_fwd_nfe) <=
                                    median_of(models["node"].median_fwd_nfe);
        out["hbnode_adjoint_ratio_higher"] = median_of(models["hbnode"].adj_ratio) >
                                             median_of(models["node"].adj_ratio);
    }
    return out.dump();
}

void write_prediction_csv(const numkit::DenseMatrix& coeffs, double t_start, double dt,
                          const std::string& path) {
    std::string text = "t";
    for (std::size_t j = 0; j < coeffs.cols(); ++j)
        text += ",alpha_" + std::to_string(j + 1);
    text += '\n';
    for (std::size_t i = 0; i < coeffs.rows(); ++i) {
        text += io::format_double(t_start + dt * static_cast<double>(i));
        for (std::size_t j = 0; j < coeffs.cols(); ++j) {
            text += ',';
            text += io::format_double(coeffs(i, j));
        }
        text += '\n';
    }
    write_text(path, text);
}

void write_field_csv(const numkit::DenseMatrix& fields, const std::string& path) {
    std::string text;
    for (std::size_t j = 0; j < fields.cols(); ++j) {
        if (j) text += ',';
        text += "x" + std::to_string(j);
    }
    text += '\n';
    for (std::size_t i = 0; i < fields.rows(); ++i) {
        for (std::size_t j = 0; j < fields.cols(); ++j) {
            if (j) text += ',';
            text += io::format_double(fields(i, j));
        }
        text += '\n';
    }
    write_text(path, text);
}

} // namespace hbrom::pipeline
