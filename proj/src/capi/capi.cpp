// SPDX-License-Identifier: Apache-2.0
#include "hbrom.h"

#include <atomic>
#include <cstring>
#include <filesystem>
#include <memory>
#include <fstream>
#include <thread>

#include "fom/euler.hpp"
#include "fom/kpp.hpp"
#include "fom/synthetic.hpp"
#include "io/artifacts.hpp"
#include "io/snapshot_file.hpp"
#include "json.hpp"
#include "pipeline/runner.hpp"
#include "rom/dmd.hpp"
#include "rom/pod.hpp"

using nlohmann::json;
using namespace hbrom;

struct hbrom_snapshots {
    fom::SnapshotSet data;
};
struct hbrom_pod {
    io::PodArtifact artifact;
};
struct hbrom_dmd {
    io::DmdArtifact artifact;
};
struct hbrom_model {
    pipeline::TrainedModel model;
};
struct hbrom_train_run {
    pipeline::RunnerResult result;
};

namespace {

thread_local std::string g_last_error;

hbrom_status status_of(const Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
        case ErrorKind::invalid_argument:
        case ErrorKind::shape:
        case ErrorKind::format:
        case ErrorKind::io:
            return HBROM_ERR_USAGE;
        case ErrorKind::instability:
        case ErrorKind::convergence: // step-size underflow: the solver gave up
        case ErrorKind::budget:      // step cap exhausted: likewise
            return HBROM_ERR_INSTABILITY;
        case ErrorKind::divergence:
            return HBROM_ERR_DIVERGENCE;
        default:
            return HBROM_ERR_INTERNAL;
    }
}

template <typename Fn>
hbrom_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HBROM_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

hbrom_status require(bool cond, const char* message) {
    if (cond) return HBROM_OK;
    g_last_error = message;
    return HBROM_ERR_USAGE;
}

json parse_config(const char* config_json) {
    if (!config_json || !*config_json) return json::object();
    try {
        return json::parse(config_json);
    } catch (const json::exception& e) {
        fail(ErrorKind::invalid_argument, std::string("config JSON parse error: ") + e.what());
    }
}

fom::KppConfig kpp_config_from_json(const json& j) {
    fom::KppConfig cfg;
    if (j.contains("nx")) cfg.grid.nx = j["nx"].get<std::size_t>();
    if (j.contains("ny")) cfg.grid.ny = j["ny"].get<std::size_t>();
    if (j.contains("t_final")) cfg.t_final = j["t_final"].get<double>();
    if (j.contains("snapshots")) cfg.n_snapshots = j["snapshots"].get<std::size_t>();
    if (j.contains("cfl")) cfg.cfl = j["cfl"].get<double>();
    if (j.contains("reconstruction")) {
        const auto r = j["reconstruction"].get<std::string>();
        if (r == "weno5")
            cfg.reconstruction = fom::Reconstruction::weno5;
        else if (r == "first_order" || r == "first-order")
            cfg.reconstruction = fom::Reconstruction::first_order;
        else
            fail(ErrorKind::invalid_argument, "unknown reconstruction '" + r + "'");
    }
    return cfg;
}

fom::EulerConfig euler_config_from_json(const json& j) {
    fom::EulerConfig cfg;
    if (j.contains("cells")) cfg.n_cells = j["cells"].get<std::size_t>();
    if (j.contains("t_final")) cfg.t_final = j["t_final"].get<double>();
    if (j.contains("snapshots")) cfg.n_snapshots = j["snapshots"].get<std::size_t>();
    if (j.contains("cfl")) cfg.cfl = j["cfl"].get<double>();
    return cfg;
}

fom::EulerParams euler_params_from_json(const json& j) {
    fom::EulerParams p;
    if (j.contains("eta_u")) p.eta_u = j["eta_u"].get<double>();
    if (j.contains("eta_rho")) p.eta_rho = j["eta_rho"].get<double>();
    return p;
}

fom::SyntheticVksConfig vks_config_from_json(const json& j) {
    fom::SyntheticVksConfig cfg;
    if (j.contains("n_dof")) cfg.n_dof = j["n_dof"].get<std::size_t>();
    if (j.contains("n_t")) cfg.n_t = j["n_t"].get<std::size_t>();
    if (j.contains("transient_len")) cfg.transient_len = j["transient_len"].get<std::size_t>();
    if (j.contains("frequencies")) cfg.frequencies = j["frequencies"].get<std::vector<double>>();
    return cfg;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

json read_json_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::format, "'" + path + "': JSON parse error: " + e.what());
    }
}

} // namespace

extern "C" {

const char* hbrom_version(void) { return "0.1.0"; }

const char* hbrom_last_error(void) { return g_last_error.c_str(); }

void hbrom_string_free(char* s) { std::free(s); }

hbrom_status hbrom_default_config(const char* command, const char* profile, char** json_out) {
    if (auto st = require(command && json_out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const std::string cmd = command;
        const std::string prof = profile ? profile : "desk";
        const bool paper = prof == "paper";
        if (!paper && prof != "desk")
            fail(ErrorKind::invalid_argument, "unknown profile '" + prof + "'");
        json j;
        if (cmd == "simulate.kpp") {
            j = {{"nx", paper ? 50 : 32},      {"ny", paper ? 50 : 32},
                 {"t_final", 10.0},            {"snapshots", paper ? 1250 : 300},
                 {"cfl", 0.4},                 {"reconstruction", "weno5"}};
        } else if (cmd == "simulate.euler") {
            j = {{"cells", paper ? 1000 : 200},
                 {"t_final", 1.8},
                 {"snapshots", 180},
                 {"cfl", 0.4},
                 {"eta_u", 2.0},
                 {"eta_rho", 3.0},
                 {"ensemble", paper ? 100 : 20}};
        } else if (cmd == "simulate.synthetic-vks") {
            j = {{"n_dof", paper ? 2048 : 512},
                 {"n_t", paper ? 500 : 250},
                 {"transient_len", paper ? 200 : 100},
                 {"frequencies", {0.05, 0.05 * M_SQRT2}}};
        } else if (cmd.rfind("train.", 0) == 0) {
            const auto task = pipeline::task_from_string(cmd.substr(6));
            auto cfg = pipeline::default_config(task, dynamics::ModelKind::node);
            if (!paper) {
                // desk presets: shorter runs, and minibatched updates so the
                // optimizer gets enough steps within the reduced epoch budget
                if (task == pipeline::Task::kpp_seq || task == pipeline::Task::vks_full_seq) {
                    cfg.epochs = 100;
                    cfg.batch_size = 32;
                }
                if (task == pipeline::Task::vks_steady_vae) cfg.epochs = 200;
            } else if (task == pipeline::Task::kpp_seq) {
                cfg.max_timesteps = 1000;
            }
            j = json::parse(pipeline::config_to_json(cfg));
        } else {
            fail(ErrorKind::invalid_argument, "unknown command '" + cmd + "'");
        }
        *json_out = dup_string(j.dump());
        return HBROM_OK;
    });
}

hbrom_status hbrom_simulate(const char* kind, const char* config_json, hbrom_snapshots** out) {
    if (auto st = require(kind && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const json j = parse_config(config_json);
        auto holder = std::make_unique<hbrom_snapshots>();
        const std::string k = kind;
        if (k == "kpp") {
            holder->data = fom::kpp_simulate(kpp_config_from_json(j));
        } else if (k == "euler") {
            holder->data = fom::euler_simulate(euler_params_from_json(j),
                                               euler_config_from_json(j));
        } else if (k == "synthetic-vks" || k == "synthetic_vks") {
            holder->data = fom::synthetic_vks(vks_config_from_json(j));
        } else {
            fail(ErrorKind::invalid_argument, "unknown simulation kind '" + k + "'");
        }
        *out = holder.release();
        return HBROM_OK;
    });
}

hbrom_status hbrom_snapshots_open(const char* path, hbrom_snapshots** out) {
    if (auto st = require(path && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto holder = std::make_unique<hbrom_snapshots>();
        holder->data = io::read_snapshot_file(path);
        *out = holder.release();
        return HBROM_OK;
    });
}

hbrom_status hbrom_snapshots_save(const hbrom_snapshots* s, const char* path) {
    if (auto st = require(s && path, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        io::write_snapshot_file(s->data, path);
        return HBROM_OK;
    });
}

void hbrom_snapshots_free(hbrom_snapshots* s) { delete s; }

hbrom_status hbrom_snapshots_info(const hbrom_snapshots* s, char** json_out) {
    if (auto st = require(s && json_out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        json j;
        j["source"] = fom::to_string(s->data.source);
        j["nt"] = s->data.num_times();
        j["ndof"] = s->data.num_dof();
        j["fields"] = json::array();
        for (const auto& f : s->data.fields)
            j["fields"].push_back({{"name", f.name}, {"size", f.size}});
        if (!s->data.times.empty()) {
            j["t0"] = s->data.times.front();
            j["t1"] = s->data.times.back();
        }
        if (s->data.params)
            j["params"] = {{"eta_u", s->data.params->eta_u},
                           {"eta_rho", s->data.params->eta_rho}};
        *json_out = dup_string(j.dump());
        return HBROM_OK;
    });
}

hbrom_status hbrom_ensemble_simulate(const char* config_json, int32_t count, const char* out_dir,
                                     int32_t jobs, char** manifest_path_out) {
    if (auto st = require(out_dir, "null out_dir"); st != HBROM_OK) return st;
    return guarded([&]() {
        const json j = parse_config(config_json);
        const auto cfg = euler_config_from_json(j);
        if (count < 2) fail(ErrorKind::invalid_argument, "ensemble needs at least two members");
        const auto grid = pipeline::euler_parameter_grid(static_cast<std::size_t>(count));
        std::filesystem::create_directories(out_dir);
        const auto dir = std::filesystem::path(out_dir);

        std::vector<std::string> paths(grid.size());
        std::vector<std::exception_ptr> failures(grid.size());
        const std::size_t n_jobs = std::max<int32_t>(1, jobs);
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        for (std::size_t t = 0; t < std::min<std::size_t>(n_jobs, grid.size()); ++t)
            workers.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= grid.size()) return;
                    try {
                        const auto snaps = fom::euler_simulate(grid[i], cfg);
                        char name[32];
                        std::snprintf(name, sizeof name, "euler_%03zu.snap", i);
                        paths[i] = (dir / name).string();
                        io::write_snapshot_file(snaps, paths[i]);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        for (auto& w : workers) w.join();
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);

        json manifest;
        manifest["kind"] = "ensemble";
        manifest["members"] = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i)
            manifest["members"].push_back(
                {{"path", std::filesystem::path(paths[i]).filename().string()},
                 {"eta_u", grid[i].eta_u},
                 {"eta_rho", grid[i].eta_rho}});
        const std::string manifest_path = (dir / "manifest.json").string();
        write_text_file(manifest_path, manifest.dump());
        if (manifest_path_out) *manifest_path_out = dup_string(manifest_path);
        return HBROM_OK;
    });
}

hbrom_status hbrom_pod_fit(const hbrom_snapshots* s, int32_t rank, hbrom_pod** out) {
    if (auto st = require(s && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto holder = std::make_unique<hbrom_pod>();
        holder->artifact.basis = rom::pod_from_snapshots(s->data, static_cast<std::size_t>(rank));
        holder->artifact.times = s->data.times;
        holder->artifact.source = fom::to_string(s->data.source);
        holder->artifact.params = s->data.params;
        *out = holder.release();
        return HBROM_OK;
    });
}

hbrom_status hbrom_pod_save(const hbrom_pod* p, const char* path) {
    if (auto st = require(p && path, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        io::write_pod_artifact(p->artifact, path);
        return HBROM_OK;
    });
}

hbrom_status hbrom_pod_open(const char* path, hbrom_pod** out) {
    if (auto st = require(path && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto holder = std::make_unique<hbrom_pod>();
        holder->artifact = io::read_pod_artifact(path);
        *out = holder.release();
        return HBROM_OK;
    });
}

void hbrom_pod_free(hbrom_pod* p) { delete p; }

hbrom_status hbrom_pod_info(const hbrom_pod* p, int32_t max_order, char** json_out) {
    if (auto st = require(p && json_out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const auto& basis = p->artifact.basis;
        json j;
        j["rank"] = basis.rank;
        j["effective_rank"] = basis.effective_rank;
        j["rank_deficient"] = basis.rank_deficient;
        j["eigenvalues"] = basis.eigenvalues;
        j["info"] = json::array();
        const std::size_t cap = max_order > 0
                                    ? std::min<std::size_t>(static_cast<std::size_t>(max_order),
                                                            basis.eigenvalues.size())
                                    : std::min<std::size_t>(32, basis.eigenvalues.size());
        for (std::size_t r = 1; r <= cap; ++r)
            j["info"].push_back({{"r", r}, {"value", rom::relative_info(basis.eigenvalues, r)}});
        *json_out = dup_string(j.dump());
        return HBROM_OK;
    });
}

hbrom_status hbrom_dmd_fit(const hbrom_snapshots* s, int32_t rank, const char* lifts,
                           hbrom_dmd** out) {
    if (auto st = require(s && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const auto spec = rom::LiftSpec::parse(lifts ? lifts : "");
        auto [fluct, mean] = rom::center_snapshots(s->data);
        auto holder = std::make_unique<hbrom_dmd>();
        holder->artifact.model = rom::dmd_fit(fluct, static_cast<std::size_t>(rank), spec);
        rom::dmd_attach_mean(holder->artifact.model, mean);
        holder->artifact.times = s->data.times;
        holder->artifact.source = fom::to_string(s->data.source);
        *out = holder.release();
        return HBROM_OK;
    });
}

hbrom_status hbrom_dmd_save(const hbrom_dmd* m, const char* path) {
    if (auto st = require(m && path, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        io::write_dmd_artifact(m->artifact, path);
        return HBROM_OK;
    });
}

hbrom_status hbrom_dmd_open(const char* path, hbrom_dmd** out) {
    if (auto st = require(path && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto holder = std::make_unique<hbrom_dmd>();
        holder->artifact = io::read_dmd_artifact(path);
        *out = holder.release();
        return HBROM_OK;
    });
}

void hbrom_dmd_free(hbrom_dmd* m) { delete m; }

hbrom_status hbrom_dmd_info(const hbrom_dmd* m, char** json_out) {
    if (auto st = require(m && json_out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        json j;
        j["rank"] = m->artifact.model.rank;
        j["lift"] = m->artifact.model.lift_spec.to_string();
        j["fit_residual"] = m->artifact.model.fit_residual;
        j["eigenvalues"] = json::array();
        for (const auto& e : m->artifact.model.eigenvalues)
            j["eigenvalues"].push_back(
                {{"re", e.real()}, {"im", e.imag()}, {"modulus", std::abs(e)}});
        *json_out = dup_string(j.dump());
        return HBROM_OK;
    });
}

hbrom_status hbrom_dmd_predict_csv(const hbrom_dmd* m, int64_t horizon, const char* csv_path) {
    if (auto st = require(m && csv_path && horizon >= 0, "bad arguments"); st != HBROM_OK)
        return st;
    return guarded([&]() {
        const std::size_t nd = m->artifact.model.identity_dof;
        numkit::DenseMatrix rows(static_cast<std::size_t>(horizon) + 1, nd);
        for (int64_t k = 0; k <= horizon; ++k) {
            const auto pred = rom::dmd_predict(m->artifact.model, k);
            std::copy(pred.begin(), pred.end(), rows.row_ptr(static_cast<std::size_t>(k)));
        }
        pipeline::write_field_csv(rows, csv_path);
        return HBROM_OK;
    });
}

hbrom_status hbrom_ensemble_reduce(const char* manifest_path, int32_t rank, const char* out_dir,
                                   char** json_out) {
    if (auto st = require(manifest_path && out_dir, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const json manifest = read_json_path(manifest_path);
        if (!manifest.contains("kind") || manifest["kind"] != "ensemble")
            fail(ErrorKind::format,
                 std::string(manifest_path) + ": expected an ensemble manifest");
        const auto base_dir = std::filesystem::path(manifest_path).parent_path();
        std::filesystem::create_directories(out_dir);
        const auto dir = std::filesystem::path(out_dir);

        json ensemble;
        ensemble["kind"] = "pod_ensemble";
        ensemble["rank"] = rank;
        ensemble["members"] = json::array();
        double info_sum = 0.0;
        std::size_t idx = 0;
        for (const auto& member : manifest.at("members")) {
            auto p = std::filesystem::path(member.at("path").get<std::string>());
            if (p.is_relative()) p = base_dir / p;
            const auto snaps = io::read_snapshot_file(p.string());
            io::PodArtifact artifact;
            artifact.basis = rom::pod_from_snapshots(snaps, static_cast<std::size_t>(rank));
            artifact.times = snaps.times;
            artifact.source = fom::to_string(snaps.source);
            artifact.params = snaps.params;
            char name[32];
            std::snprintf(name, sizeof name, "basis_%03zu.json", idx);
            io::write_pod_artifact(artifact, (dir / name).string());
            const double info =
                rom::relative_info(artifact.basis.eigenvalues, static_cast<std::size_t>(rank));
            info_sum += info;
            json entry = {{"basis", name}, {"info", info}};
            if (artifact.params) {
                entry["eta_u"] = artifact.params->eta_u;
                entry["eta_rho"] = artifact.params->eta_rho;
            }
            ensemble["members"].push_back(std::move(entry));
            ++idx;
        }
        if (idx == 0) fail(ErrorKind::format, "ensemble manifest has no members");
        ensemble["mean_info"] = info_sum / static_cast<double>(idx);
        const std::string out_path = (dir / "ensemble.json").string();
        write_text_file(out_path, ensemble.dump());
        if (json_out) {
            json report = {{"manifest", out_path},
                           {"rank", rank},
                           {"members", idx},
                           {"mean_info", ensemble["mean_info"]}};
            *json_out = dup_string(report.dump());
        }
        return HBROM_OK;
    });
}

hbrom_status hbrom_train(const char* config_json, hbrom_train_run** out) {
    if (auto st = require(config_json && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        const json j = parse_config(config_json);
        if (!j.contains("reduction"))
            fail(ErrorKind::invalid_argument,
                 "train config must name the reduction artifact path under 'reduction'");
        const std::string reduction = j["reduction"].get<std::string>();
        if (!std::filesystem::exists(reduction))
            fail(ErrorKind::invalid_argument,
                 "reduction artifact '" + reduction + "' does not exist");
        json cfg_json = j;
        cfg_json.erase("reduction");
        const auto cfg = pipeline::config_from_json(cfg_json.dump());

        auto holder = std::make_unique<hbrom_train_run>();
        holder->result = pipeline::run_training(cfg, reduction);
        const bool diverged = holder->result.run.diverged;
        *out = holder.release();
        if (diverged) {
            g_last_error = "training diverged (partial metrics retained)";
            return HBROM_ERR_DIVERGENCE;
        }
        return HBROM_OK;
    });
}

hbrom_status hbrom_train_run_summary(const hbrom_train_run* r, char** json_out) {
    if (auto st = require(r && json_out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        json j;
        j["task"] = pipeline::to_string(r->result.model.cfg.task);
        j["model"] = dynamics::to_string(r->result.model.cfg.model);
        j["seed"] = r->result.model.cfg.seed;
        j["epochs_completed"] = r->result.run.records.size();
        j["diverged"] = r->result.run.diverged;
        if (!r->result.run.records.empty()) {
            const auto& last = r->result.run.records.back();
            j["final_train_mse"] = last.train_mse;
            j["final_val_mse"] = last.val_mse;
            j["final_fwd_nfe"] = last.fwd_nfe;
            j["final_bwd_nfe"] = last.bwd_nfe;
            j["final_stiffness"] = last.stiffness;
            j["final_adj_norm_t0"] = last.adj_norm_t0;
            j["final_adj_norm_tT"] = last.adj_norm_tT;
        }
        if (!r->result.run.max_latent_norm.empty()) {
            double m = 0.0;
            for (double v : r->result.run.max_latent_norm) m = std::max(m, v);
            j["max_latent_norm"] = m;
        }
        *json_out = dup_string(j.dump());
        return HBROM_OK;
    });
}

hbrom_status hbrom_train_run_write(const hbrom_train_run* r, const char* out_dir) {
    if (auto st = require(r && out_dir, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto* mut = const_cast<hbrom_train_run*>(r);
        pipeline::write_run_outputs(mut->result, out_dir);
        return HBROM_OK;
    });
}

void hbrom_train_run_free(hbrom_train_run* r) { delete r; }

hbrom_status hbrom_model_open(const char* checkpoint_path, hbrom_model** out) {
    if (auto st = require(checkpoint_path && out, "null argument"); st != HBROM_OK) return st;
    return guarded([&]() {
        auto holder = std::make_unique<hbrom_model>();
        holder->model = pipeline::read_checkpoint(checkpoint_path);
        *out = holder.release();
        return HBROM_OK;
    });
}

void hbrom_model_free(hbrom_model* m) { delete m; }

hbrom_status hbrom_model_predict_csv(const hbrom_model* m, int64_t horizon, const char* csv_path,
                                     const char* reconstruct_csv_path) {
    if (auto st = require(m && csv_path && horizon >= 0, "bad arguments"); st != HBROM_OK)
        return st;
    return guarded([&]() {
        auto* mut = const_cast<hbrom_model*>(m);
        const auto coeffs = pipeline::model_rollout(mut->model, static_cast<std::size_t>(horizon));
        pipeline::write_prediction_csv(coeffs, mut->model.t_start, mut->model.dt, csv_path);
        if (reconstruct_csv_path) {
            if (!mut->model.basis)
                fail(ErrorKind::invalid_argument,
                     "checkpoint has no embedded basis; cannot reconstruct fields");
            const auto fields = rom::pod_reconstruct(mut->model.basis->basis, coeffs);
            pipeline::write_field_csv(fields, reconstruct_csv_path);
        }
        return HBROM_OK;
    });
}

hbrom_status hbrom_report(const char* const* run_dirs, int64_t n_dirs, char** json_out) {
    if (auto st = require(run_dirs && json_out && n_dirs > 0, "bad arguments"); st != HBROM_OK)
        return st;
    return guarded([&]() {
        std::vector<std::string> dirs;
        for (int64_t i = 0; i < n_dirs; ++i) dirs.emplace_back(run_dirs[i]);
        *json_out = dup_string(pipeline::report_runs(dirs));
        return HBROM_OK;
    });
}

} // extern "C"
