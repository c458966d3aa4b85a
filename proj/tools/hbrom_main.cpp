// SPDX-License-Identifier: Apache-2.0
// Command-line front end; all functionality goes through the hbrom C API.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hbrom.h"
#include "json.hpp"

using nlohmann::json;

namespace {

// unique_ptr-style guards for API handles and strings
struct StringOut {
    char* value = nullptr;
    ~StringOut() { hbrom_string_free(value); }
    std::string str() const { return value ? value : ""; }
};

int exit_code_of(hbrom_status st) {
    switch (st) {
        case HBROM_OK: return 0;
        case HBROM_ERR_USAGE: return 2;
        case HBROM_ERR_INSTABILITY: return 3;
        case HBROM_ERR_DIVERGENCE: return 4;
        default: return 1;
    }
}

int report_failure(hbrom_status st) {
    std::fprintf(stderr, "error: %s\n", hbrom_last_error());
    return exit_code_of(st);
}

json default_config_or_die(const std::string& command, const std::string& profile) {
    StringOut cfg;
    const auto st = hbrom_default_config(command.c_str(), profile.c_str(), &cfg.value);
    if (st != HBROM_OK) {
        std::fprintf(stderr, "error: %s\n", hbrom_last_error());
        std::exit(exit_code_of(st));
    }
    return json::parse(cfg.str());
}

json load_json_file_or_die(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) {
        std::fprintf(stderr, "error: cannot open '%s'\n", path.c_str());
        std::exit(2);
    }
    std::string text;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
    std::fclose(f);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: '%s': %s\n", path.c_str(), e.what());
        std::exit(2);
    }
}

struct SimulateArgs {
    std::string kind;
    std::string profile = "desk";
    std::string out;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool ensemble = false;
    int ensemble_count = 0;
    std::optional<std::size_t> nx, ny, cells, snapshots, n_dof, n_t, transient_len;
    std::optional<double> t_final, cfl, eta_u, eta_rho;
    std::optional<std::string> reconstruction;
    std::vector<double> frequencies;
};

int run_simulate(const SimulateArgs& a) {
    json cfg = default_config_or_die("simulate." + a.kind, a.profile);
    if (a.nx) cfg["nx"] = *a.nx;
    if (a.ny) cfg["ny"] = *a.ny;
    if (a.cells) cfg["cells"] = *a.cells;
    if (a.snapshots) cfg["snapshots"] = *a.snapshots;
    if (a.t_final) cfg["t_final"] = *a.t_final;
    if (a.cfl) cfg["cfl"] = *a.cfl;
    if (a.eta_u) cfg["eta_u"] = *a.eta_u;
    if (a.eta_rho) cfg["eta_rho"] = *a.eta_rho;
    if (a.reconstruction) cfg["reconstruction"] = *a.reconstruction;
    if (a.n_dof) cfg["n_dof"] = *a.n_dof;
    if (a.n_t) cfg["n_t"] = *a.n_t;
    if (a.transient_len) cfg["transient_len"] = *a.transient_len;
    if (!a.frequencies.empty()) cfg["frequencies"] = a.frequencies;

    if (a.ensemble) {
        if (a.kind != "euler") {
            std::fprintf(stderr, "error: --ensemble applies to the euler solver only\n");
            return 2;
        }
        const int count = a.ensemble_count > 0 ? a.ensemble_count
                                               : cfg.value("ensemble", 20);
        StringOut manifest;
        const auto st = hbrom_ensemble_simulate(cfg.dump().c_str(), count, a.out.c_str(), a.jobs,
                                                &manifest.value);
        if (st != HBROM_OK) return report_failure(st);
        std::printf("wrote ensemble of %d trajectories; manifest: %s\n", count,
                    manifest.str().c_str());
        return 0;
    }

    hbrom_snapshots* snaps = nullptr;
    auto st = hbrom_simulate(a.kind.c_str(), cfg.dump().c_str(), &snaps);
    if (st != HBROM_OK) return report_failure(st);
    st = hbrom_snapshots_save(snaps, a.out.c_str());
    if (st != HBROM_OK) {
        hbrom_snapshots_free(snaps);
        return report_failure(st);
    }
    StringOut info;
    hbrom_snapshots_info(snaps, &info.value);
    hbrom_snapshots_free(snaps);
    const json meta = json::parse(info.str());
    std::printf("wrote %s: source=%s nt=%llu ndof=%llu\n", a.out.c_str(),
                meta["source"].get<std::string>().c_str(),
                static_cast<unsigned long long>(meta["nt"].get<std::uint64_t>()),
                static_cast<unsigned long long>(meta["ndof"].get<std::uint64_t>()));
    return 0;
}

struct ReduceArgs {
    std::string method;
    std::string in;
    std::string out;
    int rank = 8;
    std::string lift;
    bool as_json = false;
};

int run_reduce_pod(const ReduceArgs& a) {
    // ensemble manifests route to the per-member reduction
    if (a.in.size() > 5 && a.in.substr(a.in.size() - 5) == ".json") {
        StringOut report;
        const auto st = hbrom_ensemble_reduce(a.in.c_str(), a.rank, a.out.c_str(), &report.value);
        if (st != HBROM_OK) return report_failure(st);
        const json r = json::parse(report.str());
        if (a.as_json)
            std::printf("%s\n", report.str().c_str());
        else
            std::printf("reduced %llu members at rank %d; mean I(%d) = %.6f\n",
                        static_cast<unsigned long long>(r["members"].get<std::uint64_t>()),
                        a.rank, a.rank, r["mean_info"].get<double>());
        return 0;
    }

    hbrom_snapshots* snaps = nullptr;
    auto st = hbrom_snapshots_open(a.in.c_str(), &snaps);
    if (st != HBROM_OK) return report_failure(st);
    hbrom_pod* pod = nullptr;
    st = hbrom_pod_fit(snaps, a.rank, &pod);
    hbrom_snapshots_free(snaps);
    if (st != HBROM_OK) return report_failure(st);
    st = hbrom_pod_save(pod, a.out.c_str());
    if (st != HBROM_OK) {
        hbrom_pod_free(pod);
        return report_failure(st);
    }
    StringOut info;
    st = hbrom_pod_info(pod, 32, &info.value);
    hbrom_pod_free(pod);
    if (st != HBROM_OK) return report_failure(st);
    const json r = json::parse(info.str());
    if (a.as_json) {
        std::printf("%s\n", info.str().c_str());
    } else {
        std::printf("  r    I(r)\n");
        for (const auto& row : r["info"])
            std::printf("%3llu    %.8f\n",
                        static_cast<unsigned long long>(row["r"].get<std::uint64_t>()),
                        row["value"].get<double>());
        if (r["rank_deficient"].get<bool>())
            std::printf("warning: requested rank exceeds the effective rank %llu\n",
                        static_cast<unsigned long long>(
                            r["effective_rank"].get<std::uint64_t>()));
    }
    std::printf("wrote %s\n", a.out.c_str());
    return 0;
}

int run_reduce_dmd(const ReduceArgs& a) {
    hbrom_snapshots* snaps = nullptr;
    auto st = hbrom_snapshots_open(a.in.c_str(), &snaps);
    if (st != HBROM_OK) return report_failure(st);
    hbrom_dmd* dmd = nullptr;
    st = hbrom_dmd_fit(snaps, a.rank, a.lift.c_str(), &dmd);
    hbrom_snapshots_free(snaps);
    if (st != HBROM_OK) return report_failure(st);
    st = hbrom_dmd_save(dmd, a.out.c_str());
    if (st != HBROM_OK) {
        hbrom_dmd_free(dmd);
        return report_failure(st);
    }
    StringOut info;
    st = hbrom_dmd_info(dmd, &info.value);
    hbrom_dmd_free(dmd);
    if (st != HBROM_OK) return report_failure(st);
    if (a.as_json) {
        std::printf("%s\n", info.str().c_str());
    } else {
        const json r = json::parse(info.str());
        std::printf("rank %d dmd, lift = %s, fit residual %.3e\n", a.rank,
                    r["lift"].get<std::string>().c_str(), r["fit_residual"].get<double>());
        std::printf("  eigenvalue (re, im)    modulus\n");
        for (const auto& e : r["eigenvalues"])
            std::printf("  (%+.6f, %+.6f)   %.6f\n", e["re"].get<double>(),
                        e["im"].get<double>(), e["modulus"].get<double>());
    }
    std::printf("wrote %s\n", a.out.c_str());
    return 0;
}

struct TrainArgs {
    std::string task;
    std::string model = "node";
    std::string reduction;
    std::string out = ".";
    std::string profile = "desk";
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs, rank, latent, batch_size;
    std::optional<double> lr, kl_weight, rtol, clip_norm;
    bool as_json = false;
};

int run_train(const TrainArgs& a) {
    json cfg = default_config_or_die("train." + a.task, a.profile);
    if (!a.config_file.empty()) {
        const json overlay = load_json_file_or_die(a.config_file);
        for (const auto& [k, v] : overlay.items()) cfg[k] = v;
    }
    cfg["task"] = a.task;
    cfg["model"] = a.model;
    if (a.seed) cfg["seed"] = *a.seed;
    if (a.epochs) cfg["epochs"] = *a.epochs;
    if (a.rank) cfg["rank"] = *a.rank;
    if (a.latent) cfg["latent_dim"] = *a.latent;
    if (a.batch_size) cfg["batch_size"] = *a.batch_size;
    if (a.lr) cfg["lr"] = *a.lr;
    if (a.kl_weight) cfg["kl_weight"] = *a.kl_weight;
    if (a.rtol) cfg["rtol"] = *a.rtol;
    if (a.clip_norm) cfg["clip_norm"] = *a.clip_norm;
    cfg["reduction"] = a.reduction;

    hbrom_train_run* run = nullptr;
    const auto st = hbrom_train(cfg.dump().c_str(), &run);
    if (st != HBROM_OK && run == nullptr) return report_failure(st);

    const auto write_st = hbrom_train_run_write(run, a.out.c_str());
    if (write_st != HBROM_OK) {
        hbrom_train_run_free(run);
        return report_failure(write_st);
    }
    StringOut summary;
    hbrom_train_run_summary(run, &summary.value);
    hbrom_train_run_free(run);
    if (a.as_json) {
        std::printf("%s\n", summary.str().c_str());
    } else {
        const json s = json::parse(summary.str());
        std::printf("%s/%s seed=%llu: %llu epochs", s["task"].get<std::string>().c_str(),
                    s["model"].get<std::string>().c_str(),
                    static_cast<unsigned long long>(s["seed"].get<std::uint64_t>()),
                    static_cast<unsigned long long>(
                        s["epochs_completed"].get<std::uint64_t>()));
        if (s.contains("final_val_mse"))
            std::printf(", final train mse %.4e, val mse %.4e",
                        s["final_train_mse"].get<double>(), s["final_val_mse"].get<double>());
        std::printf("%s\n", s["diverged"].get<bool>() ? " [diverged]" : "");
    }
    if (st == HBROM_ERR_DIVERGENCE) {
        std::fprintf(stderr, "error: training diverged; partial metrics retained in %s\n",
                     a.out.c_str());
        return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced-order modeling with POD/DMD and latent ODE models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hbrom_version());
    app.failure_message(CLI::FailureMessage::simple);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate snapshot data");
    simulate->require_subcommand(1);
    SimulateArgs sim;
    auto add_common_sim = [&](CLI::App* cmd) {
        cmd->add_option("--profile", sim.profile, "desk or paper")
            ->check(CLI::IsMember({"desk", "paper"}));
        cmd->add_option("--out", sim.out, "output path")->required();
        cmd->add_option("--seed", sim.seed, "rng seed (simulations are deterministic)");
        cmd->add_option("--snapshots", sim.snapshots, "number of stored snapshots");
        cmd->add_option("--t-final", sim.t_final, "final time");
        cmd->add_option("--cfl", sim.cfl, "cfl number");
    };
    auto* sim_kpp = simulate->add_subcommand("kpp", "2d scalar conservation law");
    add_common_sim(sim_kpp);
    sim_kpp->add_option("--nx", sim.nx, "cells in x");
    sim_kpp->add_option("--ny", sim.ny, "cells in y");
    sim_kpp->add_option("--reconstruction", sim.reconstruction, "weno5 or first_order")
        ->check(CLI::IsMember({"weno5", "first_order", "first-order"}));
    auto* sim_euler = simulate->add_subcommand("euler", "1d shock-entropy ensemble member");
    add_common_sim(sim_euler);
    sim_euler->add_option("--eta-u", sim.eta_u, "velocity jump, in [2,3]");
    sim_euler->add_option("--eta-rho", sim.eta_rho, "density jump, in [3,4]");
    sim_euler->add_option("--cells", sim.cells, "grid cells");
    sim_euler->add_flag("--ensemble", sim.ensemble, "generate a parameter-grid ensemble");
    sim_euler->add_option("--count", sim.ensemble_count, "ensemble size");
    sim_euler->add_option("--jobs", sim.jobs, "parallel trajectories");
    auto* sim_vks = simulate->add_subcommand("synthetic-vks", "quasi-periodic surrogate data");
    add_common_sim(sim_vks);
    sim_vks->add_option("--n-dof", sim.n_dof, "spatial degrees of freedom");
    sim_vks->add_option("--n-t", sim.n_t, "time steps");
    sim_vks->add_option("--transient-len", sim.transient_len, "steps before steady oscillation");
    sim_vks->add_option("--frequencies", sim.frequencies, "oscillation frequencies");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "fit a reduced model");
    reduce->require_subcommand(1);
    ReduceArgs red;
    auto add_common_red = [&](CLI::App* cmd) {
        cmd->add_option("--rank", red.rank, "retained order")->required();
        cmd->add_option("--in", red.in, "snapshot file (or ensemble manifest for pod)")
            ->required();
        cmd->add_option("--out", red.out, "artifact path (directory for ensembles)")->required();
        cmd->add_flag("--json", red.as_json, "machine-readable output");
    };
    auto* red_pod = reduce->add_subcommand("pod", "proper orthogonal decomposition");
    add_common_red(red_pod);
    auto* red_dmd = reduce->add_subcommand("dmd", "lifted dynamic mode decomposition");
    add_common_red(red_dmd);
    red_dmd->add_option("--lift", red.lift, "comma list from cos,sin,sq,cube");

    // train
    auto* train = app.add_subcommand("train", "train a latent ODE model");
    TrainArgs tr;
    train->add_option("--task", tr.task, "kpp | euler | vks-steady-vae | vks-full-seq")
        ->required();
    train->add_option("--model", tr.model, "node | hbnode | ghbnode")
        ->check(CLI::IsMember({"node", "hbnode", "ghbnode"}));
    train->add_option("--reduction", tr.reduction, "pod artifact or pod-ensemble manifest")
        ->required();
    train->add_option("--out", tr.out, "run output directory");
    train->add_option("--profile", tr.profile, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    train->add_option("--config", tr.config_file, "json config overlay");
    train->add_option("--seed", tr.seed, "rng seed");
    train->add_option("--epochs", tr.epochs, "training epochs");
    train->add_option("--rank", tr.rank, "POD order used");
    train->add_option("--latent", tr.latent, "latent dimension");
    train->add_option("--batch-size", tr.batch_size, "minibatch size (0 = full batch)");
    train->add_option("--lr", tr.lr, "learning rate");
    train->add_option("--kl-weight", tr.kl_weight, "KL weight (vae task)");
    train->add_option("--rtol", tr.rtol, "integration tolerance");
    train->add_option("--clip-norm", tr.clip_norm, "global gradient-norm clip (0 = off)");
    train->add_flag("--json", tr.as_json, "machine-readable output");

    // predict
    auto* predict = app.add_subcommand("predict", "roll a trained model forward");
    std::string ck_path, pred_out, reconstruct_out;
    std::int64_t horizon = 0;
    predict->add_option("--checkpoint", ck_path, "checkpoint.json path")->required();
    predict->add_option("--horizon", horizon, "steps to predict")->required();
    predict->add_option("--out", pred_out, "prediction csv path")->required();
    predict->add_option("--reconstruct", reconstruct_out,
                        "also write reconstructed fields to this csv");

    // report
    auto* report = app.add_subcommand("report", "aggregate training runs");
    std::vector<std::string> run_dirs;
    std::string report_out;
    report->add_option("dirs", run_dirs, "run directories")->required();
    report->add_option("--out", report_out, "write the summary json here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (simulate->parsed()) {
        for (auto* sub : {sim_kpp, sim_euler, sim_vks})
            if (sub->parsed()) {
                sim.kind = sub->get_name();
                return run_simulate(sim);
            }
    }
    if (reduce->parsed()) {
        if (red_pod->parsed()) return run_reduce_pod(red);
        if (red_dmd->parsed()) return run_reduce_dmd(red);
    }
    if (train->parsed()) return run_train(tr);
    if (predict->parsed()) {
        hbrom_model* model = nullptr;
        auto st = hbrom_model_open(ck_path.c_str(), &model);
        if (st != HBROM_OK) return report_failure(st);
        st = hbrom_model_predict_csv(model, horizon, pred_out.c_str(),
                                     reconstruct_out.empty() ? nullptr
                                                             : reconstruct_out.c_str());
        hbrom_model_free(model);
        if (st != HBROM_OK) return report_failure(st);
        std::printf("wrote %s\n", pred_out.c_str());
        return 0;
    }
    if (report->parsed()) {
        std::vector<const char*> dirs;
        for (const auto& d : run_dirs) dirs.push_back(d.c_str());
        StringOut out;
        const auto st = hbrom_report(dirs.data(), static_cast<std::int64_t>(dirs.size()),
                                     &out.value);
        if (st != HBROM_OK) return report_failure(st);
        if (!report_out.empty()) {
            std::FILE* f = std::fopen(report_out.c_str(), "wb");
            if (!f) {
                std::fprintf(stderr, "error: cannot open '%s'\n", report_out.c_str());
                return 2;
            }
            std::fwrite(out.str().data(), 1, out.str().size(), f);
            std::fclose(f);
        }
        std::printf("%s\n", out.str().c_str());
        return 0;
    }
    return 2;
}
