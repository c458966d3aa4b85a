// Task-level smoke coverage through the runner: the remaining task kinds and
// the imported-snapshot path.
#include "doctest_main.hpp"

#include <filesystem>

#include "fom/synthetic.hpp"
#include "io/artifacts.hpp"
#include "io/snapshot_file.hpp"
#include "pipeline/runner.hpp"
#include "rom/pod.hpp"

using namespace hbrom;
namespace pl = hbrom::pipeline;
namespace dyn = hbrom::dynamics;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("hbrom_tasks_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("vks_full_seq trains through the runner on imported snapshots") {
    TempDir tmp;
    // write synthetic data re-labelled as an external import, then ingest it
    fom::SyntheticVksConfig scfg;
    scfg.n_dof = 64;
    scfg.n_t = 120;
    scfg.transient_len = 40;
    auto snaps = fom::synthetic_vks(scfg);
    snaps.source = fom::SnapshotSource::vks_import;
    const auto snap_path = tmp.file("import.snap");
    io::write_snapshot_file(snaps, snap_path);
    const auto loaded = io::read_snapshot_file(snap_path);
    CHECK(loaded.source == fom::SnapshotSource::vks_import);

    io::PodArtifact artifact;
    artifact.basis = rom::pod_from_snapshots(loaded, 4);
    artifact.times = loaded.times;
    artifact.source = fom::to_string(loaded.source);
    const auto basis_path = tmp.file("basis.json");
    io::write_pod_artifact(artifact, basis_path);

    // the multi-input-single-output protocol: 9 preceding steps predict the 10th
    pl::TrainConfig cfg = pl::default_config(pl::Task::vks_full_seq, dyn::ModelKind::hbnode);
    CHECK(cfg.seq_in == 9);
    CHECK(cfg.ode_layers == 12);
    cfg.ode_layers = 2; // slimmed for the smoke run
    cfg.ode_hidden = 8;
    cfg.latent_dim = 4;
    cfg.rank = 4;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    auto result = pl::run_training(cfg, basis_path);
    REQUIRE_FALSE(result.run.diverged);
    CHECK(result.run.records.size() == 3);
    for (const auto& r : result.run.records) {
        CHECK(std::isfinite(r.train_mse));
        CHECK(std::isfinite(r.val_mse));
        CHECK(r.fwd_nfe > 0);
        CHECK(r.bwd_nfe > 0);
    }
    // the checkpoint produced by this task rolls out
    const auto pred = pl::model_rollout(result.model, 7);
    CHECK(pred.rows() == 7);
    CHECK(pred.all_finite());
}

TEST_CASE("euler task through the runner keeps held-out parameters for validation") {
    TempDir tmp;
    // a small synthetic ensemble standing in for per-parameter bases
    std::string manifest = "{\"kind\":\"pod_ensemble\",\"members\":[";
    fom::SyntheticVksConfig scfg;
    scfg.n_dof = 32;
    scfg.n_t = 30;
    scfg.transient_len = 0;
    for (int i = 0; i < 5; ++i) {
        scfg.frequencies = {0.05 + 0.01 * i};
        const auto snaps = fom::synthetic_vks(scfg);
        io::PodArtifact artifact;
        artifact.basis = rom::pod_from_snapshots(snaps, 2);
        artifact.times = snaps.times;
        char name[32];
        std::snprintf(name, sizeof name, "b%02d.json", i);
        io::write_pod_artifact(artifact, tmp.file(name));
        if (i) manifest += ",";
        manifest += std::string("{\"basis\":\"") + name + "\"}";
    }
    manifest += "]}";
    {
        std::ofstream out(tmp.file("ensemble.json"));
        out << manifest;
    }

    pl::TrainConfig cfg = pl::default_config(pl::Task::euler_param_seq, dyn::ModelKind::ghbnode);
    cfg.seq_in = 20;
    cfg.seq_out = 10;
    cfg.latent_dim = 3;
    cfg.ode_layers = 2;
    cfg.ode_hidden = 6;
    cfg.rank = 2;
    cfg.epochs = 2;
    cfg.batch_size = 2;
    cfg.split_fraction = 0.8; // 4 train, 1 held out
    auto result = pl::run_training(cfg, tmp.file("ensemble.json"));
    REQUIRE_FALSE(result.run.diverged);
    CHECK(result.run.records.size() == 2);
    // the rollout seed comes from the held-out member
    CHECK(result.model.seed_window.rows() == 20);
    CHECK(result.model.basis.has_value());
}
