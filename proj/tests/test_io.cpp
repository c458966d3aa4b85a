#include "doctest_main.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fom/synthetic.hpp"
#include "io/artifacts.hpp"
#include "io/metrics_csv.hpp"
#include "io/snapshot_file.hpp"
#include "pipeline/runner.hpp"
#include "rom/pod.hpp"
#include "util/rng.hpp"

using hbrom::Error;
using hbrom::Rng;
namespace io = hbrom::io;
namespace fm = hbrom::fom;
namespace nk = hbrom::numkit;
namespace pl = hbrom::pipeline;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hbrom_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

fm::SnapshotSet sample_snapshots() {
    fm::SyntheticVksConfig cfg;
    cfg.n_dof = 24;
    cfg.n_t = 16;
    cfg.transient_len = 4;
    return fm::synthetic_vks(cfg);
}

} // namespace

TEST_CASE("snapshot file round-trips byte-identically") {
    TempDir tmp;
    auto snaps = sample_snapshots();
    snaps.params = fm::EulerParams{2.25, 3.5};

    const auto p1 = tmp.file("a.snap");
    const auto p2 = tmp.file("b.snap");
    io::write_snapshot_file(snaps, p1);
    const auto loaded = io::read_snapshot_file(p1);
    io::write_snapshot_file(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));

    CHECK(loaded.num_times() == snaps.num_times());
    CHECK(loaded.num_dof() == snaps.num_dof());
    CHECK(loaded.data.data() == snaps.data.data());
    CHECK(loaded.times == snaps.times);
    REQUIRE(loaded.params.has_value());
    CHECK(loaded.params->eta_u == 2.25);
    CHECK(loaded.fields.size() == snaps.fields.size());
}

TEST_CASE("snapshot file layout starts with the magic and header length") {
    TempDir tmp;
    const auto path = tmp.file("layout.snap");
    io::write_snapshot_file(sample_snapshots(), path);
    const std::string blob = slurp(path);
    REQUIRE(blob.size() > 12);
    CHECK(blob.substr(0, 8) == "PODSNAP1");
    const auto header_len = static_cast<std::size_t>(static_cast<unsigned char>(blob[8])) |
                            static_cast<std::size_t>(static_cast<unsigned char>(blob[9])) << 8 |
                            static_cast<std::size_t>(static_cast<unsigned char>(blob[10])) << 16 |
                            static_cast<std::size_t>(static_cast<unsigned char>(blob[11])) << 24;
    CHECK(blob.size() == 12 + header_len + 16 * 24 * 8);
    CHECK(blob[12] == '{');
}

TEST_CASE("snapshot file rejects corruption with an offset diagnostic") {
    TempDir tmp;
    const auto path = tmp.file("bad.snap");
    io::write_snapshot_file(sample_snapshots(), path);
    auto blob = slurp(path);

    SUBCASE("bad magic") {
        blob[0] = 'X';
        std::ofstream(path, std::ios::binary | std::ios::trunc) << blob;
        CHECK_THROWS_WITH_AS((void)io::read_snapshot_file(path), doctest::Contains("offset 0"),
                             Error);
    }
    SUBCASE("truncated payload") {
        blob.resize(blob.size() - 5);
        std::ofstream(path, std::ios::binary | std::ios::trunc) << blob;
        CHECK_THROWS_WITH_AS((void)io::read_snapshot_file(path), doctest::Contains("payload"),
                             Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)io::read_snapshot_file(tmp.file("nope.snap")), Error);
    }
}

TEST_CASE("metrics csv") {
    std::vector<io::EpochRecord> records(3);
    for (int e = 0; e < 3; ++e) {
        auto& r = records[static_cast<std::size_t>(e)];
        r.epoch = e;
        r.train_mse = 0.1 / (e + 1);
        r.val_mse = 0.2 / (e + 1);
        r.fwd_nfe = 120 + e;
        r.bwd_nfe = 90 + e;
        r.stiffness = 3.5 + e;
        r.adj_norm_t0 = 1e-3 * (e + 1);
        r.adj_norm_tT = 2e-3;
    }
    const std::string text = io::metrics_to_csv(records);

    SUBCASE("header and column count are fixed") {
        CHECK(text.rfind("epoch,train_mse,val_mse,fwd_nfe,bwd_nfe,stiffness,adj_norm_t0,"
                         "adj_norm_tT\n",
                         0) == 0);
        const auto parsed = io::metrics_from_csv(text);
        REQUIRE(parsed.size() == 3);
        for (std::size_t e = 0; e < 3; ++e) {
            CHECK(parsed[e].epoch == records[e].epoch);
            CHECK(parsed[e].train_mse == records[e].train_mse);
            CHECK(parsed[e].val_mse == records[e].val_mse);
            CHECK(parsed[e].fwd_nfe == records[e].fwd_nfe);
            CHECK(parsed[e].stiffness == records[e].stiffness);
            CHECK(parsed[e].adj_norm_t0 == records[e].adj_norm_t0);
            CHECK(parsed[e].adj_norm_tT == records[e].adj_norm_tT);
        }
    }
    SUBCASE("write-read-write is byte identical") {
        TempDir tmp;
        const auto p1 = tmp.file("m1.csv");
        const auto p2 = tmp.file("m2.csv");
        io::write_metrics_csv(records, p1);
        io::write_metrics_csv(io::read_metrics_csv(p1), p2);
        CHECK(slurp(p1) == slurp(p2));
    }
    SUBCASE("wrong column count is rejected") {
        CHECK_THROWS_WITH_AS((void)io::metrics_from_csv("a,b,c\n"), doctest::Contains("columns"),
                             Error);
    }
    SUBCASE("non-numeric fields are rejected") {
        std::string bad = text;
        bad += "3,oops,0,0,0,1,0,0\n";
        CHECK_THROWS_AS((void)io::metrics_from_csv(bad), Error);
    }
}

TEST_CASE("format_double round-trips binary64") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(80)) - 40);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("pod artifact round-trips byte-identically") {
    TempDir tmp;
    auto snaps = sample_snapshots();
    io::PodArtifact artifact;
    artifact.basis = hbrom::rom::pod_from_snapshots(snaps, 4);
    artifact.times = snaps.times;
    artifact.source = "synthetic";

    const auto p1 = tmp.file("b1.json");
    const auto p2 = tmp.file("b2.json");
    io::write_pod_artifact(artifact, p1);
    auto loaded = io::read_pod_artifact(p1);
    io::write_pod_artifact(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(loaded.basis.rank == 4);
    CHECK(loaded.basis.coeffs.data() == artifact.basis.coeffs.data());
    CHECK(loaded.basis.modes.data() == artifact.basis.modes.data());
    CHECK(loaded.basis.eigenvalues == artifact.basis.eigenvalues);
}

TEST_CASE("dmd artifact round-trips byte-identically") {
    TempDir tmp;
    auto snaps = sample_snapshots();
    auto [fluct, mean] = hbrom::rom::center_snapshots(snaps);
    io::DmdArtifact artifact;
    artifact.model = hbrom::rom::dmd_fit(fluct, 4, hbrom::rom::LiftSpec::parse("cos,sin"));
    hbrom::rom::dmd_attach_mean(artifact.model, mean);
    artifact.times = snaps.times;

    const auto p1 = tmp.file("d1.json");
    const auto p2 = tmp.file("d2.json");
    io::write_dmd_artifact(artifact, p1);
    auto loaded = io::read_dmd_artifact(p1);
    io::write_dmd_artifact(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));

    // loaded model predicts identically
    const auto a = hbrom::rom::dmd_predict(artifact.model, 3);
    const auto b = hbrom::rom::dmd_predict(loaded.model, 3);
    CHECK(a == b);
}

TEST_CASE("checkpoint round-trips byte-identically and reproduces rollouts") {
    TempDir tmp;
    // train a tiny model through the runner
    auto snaps = sample_snapshots();
    io::PodArtifact artifact;
    artifact.basis = hbrom::rom::pod_from_snapshots(snaps, 3);
    artifact.times = snaps.times;
    artifact.source = "synthetic";
    const auto basis_path = tmp.file("basis.json");
    io::write_pod_artifact(artifact, basis_path);

    pl::TrainConfig cfg;
    cfg.task = pl::Task::kpp_seq;
    cfg.model = hbrom::dynamics::ModelKind::ghbnode;
    cfg.latent_dim = 3;
    cfg.ode_layers = 2;
    cfg.ode_hidden = 4;
    cfg.seq_in = 2;
    cfg.seq_out = 1;
    cfg.rank = 3;
    cfg.epochs = 2;
    cfg.lr = 0.01;
    cfg.split_fraction = 0.7;
    auto result = pl::run_training(cfg, basis_path);
    REQUIRE_FALSE(result.run.diverged);

    const auto c1 = tmp.file("ck1.json");
    const auto c2 = tmp.file("ck2.json");
    pl::write_checkpoint(result.model, c1);
    auto loaded = pl::read_checkpoint(c1);
    pl::write_checkpoint(loaded, c2);
    CHECK(slurp(c1) == slurp(c2));

    const auto r1 = pl::model_rollout(result.model, 5);
    const auto r2 = pl::model_rollout(loaded, 5);
    REQUIRE(r1.rows() == r2.rows());
    CHECK(r1.data() == r2.data());
}

TEST_CASE("prediction csv shapes") {
    TempDir tmp;
    nk::DenseMatrix coeffs(2, 3);
    coeffs(0, 0) = 1.0;
    coeffs(1, 2) = -2.5;
    const auto path = tmp.file("pred.csv");
    pl::write_prediction_csv(coeffs, 10.0, 0.5, path);
    const auto text = slurp(path);
    CHECK(text == "t,alpha_1,alpha_2,alpha_3\n10,1,0,0\n10.5,0,0,-2.5\n");

    // horizon 0: header only
    pl::write_prediction_csv(nk::DenseMatrix(0, 3), 0.0, 1.0, path);
    CHECK(slurp(path) == "t,alpha_1,alpha_2,alpha_3\n");
}
