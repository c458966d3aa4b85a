// Exit-code and surface checks on the installed CLI binary.
#include "doctest_main.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string cli() { return HBROM_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("hbrom_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("") == 2);
    CHECK(run("simulate") == 2);
    CHECK(run("simulate warp --out x.snap") == 2);
    CHECK(run("reduce pod") == 2);
    TempDir tmp;
    // out-of-range eta is a usage error from the library
    CHECK(run("simulate euler --eta-u 5 --out " + tmp.file("x.snap")) == 2);
    // malformed input file
    std::ofstream(tmp.file("junk.snap")) << "not a snapshot";
    CHECK(run("reduce pod --rank 2 --in " + tmp.file("junk.snap") + " --out " +
              tmp.file("b.json")) == 2);
}

TEST_CASE("the documented pipeline runs end to end with exit code 0") {
    TempDir tmp;
    const auto snap = tmp.file("v.snap");
    CHECK(run("simulate synthetic-vks --out " + snap +
              " --n-dof 32 --n-t 50 --transient-len 0") == 0);
    const auto basis = tmp.file("basis.json");
    CHECK(run("reduce pod --rank 3 --in " + snap + " --out " + basis) == 0);
    const auto rundir = tmp.file("run");
    CHECK(run("train --task kpp --model hbnode --reduction " + basis + " --out " + rundir +
              " --seed 1 --epochs 2 --rank 3 --latent 3") == 0);
    CHECK(run("predict --checkpoint " + rundir + "/checkpoint.json --horizon 3 --out " +
              tmp.file("p.csv")) == 0);
    CHECK(run("report " + rundir) == 0);

    // missing reduction artifact names a usage error (exit 2)
    CHECK(run("train --task kpp --model node --reduction " + tmp.file("missing.json") +
              " --out " + rundir) == 2);
    // horizon 0 writes a header-only csv
    CHECK(run("predict --checkpoint " + rundir + "/checkpoint.json --horizon 0 --out " +
              tmp.file("h0.csv")) == 0);
    std::ifstream h0(tmp.file("h0.csv"));
    std::string line;
    std::getline(h0, line);
    CHECK(line == "t,alpha_1,alpha_2,alpha_3");
    CHECK_FALSE(std::getline(h0, line));
}

TEST_CASE("paper-profile euler member has the documented shape") {
    TempDir tmp;
    const auto snap = tmp.file("e.snap");
    CHECK(run("simulate euler --eta-u 2 --eta-rho 3 --profile paper --out " + snap) == 0);
    // PODSNAP1 header carries nt and ndof; check via the reduce table path
    std::ifstream in(snap, std::ios::binary);
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(blob.substr(0, 8) == "PODSNAP1");
    CHECK(blob.find("\"ndof\":3000") != std::string::npos);
    CHECK(blob.find("\"nt\":180") != std::string::npos);
}

TEST_CASE("identical flags give byte-identical snapshot files") {
    TempDir tmp;
    const auto a = tmp.file("a.snap");
    const auto b = tmp.file("b.snap");
    const std::string flags = "simulate kpp --nx 16 --ny 16 --snapshots 20 --seed 7 --out ";
    CHECK(run(flags + a) == 0);
    CHECK(run(flags + b) == 0);
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    const std::string ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(ba == bb);
}

TEST_CASE("solver instability during training exits with code 3") {
    TempDir tmp;
    const auto snap = tmp.file("t.snap");
    REQUIRE(run("simulate synthetic-vks --out " + snap +
                " --n-dof 32 --n-t 50 --transient-len 0") == 0);
    const auto basis = tmp.file("b.json");
    REQUIRE(run("reduce pod --rank 3 --in " + snap + " --out " + basis) == 0);
    // an absurd learning rate blows the latent field up until the adaptive
    // solver gives up
    CHECK(run("train --task kpp --model node --reduction " + basis + " --out " +
              tmp.file("run") + " --seed 1 --epochs 5 --rank 3 --latent 3 --lr 1e8") == 3);
}
