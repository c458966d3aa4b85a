#include "doctest_main.hpp"

#include <cmath>

#include "fom/synthetic.hpp"
#include "numkit/svd.hpp"
#include "rom/dmd.hpp"
#include "rom/pod.hpp"
#include "util/rng.hpp"

using hbrom::Error;
using hbrom::Rng;
using namespace hbrom::rom;
namespace nk = hbrom::numkit;
namespace fm = hbrom::fom;

namespace {

fm::SnapshotSet snapshots_from(nk::DenseMatrix data) {
    fm::SnapshotSet s;
    s.times.resize(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) s.times[i] = static_cast<double>(i);
    s.fields = {{"u", data.cols()}};
    s.data = std::move(data);
    return s;
}

nk::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    nk::DenseMatrix m(rows, cols);
    for (auto& v : m.data()) v = rng.uniform(-1.0, 1.0);
    return m;
}

// trajectory of the linear map y_{k+1} = D y_k stacked into rows
fm::SnapshotSet linear_system_snapshots(const nk::DenseMatrix& d, std::vector<double> y0,
                                        std::size_t steps) {
    nk::DenseMatrix data(steps, y0.size());
    std::vector<double> y = std::move(y0);
    for (std::size_t k = 0; k < steps; ++k) {
        std::copy(y.begin(), y.end(), data.row_ptr(k));
        y = nk::matvec(d, y);
    }
    return snapshots_from(std::move(data));
}

} // namespace

TEST_CASE("center_snapshots") {
    SUBCASE("two identical rows give zero fluctuation") {
        nk::DenseMatrix data(2, 3);
        for (std::size_t j = 0; j < 3; ++j) {
            data(0, j) = 1.5;
            data(1, j) = 1.5;
        }
        auto [fluct, mean] = center_snapshots(snapshots_from(std::move(data)));
        for (double v : fluct.data.data()) CHECK(v == 0.0);
        for (double m : mean) CHECK(m == 1.5);
    }
    SUBCASE("single-dof rows 0 and 2") {
        nk::DenseMatrix data(2, 1);
        data(1, 0) = 2.0;
        auto [fluct, mean] = center_snapshots(snapshots_from(std::move(data)));
        CHECK(mean[0] == 1.0);
        CHECK(fluct.data(0, 0) == -1.0);
        CHECK(fluct.data(1, 0) == 1.0);
    }
    SUBCASE("random 10x30 columns sum to zero") {
        Rng rng(1);
        auto [fluct, mean] = center_snapshots(snapshots_from(random_matrix(10, 30, rng)));
        for (std::size_t j = 0; j < 30; ++j) {
            double sum = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < 10; ++i) {
                sum += fluct.data(i, j);
                scale = std::max(scale, std::fabs(fluct.data(i, j)));
            }
            CHECK(std::fabs(sum) <= 1e-10 * 10 * std::max(scale, 1.0));
        }
    }
    SUBCASE("single snapshot is an error") {
        CHECK_THROWS_AS((void)center_snapshots(snapshots_from(nk::DenseMatrix(1, 4))), Error);
    }
}

TEST_CASE("pod_fit") {
    Rng rng(2);
    SUBCASE("rank-1 data reconstructs exactly with I(1) = 1") {
        std::vector<double> a(12), b(40);
        for (auto& v : a) v = rng.uniform(-1, 1);
        for (auto& v : b) v = rng.uniform(-1, 1);
        nk::DenseMatrix data(12, 40);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j < 40; ++j) data(i, j) = a[i] * b[j];
        const auto snaps = snapshots_from(std::move(data));
        const auto basis = pod_fit(snaps, 1);
        CHECK(relative_info(basis.eigenvalues, 1) == doctest::Approx(1.0).epsilon(1e-10));
        const auto rec = pod_reconstruct(basis, basis.coeffs);
        CHECK(nk::subtract(rec, snaps.data).frobenius_norm() <=
              1e-10 * snaps.data.frobenius_norm());
    }
    SUBCASE("full-rank round trip within 1e-8") {
        const auto snaps = snapshots_from(random_matrix(20, 50, rng));
        const auto basis = pod_fit(snaps, 20);
        const auto rec = pod_reconstruct(basis, basis.coeffs);
        CHECK(nk::subtract(rec, snaps.data).frobenius_norm() <=
              1e-8 * snaps.data.frobenius_norm());
    }
    SUBCASE("truncation error squared equals the eigenvalue tail") {
        const auto snaps = snapshots_from(random_matrix(20, 50, rng));
        const auto basis = pod_fit(snaps, 5);
        const auto rec = pod_reconstruct(basis, basis.coeffs);
        const double err2 = std::pow(nk::subtract(rec, snaps.data).frobenius_norm(), 2);
        double tail = 0.0;
        for (std::size_t i = 5; i < basis.eigenvalues.size(); ++i) tail += basis.eigenvalues[i];
        CHECK(err2 == doctest::Approx(tail).epsilon(1e-6));
    }
    SUBCASE("covariance eigenvalues equal squared singular values of the data") {
        const auto snaps = snapshots_from(random_matrix(20, 50, rng));
        const auto basis = pod_fit(snaps, 8);
        const auto sv = nk::svd(snaps.data);
        for (std::size_t i = 0; i < sv.singular_values.size(); ++i)
            CHECK(basis.eigenvalues[i] ==
                  doctest::Approx(sv.singular_values[i] * sv.singular_values[i]).epsilon(1e-8));
    }
    SUBCASE("modes are column-orthonormal within 1e-8") {
        const auto snaps = snapshots_from(random_matrix(15, 60, rng));
        const auto basis = pod_fit(snaps, 10);
        const auto mtm = nk::matmul_at(basis.modes, basis.modes);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j)
                CHECK(std::fabs(mtm(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
    SUBCASE("rank-deficient data sets the warning flag and effective rank") {
        // rank-3 data requested at order 5
        const auto left = random_matrix(18, 3, rng);
        const auto right = random_matrix(3, 30, rng);
        const auto snaps = snapshots_from(nk::matmul(left, right));
        const auto basis = pod_fit(snaps, 5);
        CHECK(basis.rank_deficient);
        CHECK(basis.effective_rank == 3);
    }
    SUBCASE("order bounds are enforced") {
        const auto snaps = snapshots_from(random_matrix(6, 9, rng));
        CHECK_THROWS_AS((void)pod_fit(snaps, 0), Error);
        CHECK_THROWS_AS((void)pod_fit(snaps, 7), Error);
    }
}

TEST_CASE("relative_info") {
    SUBCASE("full order gives exactly 1") {
        const std::vector<double> lam = {5.0, 3.0, 0.5};
        CHECK(relative_info(lam, 3) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("(1,0,0) already complete at order 1") {
        const std::vector<double> lam = {1.0, 0.0, 0.0};
        CHECK(relative_info(lam, 1) == 1.0);
    }
    SUBCASE("hand arithmetic 7/10") {
        const std::vector<double> lam = {4.0, 3.0, 2.0, 1.0};
        CHECK(relative_info(lam, 2) == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("monotone in r") {
        const std::vector<double> lam = {4.0, 3.0, 2.0, 1.0};
        double prev = 0.0;
        for (std::size_t r = 1; r <= 4; ++r) {
            const double cur = relative_info(lam, r);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
    SUBCASE("degenerate spectrum is an error") {
        const std::vector<double> lam = {0.0, 0.0};
        CHECK_THROWS_AS((void)relative_info(lam, 1), Error);
    }
}

TEST_CASE("pod_reconstruct edge cases") {
    Rng rng(3);
    const auto raw = snapshots_from(random_matrix(10, 25, rng));
    auto basis = pod_from_snapshots(raw, 4);

    SUBCASE("zero coefficients give the mean snapshot") {
        const auto rec = pod_reconstruct(basis, nk::DenseMatrix(1, 4));
        for (std::size_t j = 0; j < 25; ++j)
            CHECK(rec(0, j) == doctest::Approx(basis.mean[j]).epsilon(1e-14));
    }
    SUBCASE("relative error obeys the information-content identity") {
        const auto rec = pod_reconstruct(basis, basis.coeffs);
        // compare against the centered data plus mean (i.e. the raw data)
        const double err = nk::subtract(rec, raw.data).frobenius_norm();
        double fluct_norm2 = 0.0;
        for (double lam : basis.eigenvalues) fluct_norm2 += lam;
        const double bound = std::sqrt(1.0 - relative_info(basis.eigenvalues, 4)) *
                             std::sqrt(fluct_norm2) * (1.0 + 1e-6);
        CHECK(err <= bound);
    }
    SUBCASE("width mismatch is a shape error") {
        CHECK_THROWS_AS((void)pod_reconstruct(basis, nk::DenseMatrix(1, 5)), Error);
    }
}

TEST_CASE("lift") {
    SUBCASE("identity spec leaves the data unchanged") {
        Rng rng(4);
        const auto snaps = snapshots_from(random_matrix(5, 7, rng));
        const auto lifted = lift(snaps, LiftSpec{});
        CHECK(lifted.data.data() == snaps.data.data());
    }
    SUBCASE("pointwise values of the full paper spec") {
        nk::DenseMatrix data(1, 1);
        data(0, 0) = 0.0;
        auto snaps = snapshots_from(std::move(data));
        const auto spec = LiftSpec::parse("cos,sin,sq,cube");
        auto lifted = lift(snaps, spec);
        REQUIRE(lifted.num_dof() == 5);
        CHECK(lifted.data(0, 0) == 0.0);
        CHECK(lifted.data(0, 1) == 1.0);
        CHECK(lifted.data(0, 2) == 0.0);
        CHECK(lifted.data(0, 3) == 0.0);
        CHECK(lifted.data(0, 4) == 0.0);

        snaps.data(0, 0) = 2.0;
        lifted = lift(snaps, spec);
        CHECK(lifted.data(0, 0) == 2.0);
        CHECK(lifted.data(0, 1) == doctest::Approx(std::cos(2.0)));
        CHECK(lifted.data(0, 2) == doctest::Approx(std::sin(2.0)));
        CHECK(lifted.data(0, 3) == 4.0);
        CHECK(lifted.data(0, 4) == 8.0);
    }
    SUBCASE("projecting back to the identity segment is the identity") {
        Rng rng(5);
        const auto snaps = snapshots_from(random_matrix(6, 9, rng));
        const auto lifted = lift(snaps, LiftSpec::parse("cos,sq"));
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 9; ++j) CHECK(lifted.data(i, j) == snaps.data(i, j));
    }
    SUBCASE("spec validation") {
        LiftSpec bad;
        bad.fns = {LiftFn::cosine};
        CHECK_THROWS_AS(bad.validate(), Error);
        bad.fns = {LiftFn::identity, LiftFn::identity};
        CHECK_THROWS_AS(bad.validate(), Error);
        CHECK_THROWS_AS((void)LiftSpec::parse("cos,warp"), Error);
    }
}

TEST_CASE("dmd_fit recovers exact linear dynamics") {
    SUBCASE("diag(0.9, 0.5) eigenvalues within 1e-8") {
        const std::vector<double> d = {0.9, 0.5};
        const auto snaps = linear_system_snapshots(nk::DenseMatrix::diagonal(d),
                                                   {1.0, 1.0}, 20);
        const auto model = dmd_fit(snaps, 2, LiftSpec{});
        REQUIRE(model.eigenvalues.size() == 2);
        CHECK(std::abs(model.eigenvalues[0] - std::complex<double>(0.9, 0.0)) < 1e-8);
        CHECK(std::abs(model.eigenvalues[1] - std::complex<double>(0.5, 0.0)) < 1e-8);
    }
    SUBCASE("rank-3 system embedded in 6 dof: exact one-step prediction") {
        Rng rng(6);
        nk::DenseMatrix p = random_matrix(6, 3, rng);
        const std::vector<double> gd = {0.9, 0.7, 0.5};
        const auto g = nk::DenseMatrix::diagonal(gd);
        // y_k = P z_k with z_{k+1} = G z_k
        nk::DenseMatrix data(15, 6);
        std::vector<double> z = {1.0, -0.5, 0.8};
        for (std::size_t k = 0; k < 15; ++k) {
            const auto y = nk::matvec(p, z);
            std::copy(y.begin(), y.end(), data.row_ptr(k));
            z = nk::matvec(g, z);
        }
        const auto model = dmd_fit(snapshots_from(std::move(data)), 3, LiftSpec{});
        CHECK(model.fit_residual <= 1e-8);
        std::vector<double> mags;
        for (const auto& e : model.eigenvalues) mags.push_back(std::abs(e));
        std::sort(mags.begin(), mags.end(), std::greater<>());
        CHECK(mags[0] == doctest::Approx(0.9).epsilon(1e-8));
        CHECK(mags[1] == doctest::Approx(0.7).epsilon(1e-8));
        CHECK(mags[2] == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("steady synthetic data has eigenvalues on the unit circle") {
        fm::SyntheticVksConfig cfg;
        cfg.n_dof = 64;
        cfg.n_t = 120;
        cfg.transient_len = 0;
        cfg.frequencies = {0.05, 0.05 * M_SQRT2};
        auto snaps = hbrom::fom::synthetic_vks(cfg);
        auto [fluct, mean] = center_snapshots(snaps);
        const auto model = dmd_fit(fluct, 4, LiftSpec{});
        for (const auto& e : model.eigenvalues)
            CHECK(std::abs(e) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("rank deficiency is an error") {
        Rng rng(7);
        std::vector<double> a(10), b(6);
        for (auto& v : a) v = rng.uniform(-1, 1);
        for (auto& v : b) v = rng.uniform(-1, 1);
        nk::DenseMatrix data(10, 6);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 6; ++j) data(i, j) = a[i] * b[j];
        CHECK_THROWS_AS((void)dmd_fit(snapshots_from(std::move(data)), 2, LiftSpec{}), Error);
    }
    SUBCASE("too few snapshots is an error") {
        CHECK_THROWS_AS((void)dmd_fit(snapshots_from(nk::DenseMatrix(2, 4)), 1, LiftSpec{}),
                        Error);
    }
}

TEST_CASE("dmd_predict") {
    const std::vector<double> d = {0.9, 0.5};
    const std::size_t n_train = 20;
    const auto snaps =
        linear_system_snapshots(nk::DenseMatrix::diagonal(d), {1.0, 1.0}, n_train);
    const auto model = dmd_fit(snaps, 2, LiftSpec{});

    SUBCASE("k = 0 reproduces the last training snapshot") {
        const auto p = dmd_predict(model, 0);
        CHECK(std::fabs(p[0] - snaps.data(n_train - 1, 0)) < 1e-8);
        CHECK(std::fabs(p[1] - snaps.data(n_train - 1, 1)) < 1e-8);
    }
    SUBCASE("k = 5 matches the closed-form powers") {
        const auto p = dmd_predict(model, 5);
        CHECK(p[0] == doctest::Approx(std::pow(0.9, n_train - 1 + 5)).epsilon(1e-8));
        CHECK(p[1] == doctest::Approx(std::pow(0.5, n_train - 1 + 5)).epsilon(1e-8));
    }
    SUBCASE("decaying spectrum keeps prediction norms below the training norm") {
        const double train_norm = std::sqrt(std::pow(snaps.data(n_train - 1, 0), 2) +
                                            std::pow(snaps.data(n_train - 1, 1), 2));
        for (long k : {10L, 100L, 1000L}) {
            const auto p = dmd_predict(model, k);
            CHECK(std::sqrt(p[0] * p[0] + p[1] * p[1]) <= train_norm * (1 + 1e-12));
        }
    }
    SUBCASE("mode expansion matches the trajectory with tiny imaginary residue") {
        for (long k : {0L, 3L, 7L}) {
            const auto exp_k = dmd_mode_expansion(model, k);
            double imag_resid = 0.0, scale = 0.0;
            for (const auto& c : exp_k) {
                imag_resid = std::max(imag_resid, std::fabs(c.imag()));
                scale = std::max(scale, std::abs(c));
            }
            CHECK(imag_resid <= 1e-8 * std::max(scale, 1.0));
            CHECK(exp_k[0].real() ==
                  doctest::Approx(snaps.data(static_cast<std::size_t>(k), 0)).epsilon(1e-8));
            CHECK(exp_k[1].real() ==
                  doctest::Approx(snaps.data(static_cast<std::size_t>(k), 1)).epsilon(1e-8));
        }
    }
}

TEST_CASE("dmd eigenvalues are closed under conjugation for rotational dynamics") {
    const double theta = 0.35;
    nk::DenseMatrix rot(2, 2);
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    const auto snaps = linear_system_snapshots(rot, {1.0, 0.0}, 30);
    const auto model = dmd_fit(snaps, 2, LiftSpec{});
    REQUIRE(model.eigenvalues.size() == 2);
    CHECK(std::abs(model.eigenvalues[0] - std::conj(model.eigenvalues[1])) < 1e-10);
    CHECK(std::abs(model.amplitudes[0] - std::conj(model.amplitudes[1])) < 1e-8);
    // predictions stay real and on the rotation orbit
    const auto p = dmd_predict(model, 4);
    const double expected0 = std::cos(theta * (30 - 1 + 4));
    CHECK(p[0] == doctest::Approx(expected0).epsilon(1e-6));
}
