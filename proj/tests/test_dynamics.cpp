#include "doctest_main.hpp"

#include <cmath>

#include "dynamics/adjoint.hpp"
#include "dynamics/linearized.hpp"
#include "dynamics/model.hpp"
#include "numkit/eig.hpp"
#include "odeint/stiffness.hpp"
#include "util/rng.hpp"

using hbrom::Error;
using hbrom::Rng;
using namespace hbrom::dynamics;
namespace nk = hbrom::numkit;
namespace oi = hbrom::odeint;

namespace {

// loss = 1/2 ||h(T)||^2 over the h block
double terminal_h_loss(const OdeModel& model, const std::vector<double>& y_final) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.latent_dim; ++i) s += y_final[i] * y_final[i];
    return 0.5 * s;
}

std::vector<double> terminal_h_cotangent(const OdeModel& model,
                                         const std::vector<double>& y_final) {
    std::vector<double> cot(y_final.size(), 0.0);
    for (std::size_t i = 0; i < model.latent_dim; ++i) cot[i] = y_final[i];
    return cot;
}

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max({std::fabs(got), std::fabs(want), 1e-6});
}

// sets the network to a fixed linear map W with zero bias
void make_linear_net(OdeModel& model, const nk::DenseMatrix& w) {
    model.net.weights.assign(1, w);
    model.net.biases.assign(1, std::vector<double>(w.rows(), 0.0));
    ++model.net.version;
}

} // namespace

TEST_CASE("rhs arithmetic per kind") {
    Rng rng(1);
    SUBCASE("hbnode with f=0, gamma=1, state (0,1) gives (1,-1)") {
        OdeModel m = make_model(ModelKind::hbnode, 1, 1, 0, rng);
        make_linear_net(m, nk::DenseMatrix(1, 1));
        m.epsilon = 2.0;
        m.omega = 0.0; // gamma = 2*sigmoid(0) = 1
        std::vector<double> out(2);
        model_rhs(m, std::vector<double>{0.0, 1.0}, 0.0, out);
        CHECK(out[0] == doctest::Approx(1.0));
        CHECK(out[1] == doctest::Approx(-1.0));
    }
    SUBCASE("ghbnode with m=0 freezes h") {
        OdeModel m = make_model(ModelKind::ghbnode, 2, 2, 4, rng);
        std::vector<double> out(4);
        model_rhs(m, std::vector<double>{0.4, -0.3, 0.0, 0.0}, 0.0, out);
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 0.0);
    }
    SUBCASE("node with linear net equals the matrix action") {
        OdeModel m = make_model(ModelKind::node, 2, 1, 0, rng);
        nk::DenseMatrix w(2, 2);
        w(0, 0) = 0.5;
        w(0, 1) = -1.0;
        w(1, 0) = 2.0;
        w(1, 1) = 0.1;
        make_linear_net(m, w);
        const std::vector<double> h = {0.3, 0.7};
        std::vector<double> out(2);
        model_rhs(m, h, 0.0, out);
        const auto expected = nk::matvec(w, h);
        CHECK(out[0] == doctest::Approx(expected[0]).epsilon(1e-14));
        CHECK(out[1] == doctest::Approx(expected[1]).epsilon(1e-14));
    }
    SUBCASE("width mismatch is a shape error") {
        OdeModel m = make_model(ModelKind::hbnode, 2, 1, 0, rng);
        std::vector<double> out(4);
        CHECK_THROWS_AS(model_rhs(m, std::vector<double>{1.0, 2.0}, 0.0,
                                  std::span<double>(out.data(), 2)),
                        Error);
    }
}

TEST_CASE("constant adjoint for zero field") {
    Rng rng(2);
    OdeModel m = make_model(ModelKind::node, 2, 2, 4, rng);
    for (auto& w : m.net.weights) std::fill(w.data().begin(), w.data().end(), 0.0);
    for (auto& b : m.net.biases) std::fill(b.begin(), b.end(), 0.0);
    ++m.net.version;

    const std::vector<double> y0 = {0.7, -0.2};
    oi::Dopri5Config cfg;
    const auto traj = integrate_model(m, y0, 0.0, 1.0, cfg);
    const std::vector<double> cot = {1.0, 2.0};
    const auto res = adjoint_gradient(m, traj, cot);
    CHECK(res.initial_adjoint[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.initial_adjoint[1] == doctest::Approx(2.0).epsilon(1e-9));
    for (double n : res.trace.norms)
        CHECK(n == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("linear node adjoint matches the closed-form exponential") {
    // rhs = lambda h, scalar: a(t) = a(T) e^{lambda (T - t)}
    Rng rng(3);
    OdeModel m = make_model(ModelKind::node, 1, 1, 0, rng);
    const double lambda = -1.3;
    nk::DenseMatrix w(1, 1);
    w(0, 0) = lambda;
    make_linear_net(m, w);

    const double T = 2.0;
    oi::Dopri5Config cfg;
    const auto traj = integrate_model(m, std::vector<double>{1.0}, 0.0, T, cfg);
    AdjointOptions opts;
    const auto res = adjoint_gradient(m, traj, std::vector<double>{1.0}, opts);
    for (std::size_t k = 0; k < res.trace.times.size(); ++k) {
        const double expected = std::exp(lambda * (T - res.trace.times[k]));
        CHECK(rel_err(res.trace.norms[k], expected) < 1e-6);
    }
    CHECK(res.trace.terminal_norm == doctest::Approx(1.0));
    CHECK(rel_err(res.trace.initial_norm, std::exp(lambda * T)) < 1e-6);
}

TEST_CASE("adjoint gradients match central finite differences for every kind") {
    Rng rng(4);
    const double T = 0.7;
    oi::Dopri5Config cfg; // rtol 1e-8
    AdjointOptions opts;

    for (ModelKind kind : {ModelKind::node, ModelKind::hbnode, ModelKind::ghbnode}) {
        CAPTURE(to_string(kind));
        OdeModel m = make_model(kind, 2, 2, 8, rng);
        std::vector<double> y0(m.state_width());
        for (auto& v : y0) v = rng.uniform(-0.8, 0.8);

        const auto traj = integrate_model(m, y0, 0.0, T, cfg);
        const auto cot = terminal_h_cotangent(m, traj.final_state());
        const auto res = adjoint_gradient(m, traj, cot, opts);

        const auto theta = m.flat_params();
        REQUIRE(res.param_gradient.size() == theta.size());
        const double eps = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            auto tp = theta;
            tp[i] += eps;
            m.set_flat_params(tp);
            const double lp = terminal_h_loss(m, integrate_model(m, y0, 0.0, T, cfg).final_state());
            tp[i] -= 2 * eps;
            m.set_flat_params(tp);
            const double lm = terminal_h_loss(m, integrate_model(m, y0, 0.0, T, cfg).final_state());
            tp[i] += eps;
            m.set_flat_params(tp);
            const double fd = (lp - lm) / (2 * eps);
            CHECK(rel_err(res.param_gradient[i], fd) < 1e-4);
        }

        // initial-state gradient against finite differences
        for (std::size_t i = 0; i < y0.size(); ++i) {
            auto yp = y0, ym = y0;
            yp[i] += eps;
            ym[i] -= eps;
            const double lp = terminal_h_loss(m, integrate_model(m, yp, 0.0, T, cfg).final_state());
            const double lm = terminal_h_loss(m, integrate_model(m, ym, 0.0, T, cfg).final_state());
            const double fd = (lp - lm) / (2 * eps);
            CHECK(rel_err(res.initial_adjoint[i], fd) < 1e-4);
        }
    }
}

TEST_CASE("multi-pulse adjoint matches finite differences on an interior-loss problem") {
    Rng rng(14);
    OdeModel m = make_model(ModelKind::hbnode, 2, 2, 6, rng);
    std::vector<double> y0(m.state_width());
    for (auto& v : y0) v = rng.uniform(-0.5, 0.5);
    const double T = 1.0;
    oi::Dopri5Config cfg;

    // loss = 1/2 ||h(T/2)||^2 + 1/2 ||h(T)||^2
    auto loss_of = [&](const oi::Trajectory& traj) {
        const auto mid = oi::dense_eval(traj, T / 2);
        double s = 0.0;
        for (std::size_t i = 0; i < m.latent_dim; ++i)
            s += mid[i] * mid[i] + traj.final_state()[i] * traj.final_state()[i];
        return 0.5 * s;
    };
    const auto traj = integrate_model(m, y0, 0.0, T, cfg);
    std::vector<CotangentPulse> pulses(2);
    pulses[0].time = T;
    pulses[0].value = terminal_h_cotangent(m, traj.final_state());
    pulses[1].time = T / 2;
    pulses[1].value = terminal_h_cotangent(m, oi::dense_eval(traj, T / 2));
    const auto res = adjoint_gradient_multi(m, traj, pulses);

    const auto theta = m.flat_params();
    const double eps = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        auto tp = theta;
        tp[i] += eps;
        m.set_flat_params(tp);
        const double lp = loss_of(integrate_model(m, y0, 0.0, T, cfg));
        tp[i] -= 2 * eps;
        m.set_flat_params(tp);
        const double lm = loss_of(integrate_model(m, y0, 0.0, T, cfg));
        tp[i] += eps;
        m.set_flat_params(tp);
        CHECK(rel_err(res.param_gradient[i], (lp - lm) / (2 * eps)) < 1e-4);
    }
}

TEST_CASE("the backward hbnode adjoint is an hbnode with the same damping") {
    // In tau = T - t the adjoint pair (a_h, J^T a_m) obeys
    // u' = v, v' = -gamma v + J^T u: the forward heavy-ball system with the
    // same gamma driven by f(u) = J^T u.
    Rng rng(5);
    const std::size_t d = 3;
    nk::DenseMatrix j(d, d);
    for (auto& v : j.data()) v = rng.uniform(-1.0, 1.0);

    OdeModel hb = make_model(ModelKind::hbnode, d, 1, 0, rng);
    make_linear_net(hb, j); // f(h) = J h, so df/dh = J
    hb.omega = 0.37;
    const double gamma = hb.gamma();

    OdeModel mirror = make_model(ModelKind::hbnode, d, 1, 0, rng);
    make_linear_net(mirror, j.transposed());
    mirror.omega = hb.omega;
    mirror.epsilon = hb.epsilon;

    std::vector<double> a(2 * d), state(2 * d);
    for (auto& v : a) v = rng.uniform(-1.0, 1.0);
    for (auto& v : state) v = rng.uniform(-1.0, 1.0);

    // d/dtau = -d/dt along the backward sweep
    const auto da_dt = adjoint_state_derivative(hb, state, a, 0.3);
    std::vector<double> da_dtau(2 * d);
    for (std::size_t i = 0; i < 2 * d; ++i) da_dtau[i] = -da_dt[i];

    // map (a_h, a_m) -> (u, v) = (a_h, J^T a_m)
    std::vector<double> uv(2 * d);
    for (std::size_t i = 0; i < d; ++i) uv[i] = a[i];
    const auto a_m = std::span<const double>(a).subspan(d, d);
    const auto jtam = nk::matvec_t(j, a_m);
    for (std::size_t i = 0; i < d; ++i) uv[d + i] = jtam[i];

    std::vector<double> mirror_rhs(2 * d);
    model_rhs(mirror, uv, 0.0, mirror_rhs);

    // first block: du/dtau = da_h/dtau must equal mirror's dh/dt
    for (std::size_t i = 0; i < d; ++i)
        CHECK(da_dtau[i] == doctest::Approx(mirror_rhs[i]).epsilon(1e-12));
    // second block: dv/dtau = J^T da_m/dtau must equal mirror's dm/dt
    const auto da_m_dtau = std::span<const double>(da_dtau).subspan(d, d);
    const auto jt_dam = nk::matvec_t(j, da_m_dtau);
    for (std::size_t i = 0; i < d; ++i)
        CHECK(jt_dam[i] == doctest::Approx(mirror_rhs[d + i]).epsilon(1e-12));
    CHECK(gamma == doctest::Approx(mirror.gamma()));
}

TEST_CASE("hb_companion assembly and spectra") {
    SUBCASE("scalar A=-1, gamma=2 has a double eigenvalue at -1") {
        nk::DenseMatrix a(1, 1);
        a(0, 0) = -1.0;
        const auto b = hb_companion(a, 2.0);
        CHECK(b(0, 0) == 0.0);
        CHECK(b(0, 1) == 1.0);
        CHECK(b(1, 0) == -1.0);
        CHECK(b(1, 1) == -2.0);
        const auto eigs = hbrom::numkit::eig_general(b);
        for (const auto& e : eigs) {
            CHECK(e.real() == doctest::Approx(-1.0).epsilon(1e-6));
            CHECK(std::fabs(e.imag()) < 1e-6);
        }
    }
    SUBCASE("A=0, gamma=0 is nilpotent") {
        const auto b = hb_companion(nk::DenseMatrix(2, 2), 0.0);
        for (const auto& e : hbrom::numkit::eig_general(b)) CHECK(std::abs(e) < 1e-10);
    }
    SUBCASE("A=diag(-1,-100), gamma=2 has magnitudes {1,1,10,10}") {
        const std::vector<double> d = {-1.0, -100.0};
        const auto b = hb_companion(nk::DenseMatrix::diagonal(d), 2.0);
        auto eigs = hbrom::numkit::eig_general(b);
        std::vector<double> mags;
        for (const auto& e : eigs) mags.push_back(std::abs(e));
        std::sort(mags.begin(), mags.end());
        CHECK(mags[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mags[1] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mags[2] == doctest::Approx(10.0).epsilon(1e-8));
        CHECK(mags[3] == doctest::Approx(10.0).epsilon(1e-8));
    }
}

TEST_CASE("spectral_ratio basics") {
    const std::vector<double> d = {-1.0, -100.0};
    CHECK(spectral_ratio(nk::DenseMatrix::diagonal(d)) == doctest::Approx(100.0).epsilon(1e-8));
    CHECK(spectral_ratio(hb_companion(nk::DenseMatrix::diagonal(d), 2.0)) ==
          doctest::Approx(10.0).epsilon(1e-6));
    nk::DenseMatrix rot(2, 2);
    rot(0, 1) = 1.0;
    rot(1, 0) = -1.0;
    CHECK(spectral_ratio(rot) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS((void)spectral_ratio(nk::DenseMatrix(2, 2)), Error);
}

TEST_CASE("sqrt-kappa reduction for the heavy-ball companion at gamma = 2 sqrt(lambda_min)") {
    for (double kappa : {10.0, 100.0, 1000.0}) {
        const std::size_t n = 6;
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i)
            diag[i] = -(1.0 + (kappa - 1.0) * static_cast<double>(i) / static_cast<double>(n - 1));
        const auto a = nk::DenseMatrix::diagonal(diag);
        CHECK(spectral_ratio(a) == doctest::Approx(kappa).epsilon(1e-8));
        CHECK(spectral_ratio(hb_companion(a, 2.0)) ==
              doctest::Approx(std::sqrt(kappa)).epsilon(1e-6));
    }
}

TEST_CASE("pairing_check: Prop 2 pair sums") {
    Rng rng(6);
    SUBCASE("gamma=0, xi=0, identity sigma-jacobian, symmetric df/dh") {
        const std::size_t d = 3;
        nk::DenseMatrix jf(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                const double v = rng.uniform(-1.0, 1.0);
                jf(i, j) = v;
                jf(j, i) = v;
            }
        const auto sums = pairing_check(jf, 0.0, 0.0, nk::DenseMatrix::identity(d), -1.0);
        for (const auto& s : sums) CHECK(std::abs(s) < 1e-8);
    }
    SUBCASE("random blocks, gamma=0.5, t-T=-1: sums all equal -0.5") {
        const std::size_t d = 4;
        nk::DenseMatrix jf(d, d), js(d, d);
        for (auto& v : jf.data()) v = rng.uniform(-1.0, 1.0);
        for (auto& v : js.data()) v = rng.uniform(-1.0, 1.0);
        const auto sums = pairing_check(jf, 0.5, 0.3, js, -1.0);
        REQUIRE(sums.size() == d);
        for (const auto& s : sums) {
            CHECK(s.real() == doctest::Approx(-0.5).epsilon(1e-8));
            CHECK(std::fabs(s.imag()) < 1e-8);
        }
    }
    SUBCASE("scalar blocks follow Vieta for mu^2 + (T-t) gamma mu - c") {
        nk::DenseMatrix jf(1, 1), js(1, 1);
        jf(0, 0) = 0.8;
        js(0, 0) = 1.0;
        const double gamma = 0.7, t_minus_T = -2.0;
        const auto sums = pairing_check(jf, gamma, 0.0, js, t_minus_T);
        REQUIRE(sums.size() == 1);
        CHECK(sums[0].real() == doctest::Approx(t_minus_T * gamma).epsilon(1e-10));
    }
    SUBCASE("mismatched blocks are a shape error") {
        CHECK_THROWS_AS((void)pairing_check(nk::DenseMatrix(2, 2), 0.1, 0.0,
                                            nk::DenseMatrix(3, 3), -1.0),
                        Error);
    }
}

TEST_CASE("heavy-ball form needs fewer function evaluations on a stiff spectrum") {
    const std::vector<double> diag = {-1.0, -1000.0};
    const auto a = nk::DenseMatrix::diagonal(diag);
    const auto b = hb_companion(a, 2.0);

    oi::Dopri5Config cfg;
    cfg.rtol = 1e-6;
    cfg.atol = 1e-8;
    const oi::RhsFn node_rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const auto v = nk::matvec(a, y);
        std::copy(v.begin(), v.end(), dy.begin());
    };
    const oi::RhsFn hb_rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const auto v = nk::matvec(b, y);
        std::copy(v.begin(), v.end(), dy.begin());
    };
    const auto node_traj = oi::dopri5_integrate(node_rhs, std::vector<double>{1.0, 1.0}, 0.0, 1.0, cfg);
    const auto hb_traj =
        oi::dopri5_integrate(hb_rhs, std::vector<double>{1.0, 1.0, 0.0, 0.0}, 0.0, 1.0, cfg);
    CHECK(hb_traj.nfe < node_traj.nfe);
}

TEST_CASE("vanishing node adjoint vs non-vanishing heavy-ball adjoint (closed forms)") {
    // node with lambda=-5 over T=10: ||a(0)||/||a(T)|| = e^{-50}.
    const double lambda = -5.0, T = 10.0, gamma = 1.0;
    const double node_ratio = std::exp(lambda * T);
    CHECK(node_ratio == doctest::Approx(std::exp(-50.0)));

    // the heavy-ball adjoint has the same gamma (Prop 1); for the matched
    // linear field its companion eigenvalues have real part >= -gamma/2, so
    // no mode decays faster than e^{-gamma T / 2}
    nk::DenseMatrix a(1, 1);
    a(0, 0) = lambda;
    const auto eigs = hbrom::numkit::eig_general(hb_companion(a, gamma));
    for (const auto& e : eigs) CHECK(e.real() >= -gamma / 2 - 1e-9);
    const double hb_floor = std::exp(-gamma * T / 2);
    CHECK(node_ratio < hb_floor * 1e-10);
}

TEST_CASE("stiffness estimate of the heavy-ball companion field matches the quadratic roots") {
    // diag spectrum {-1,-100}, gamma=2: kappa drops from 100 to 10
    const std::vector<double> diag = {-1.0, -100.0};
    const auto b = hb_companion(nk::DenseMatrix::diagonal(diag), 2.0);
    const oi::RhsFn rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const auto v = nk::matvec(b, y);
        std::copy(v.begin(), v.end(), dy.begin());
    };
    const std::vector<double> y = {1.0, 1.0, 0.0, 0.0};
    const auto est = oi::stiffness_estimate(rhs, y, 0.0);
    CHECK(est.kappa == doctest::Approx(10.0).epsilon(1e-4));
}
