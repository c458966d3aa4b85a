// SPDX-License-Identifier: Apache-2.0
#include "odeint/dopri5.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

namespace hbrom::odeint {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b - bhat (error weights)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

void check_finite(std::span<const double> v, double t) {
    for (double x : v)
        if (!std::isfinite(x))
            fail(ErrorKind::instability,
                 "dopri5: non-finite right-hand side at t=" + std::to_string(t));
}

double scaled_rms(std::span<const double> err, std::span<const double> y0,
                  std::span<const double> y1, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sk = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
        const double q = err[i] / sk;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

} // namespace

Trajectory dopri5_integrate(const RhsFn& rhs, std::span<const double> y0, double t0, double t1,
                            const Dopri5Config& cfg) {
    if (t0 == t1) fail(ErrorKind::invalid_argument, "dopri5: t0 and t1 must differ");
    if (cfg.rtol <= 0.0 || cfg.atol <= 0.0)
        fail(ErrorKind::invalid_argument, "dopri5: tolerances must be positive");
    if (cfg.max_steps <= 0) fail(ErrorKind::invalid_argument, "dopri5: step cap must be positive");
    for (double v : y0)
        if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "dopri5: non-finite initial state");

    const std::size_t n = y0.size();
    const double direction = t1 > t0 ? 1.0 : -1.0;

    Trajectory traj;
    traj.dim = n;
    traj.t_begin = t0;
    traj.t_end = t1;

    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), err(n);

    rhs(t0, y, k1);
    ++traj.nfe;
    check_finite(k1, t0);

    // initial step: Hairer-Wanner selection unless given
    double h;
    if (cfg.initial_step != 0.0) {
        h = std::fabs(cfg.initial_step) * direction;
    } else {
        double dn0 = 0.0, dn1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = cfg.atol + cfg.rtol * std::fabs(y[i]);
            dn0 += (y[i] / sk) * (y[i] / sk);
            dn1 += (k1[i] / sk) * (k1[i] / sk);
        }
        dn0 = std::sqrt(dn0 / static_cast<double>(n));
        dn1 = std::sqrt(dn1 / static_cast<double>(n));
        double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
        h0 = std::min(h0, std::fabs(t1 - t0));
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + direction * h0 * k1[i];
        rhs(t0 + direction * h0, ytmp, k2);
        ++traj.nfe;
        check_finite(k2, t0 + direction * h0);
        double dn2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sk = cfg.atol + cfg.rtol * std::fabs(y[i]);
            const double d = (k2[i] - k1[i]) / sk;
            dn2 += d * d;
        }
        dn2 = std::sqrt(dn2 / static_cast<double>(n)) / h0;
        double h1;
        if (std::max(dn1, dn2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(dn1, dn2), 0.2);
        h = direction * std::min({100.0 * h0, h1, std::fabs(t1 - t0)});
    }

    traj.times.push_back(t0);
    traj.states.push_back(y);

    double t = t0;
    long attempts = 0;
    bool done = false;
    while (!done) {
        if (attempts >= cfg.max_steps)
            fail(ErrorKind::budget, "dopri5: exceeded step budget of " +
                                        std::to_string(cfg.max_steps) + " attempts");
        const double hmin = 16.0 * DBL_EPSILON * std::max({std::fabs(t), std::fabs(t1), 1e-30});
        if (std::fabs(h) <= hmin)
            fail(ErrorKind::convergence,
                 "dopri5: step size underflow at t=" + std::to_string(t) +
                     " (problem too stiff for the requested accuracy)");
        if ((t + h - t1) * direction > 0.0) h = t1 - t;
        // when the remainder after this step would be negligible, finish now
        if (std::fabs(t + h - t1) <= hmin) h = t1 - t;
        ++attempts;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] =
                y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, ynew, k7);
        traj.nfe += 6;
        check_finite(k7, t + h);
        for (double v : ynew)
            if (!std::isfinite(v))
                fail(ErrorKind::instability,
                     "dopri5: non-finite state at t=" + std::to_string(t + h));

        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        const double err_norm = scaled_rms(err, y, ynew, cfg.atol, cfg.rtol);
        if (!std::isfinite(err_norm))
            fail(ErrorKind::instability,
                 "dopri5: non-finite error estimate at t=" + std::to_string(t));

        if (err_norm <= 1.0) {
            DenseStep ds;
            ds.t_from = t;
            ds.h = h;
            ds.r1.assign(y.begin(), y.end());
            ds.r2.resize(n);
            ds.r3.resize(n);
            ds.r4.resize(n);
            ds.r5.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.r2[i] = ydiff;
                ds.r3[i] = bspl;
                ds.r4[i] = ydiff - h * k7[i] - bspl;
                ds.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                d7 * k7[i]);
            }
            traj.steps.push_back(std::move(ds));

            t += h;
            y = ynew;
            std::swap(k1, k7); // FSAL
            traj.times.push_back(t);
            traj.states.push_back(y);
            ++traj.accepted;

            if (t == t1) {
                done = true;
            } else {
                const double scale =
                    err_norm == 0.0
                        ? cfg.max_scale
                        : std::clamp(cfg.safety * std::pow(err_norm, -0.2), cfg.min_scale,
                                     cfg.max_scale);
                h *= scale;
            }
        } else {
            ++traj.rejected;
            const double scale =
                std::clamp(cfg.safety * std::pow(err_norm, -0.2), cfg.min_scale, 1.0);
            h *= scale;
        }
    }
    return traj;
}

std::vector<double> dense_eval(const Trajectory& traj, double t) {
    if (traj.steps.empty()) {
        if (t == traj.t_begin) return traj.states.front();
        fail(ErrorKind::invalid_argument, "dense_eval: empty trajectory");
    }
    const double lo = std::min(traj.t_begin, traj.t_end);
    const double hi = std::max(traj.t_begin, traj.t_end);
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack)
        fail(ErrorKind::invalid_argument, "dense_eval: t outside trajectory span");
    t = std::clamp(t, lo, hi);

    // exact accepted times return the stored states
    const double direction = traj.t_end > traj.t_begin ? 1.0 : -1.0;
    std::size_t lo_idx = 0, hi_idx = traj.times.size();
    while (lo_idx + 1 < hi_idx) {
        const std::size_t mid = (lo_idx + hi_idx) / 2;
        if ((traj.times[mid] - t) * direction <= 0.0)
            lo_idx = mid;
        else
            hi_idx = mid;
    }
    if (traj.times[lo_idx] == t) return traj.states[lo_idx];
    if (lo_idx + 1 < traj.times.size() && traj.times[lo_idx + 1] == t)
        return traj.states[lo_idx + 1];

    const std::size_t step_idx = std::min(lo_idx, traj.steps.size() - 1);
    const DenseStep& ds = traj.steps[step_idx];
    const double s = (t - ds.t_from) / ds.h;
    const double s1 = 1.0 - s;
    std::vector<double> out(traj.dim);
    for (std::size_t i = 0; i < traj.dim; ++i)
        out[i] = ds.r1[i] + s * (ds.r2[i] + s1 * (ds.r3[i] + s * (ds.r4[i] + s1 * ds.r5[i])));
    return out;
}

} // namespace hbrom::odeint
