// SPDX-License-Identifier: Apache-2.0
#include "fom/euler.hpp"

#include <string>
#include <vector>

namespace hbrom::fom {

void EulerConfig::validate() const {
    if (n_cells < 3) fail(ErrorKind::invalid_argument, "EulerConfig: need at least 3 cells");
    if (!(dx() > 0.0)) fail(ErrorKind::invalid_argument, "EulerConfig: degenerate domain");
    if (!(t_final > 0.0)) fail(ErrorKind::invalid_argument, "EulerConfig: t_final must be positive");
    if (n_snapshots < 2) fail(ErrorKind::invalid_argument, "EulerConfig: need at least 2 snapshots");
    if (!(cfl > 0.0 && cfl < 1.0))
        fail(ErrorKind::invalid_argument, "EulerConfig: cfl must lie in (0, 1)");
}

ConservedState euler_initial(const EulerParams& params, double x) {
    if (x < -4.0) return conserved_from_primitive(params.eta_u, params.eta_rho, 31.0 / 3.0);
    return conserved_from_primitive(0.0, 1.0 + 0.2 * std::sin(M_PI * x), 1.0);
}

std::array<double, 3> euler_physical_flux(const ConservedState& s) {
    const double u = s.velocity();
    const double p = s.pressure();
    return {s.rho_u, s.rho_u * u + p, (s.energy + p) * u};
}

std::array<double, 3> hll_flux(const ConservedState& left, const ConservedState& right) {
    if (!left.admissible() || !right.admissible())
        fail(ErrorKind::instability, "hll_flux: inadmissible state (non-positive density or pressure)");
    const double ul = left.velocity(), ur = right.velocity();
    const double cl = left.sound_speed(), cr = right.sound_speed();
    const double sl = std::min(ul - cl, ur - cr);
    const double sr = std::max(ul + cl, ur + cr);

    if (sl >= 0.0) return euler_physical_flux(left);
    if (sr <= 0.0) return euler_physical_flux(right);

    const auto fl = euler_physical_flux(left);
    const auto fr = euler_physical_flux(right);
    const std::array<double, 3> du = {right.rho - left.rho, right.rho_u - left.rho_u,
                                      right.energy - left.energy};
    std::array<double, 3> f;
    for (std::size_t k = 0; k < 3; ++k)
        f[k] = (sr * fl[k] - sl * fr[k] + sl * sr * du[k]) / (sr - sl);
    return f;
}

SnapshotSet euler_simulate(const EulerParams& params, const EulerConfig& cfg,
                           const EulerInitialFn& initial_override) {
    params.validate();
    cfg.validate();
    const std::size_t n = cfg.n_cells;
    const double dx = cfg.dx();

    const EulerInitialFn init = initial_override
                                    ? initial_override
                                    : [&params](double x) { return euler_initial(params, x); };

    // cells plus one fixed ghost on each side
    std::vector<ConservedState> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = init(cfg.x_center(i));
    const ConservedState ghost_left = init(cfg.x_min - 0.5 * dx);
    const ConservedState ghost_right = init(cfg.x_max + 0.5 * dx);

    auto audit = [&](const std::vector<ConservedState>& states, long step) {
        for (const auto& s : states)
            if (!s.admissible())
                fail(ErrorKind::instability,
                     "euler_simulate: positivity loss or non-finite state at step " +
                         std::to_string(step));
    };
    audit(cells, 0);

    auto max_wave_speed = [&](const std::vector<ConservedState>& states) {
        double a = std::max(std::fabs(ghost_left.velocity()) + ghost_left.sound_speed(),
                            std::fabs(ghost_right.velocity()) + ghost_right.sound_speed());
        for (const auto& s : states) a = std::max(a, std::fabs(s.velocity()) + s.sound_speed());
        return a;
    };

    auto compute_rate = [&](const std::vector<ConservedState>& states,
                            std::vector<std::array<double, 3>>& rate) {
        std::array<double, 3> flux_prev = hll_flux(ghost_left, states[0]);
        for (std::size_t i = 0; i < n; ++i) {
            const ConservedState& right_nb = (i + 1 < n) ? states[i + 1] : ghost_right;
            const auto flux_next = hll_flux(states[i], right_nb);
            for (std::size_t k = 0; k < 3; ++k)
                rate[i][k] = -(flux_next[k] - flux_prev[k]) / dx;
            flux_prev = flux_next;
        }
    };

    SnapshotSet out;
    out.source = SnapshotSource::euler;
    out.params = params;
    out.fields = {{"rho", n}, {"rho_u", n}, {"E", n}};
    out.times.resize(cfg.n_snapshots);
    out.data = numkit::DenseMatrix(cfg.n_snapshots, 3 * n);
    for (std::size_t k = 0; k < cfg.n_snapshots; ++k)
        out.times[k] = cfg.t_final * static_cast<double>(k) / static_cast<double>(cfg.n_snapshots - 1);

    auto store = [&](std::size_t row, const std::vector<ConservedState>& states) {
        double* r = out.data.row_ptr(row);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = states[i].rho;
            r[n + i] = states[i].rho_u;
            r[2 * n + i] = states[i].energy;
        }
    };
    store(0, cells);

    std::vector<std::array<double, 3>> rate(n);
    std::vector<ConservedState> stage1(n), stage2(n);
    double t = 0.0;
    long step = 0;
    for (std::size_t k = 1; k < cfg.n_snapshots; ++k) {
        const double t_target = out.times[k];
        while (t < t_target) {
            const double dt = std::min(cfg.cfl * dx / max_wave_speed(cells), t_target - t);

            compute_rate(cells, rate);
            for (std::size_t i = 0; i < n; ++i)
                stage1[i] = {cells[i].rho + dt * rate[i][0], cells[i].rho_u + dt * rate[i][1],
                             cells[i].energy + dt * rate[i][2]};
            audit(stage1, step + 1);

            compute_rate(stage1, rate);
            for (std::size_t i = 0; i < n; ++i)
                stage2[i] = {0.75 * cells[i].rho + 0.25 * (stage1[i].rho + dt * rate[i][0]),
                             0.75 * cells[i].rho_u + 0.25 * (stage1[i].rho_u + dt * rate[i][1]),
                             0.75 * cells[i].energy + 0.25 * (stage1[i].energy + dt * rate[i][2])};
            audit(stage2, step + 1);

            compute_rate(stage2, rate);
            for (std::size_t i = 0; i < n; ++i)
                cells[i] = {cells[i].rho / 3.0 + 2.0 / 3.0 * (stage2[i].rho + dt * rate[i][0]),
                            cells[i].rho_u / 3.0 + 2.0 / 3.0 * (stage2[i].rho_u + dt * rate[i][1]),
                            cells[i].energy / 3.0 + 2.0 / 3.0 * (stage2[i].energy + dt * rate[i][2])};
            ++step;
            audit(cells, step);
            t += dt;
            if (t_target - t < 1e-12 * cfg.t_final) t = t_target;
        }
        store(k, cells);
    }
    out.validate();
    return out;
}

} // namespace hbrom::fom
