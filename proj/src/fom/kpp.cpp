// SPDX-License-Identifier: Apache-2.0
#include "fom/kpp.hpp"

#include <string>
#include <vector>

namespace hbrom::fom {

void Grid2D::validate() const {
    if (nx == 0 || ny == 0) fail(ErrorKind::invalid_argument, "Grid2D: cell counts must be positive");
    if (!(dx() > 0.0) || !(dy() > 0.0))
        fail(ErrorKind::invalid_argument, "Grid2D: cell widths must be positive");
}

void KppConfig::validate() const {
    grid.validate();
    if (!(t_final > 0.0)) fail(ErrorKind::invalid_argument, "KppConfig: t_final must be positive");
    if (n_snapshots < 2) fail(ErrorKind::invalid_argument, "KppConfig: need at least 2 snapshots");
    if (!(cfl > 0.0 && cfl < 1.0))
        fail(ErrorKind::invalid_argument, "KppConfig: cfl must lie in (0, 1)");
}

double weno5_reconstruct(std::span<const double, 5> v) {
    constexpr double eps = 1e-6;
    const double p0 = (2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0;
    const double p1 = (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0;
    const double p2 = (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0;

    const double b0 = 13.0 / 12.0 * (v[0] - 2.0 * v[1] + v[2]) * (v[0] - 2.0 * v[1] + v[2]) +
                      0.25 * (v[0] - 4.0 * v[1] + 3.0 * v[2]) * (v[0] - 4.0 * v[1] + 3.0 * v[2]);
    const double b1 = 13.0 / 12.0 * (v[1] - 2.0 * v[2] + v[3]) * (v[1] - 2.0 * v[2] + v[3]) +
                      0.25 * (v[1] - v[3]) * (v[1] - v[3]);
    const double b2 = 13.0 / 12.0 * (v[2] - 2.0 * v[3] + v[4]) * (v[2] - 2.0 * v[3] + v[4]) +
                      0.25 * (3.0 * v[2] - 4.0 * v[3] + v[4]) * (3.0 * v[2] - 4.0 * v[3] + v[4]);

    const double a0 = 0.1 / ((eps + b0) * (eps + b0));
    const double a1 = 0.6 / ((eps + b1) * (eps + b1));
    const double a2 = 0.3 / ((eps + b2) * (eps + b2));
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2);
}

namespace {

// working array with 3 ghost layers on every side
class PaddedField {
  public:
    PaddedField(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny), data_((nx + 6) * (ny + 6), 0.0) {}

    double& at(std::ptrdiff_t i, std::ptrdiff_t j) {
        return data_[static_cast<std::size_t>(j + 3) * (nx_ + 6) + static_cast<std::size_t>(i + 3)];
    }
    double at(std::ptrdiff_t i, std::ptrdiff_t j) const {
        return data_[static_cast<std::size_t>(j + 3) * (nx_ + 6) + static_cast<std::size_t>(i + 3)];
    }

    // zero-gradient extension into the ghost frame
    void fill_ghosts() {
        const auto nxs = static_cast<std::ptrdiff_t>(nx_);
        const auto nys = static_cast<std::ptrdiff_t>(ny_);
        for (std::ptrdiff_t j = 0; j < nys; ++j)
            for (std::ptrdiff_t g = 1; g <= 3; ++g) {
                at(-g, j) = at(0, j);
                at(nxs - 1 + g, j) = at(nxs - 1, j);
            }
        for (std::ptrdiff_t i = -3; i < nxs + 3; ++i)
            for (std::ptrdiff_t g = 1; g <= 3; ++g) {
                at(i, -g) = at(i, 0);
                at(i, nys - 1 + g) = at(i, nys - 1);
            }
    }

  private:
    std::size_t nx_, ny_;
    std::vector<double> data_;
};

struct KppWork {
    const KppConfig& cfg;
    PaddedField u;
    std::vector<double> rate; // nx*ny

    explicit KppWork(const KppConfig& c) : cfg(c), u(c.grid.nx, c.grid.ny), rate(c.grid.nx * c.grid.ny) {}

    double reconstruct_minus(const double* s) const {
        if (cfg.reconstruction == Reconstruction::first_order) return s[2];
        return weno5_reconstruct(std::span<const double, 5>(s, 5));
    }
    double reconstruct_plus(const double* s) const {
        // mirrored stencil about the neighbour cell
        if (cfg.reconstruction == Reconstruction::first_order) return s[3];
        const std::array<double, 5> rev = {s[5], s[4], s[3], s[2], s[1]};
        return weno5_reconstruct(std::span<const double, 5>(rev.data(), 5));
    }

    // semi-discrete rate of change from the current padded field
    void compute_rate() {
        const auto nx = static_cast<std::ptrdiff_t>(cfg.grid.nx);
        const auto ny = static_cast<std::ptrdiff_t>(cfg.grid.ny);
        const double inv_dx = 1.0 / cfg.grid.dx();
        const double inv_dy = 1.0 / cfg.grid.dy();
        constexpr double alpha = 1.0; // |d sin/du|, |d cos/du| <= 1

        u.fill_ghosts();
        std::fill(rate.begin(), rate.end(), 0.0);

        std::vector<double> line(static_cast<std::size_t>(std::max(nx, ny)) + 6);
        std::vector<double> flux(static_cast<std::size_t>(std::max(nx, ny)) + 1);

        for (std::ptrdiff_t j = 0; j < ny; ++j) {
            for (std::ptrdiff_t i = -3; i < nx + 3; ++i)
                line[static_cast<std::size_t>(i + 3)] = u.at(i, j);
            for (std::ptrdiff_t f = 0; f <= nx; ++f) {
                // interface f-1/2 between cells f-1 and f; stencil window
                const double* s = line.data() + f;
                const double um = reconstruct_minus(s);
                const double up = reconstruct_plus(s);
                flux[static_cast<std::size_t>(f)] =
                    llf_flux(um, up, alpha, [](double w) { return std::sin(w); });
            }
            for (std::ptrdiff_t i = 0; i < nx; ++i)
                rate[static_cast<std::size_t>(j * nx + i)] -=
                    inv_dx * (flux[static_cast<std::size_t>(i + 1)] - flux[static_cast<std::size_t>(i)]);
        }
        for (std::ptrdiff_t i = 0; i < nx; ++i) {
            for (std::ptrdiff_t j = -3; j < ny + 3; ++j)
                line[static_cast<std::size_t>(j + 3)] = u.at(i, j);
            for (std::ptrdiff_t f = 0; f <= ny; ++f) {
                const double* s = line.data() + f;
                const double um = reconstruct_minus(s);
                const double up = reconstruct_plus(s);
                flux[static_cast<std::size_t>(f)] =
                    llf_flux(um, up, alpha, [](double w) { return std::cos(w); });
            }
            for (std::ptrdiff_t j = 0; j < ny; ++j)
                rate[static_cast<std::size_t>(j * nx + i)] -=
                    inv_dy * (flux[static_cast<std::size_t>(j + 1)] - flux[static_cast<std::size_t>(j)]);
        }
    }
};

} // namespace

SnapshotSet kpp_simulate(const KppConfig& cfg, const KppInitialFn& initial_override) {
    cfg.validate();
    const std::size_t nx = cfg.grid.nx;
    const std::size_t ny = cfg.grid.ny;
    const std::size_t n_dof = nx * ny;

    const KppInitialFn init =
        initial_override ? initial_override : KppInitialFn([](double x, double y) { return kpp_initial(x, y); });
    std::vector<double> state(n_dof);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            state[j * nx + i] = init(cfg.grid.x_center(i), cfg.grid.y_center(j));

    const double dt_cfl = cfg.cfl * std::min(cfg.grid.dx(), cfg.grid.dy()); // wave speed bound 1
    if (!(dt_cfl > 0.0))
        fail(ErrorKind::invalid_argument, "kpp_simulate: CFL restriction gives a non-positive step");

    SnapshotSet out;
    out.source = SnapshotSource::kpp;
    out.fields = {{"u", n_dof}};
    out.times.resize(cfg.n_snapshots);
    out.data = numkit::DenseMatrix(cfg.n_snapshots, n_dof);
    for (std::size_t k = 0; k < cfg.n_snapshots; ++k)
        out.times[k] = cfg.t_final * static_cast<double>(k) / static_cast<double>(cfg.n_snapshots - 1);

    KppWork work(cfg);
    std::vector<double> stage1(n_dof), stage2(n_dof);

    auto load = [&](const std::vector<double>& src) {
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                work.u.at(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j)) =
                    src[j * nx + i];
    };
    auto check_finite = [&](const std::vector<double>& v, long step) {
        double max_abs = 0.0;
        bool bad = false;
        for (double x : v) {
            if (!std::isfinite(x)) bad = true;
            max_abs = std::max(max_abs, std::fabs(x));
        }
        if (bad || !std::isfinite(max_abs))
            fail(ErrorKind::instability, "kpp_simulate: non-finite state at step " +
                                             std::to_string(step) + ", max |u| = " +
                                             std::to_string(max_abs));
    };

    std::copy(state.begin(), state.end(), out.data.row_ptr(0));
    double t = 0.0;
    long step = 0;
    for (std::size_t k = 1; k < cfg.n_snapshots; ++k) {
        const double t_target = out.times[k];
        while (t < t_target) {
            const double dt = std::min(dt_cfl, t_target - t);

            load(state);
            work.compute_rate();
            for (std::size_t m = 0; m < n_dof; ++m) stage1[m] = state[m] + dt * work.rate[m];

            load(stage1);
            work.compute_rate();
            for (std::size_t m = 0; m < n_dof; ++m)
                stage2[m] = 0.75 * state[m] + 0.25 * (stage1[m] + dt * work.rate[m]);

            load(stage2);
            work.compute_rate();
            for (std::size_t m = 0; m < n_dof; ++m)
                state[m] = state[m] / 3.0 + 2.0 / 3.0 * (stage2[m] + dt * work.rate[m]);

            ++step;
            check_finite(state, step);
            t += dt;
            if (t_target - t < 1e-12 * cfg.t_final) t = t_target;
        }
        std::copy(state.begin(), state.end(), out.data.row_ptr(k));
    }
    out.validate();
    return out;
}

} // namespace hbrom::fom
