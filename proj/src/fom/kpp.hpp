// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>

#include "fom/snapshot.hpp"

namespace hbrom::fom {

// Cartesian cell grid on the KPP domain [-2,2] x [-5/2, 3/2].
struct Grid2D {
    std::size_t nx = 50;
    std::size_t ny = 50;
    double x_min = -2.0, x_max = 2.0;
    double y_min = -2.5, y_max = 1.5;

    double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
    double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
    double x_center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double y_center(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * dy(); }
    void validate() const;
};

enum class Reconstruction { weno5, first_order };

struct KppConfig {
    Grid2D grid;
    double t_final = 10.0;
    std::size_t n_snapshots = 1250;
    double cfl = 0.4;
    Reconstruction reconstruction = Reconstruction::weno5;
    void validate() const;
};

// Non-convex flux (sin u, cos u).
inline std::array<double, 2> kpp_flux(double u) { return {std::sin(u), std::cos(u)}; }

// 14 pi / 4 inside the open unit disk, pi / 4 elsewhere.
inline double kpp_initial(double x, double y) {
    return (x * x + y * y < 1.0) ? 14.0 * M_PI / 4.0 : M_PI / 4.0;
}

// Left-biased WENO-JS reconstruction of the right-interface value of the
// stencil's center cell; stencil = (v_{i-2}, ..., v_{i+2}).
double weno5_reconstruct(std::span<const double, 5> stencil);

// Local Lax-Friedrichs flux for one scalar flux component.
template <typename FluxFn>
double llf_flux(double u_left, double u_right, double alpha_max, FluxFn&& flux) {
    return 0.5 * (flux(u_left) + flux(u_right)) - 0.5 * alpha_max * (u_right - u_left);
}

using KppInitialFn = std::function<double(double x, double y)>;

// Finite-volume march: dimension-by-dimension reconstruction, local
// Lax-Friedrichs fluxes with the global wave-speed bound alpha = 1, SSP-RK3
// in time, zero-gradient ghost cells. Snapshots are taken at n_snapshots
// uniform times on [0, t_final] by shortening steps to land exactly. The
// optional override replaces kpp_initial.
SnapshotSet kpp_simulate(const KppConfig& cfg, const KppInitialFn& initial_override = {});

} // namespace hbrom::fom
