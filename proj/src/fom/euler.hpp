// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "fom/snapshot.hpp"

namespace hbrom::fom {

// heat capacity ratio (diatomic gas)
inline constexpr double kGasGamma = 1.4;

// Conserved variables of one cell.
struct ConservedState {
    double rho = 0.0;
    double rho_u = 0.0;
    double energy = 0.0;

    double velocity() const { return rho_u / rho; }
    double pressure() const {
        return (kGasGamma - 1.0) * (energy - 0.5 * rho_u * rho_u / rho);
    }
    double sound_speed() const { return std::sqrt(kGasGamma * pressure() / rho); }
    bool admissible() const {
        return std::isfinite(rho) && std::isfinite(rho_u) && std::isfinite(energy) && rho > 0.0 &&
               pressure() > 0.0;
    }
};

inline ConservedState conserved_from_primitive(double u, double rho, double p) {
    ConservedState s;
    s.rho = rho;
    s.rho_u = rho * u;
    s.energy = p / (kGasGamma - 1.0) + 0.5 * rho * u * u;
    return s;
}

struct EulerConfig {
    std::size_t n_cells = 1000;
    double x_min = -5.0, x_max = 5.0;
    double t_final = 1.8;
    std::size_t n_snapshots = 180;
    double cfl = 0.4;

    double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
    double x_center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    void validate() const;
};

// Parameterized shock-entropy initial data: for x < -4 the jump state
// (eta_u, eta_rho, 31/3); elsewhere (0, 1 + 0.2 sin(pi x), 1).
ConservedState euler_initial(const EulerParams& params, double x);

// Physical flux (rho u, rho u^2 + p, (E + p) u).
std::array<double, 3> euler_physical_flux(const ConservedState& s);

// Harten-Lax-van Leer flux with the two-wave speed estimates
// S_L = min(u_L - c_L, u_R - c_R), S_R = max(u_L + c_L, u_R + c_R).
std::array<double, 3> hll_flux(const ConservedState& left, const ConservedState& right);

using EulerInitialFn = std::function<ConservedState(double x)>;

// First-order finite-volume march with HLL fluxes and SSP-RK3; ghost cells
// held at the initial data. The optional override replaces the initial
// condition (the parameterized data by default).
SnapshotSet euler_simulate(const EulerParams& params, const EulerConfig& cfg = {},
                           const EulerInitialFn& initial_override = {});

} // namespace hbrom::fom
