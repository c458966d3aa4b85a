// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "util/error.hpp"

namespace hbrom::odeint {

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct Dopri5Config {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0; // 0 -> automatic (Hairer-Wanner selection)
    double safety = 0.9;
    double min_scale = 0.2;
    double max_scale = 5.0;
    long max_steps = 200000; // attempted steps (accepted + rejected)
};

// Dense-output coefficients for one accepted step; the interpolant is the
// standard 4th-order continuous extension of DOPRI5.
struct DenseStep {
    double t_from = 0.0;
    double h = 0.0;
    std::vector<double> r1, r2, r3, r4, r5;
};

struct Trajectory {
    std::size_t dim = 0;
    double t_begin = 0.0;
    double t_end = 0.0;
    std::vector<double> times;                // accepted times, t_begin first
    std::vector<std::vector<double>> states;  // states at accepted times
    std::vector<DenseStep> steps;
    long nfe = 0;
    long accepted = 0;
    long rejected = 0;

    const std::vector<double>& final_state() const { return states.back(); }
};

// Integrates from t0 to t1 (either direction) with embedded 5(4) error
// control. Local error is measured in the mixed rms norm
// sqrt(mean((err/(atol + rtol*max(|y|,|y_new|)))^2)).
Trajectory dopri5_integrate(const RhsFn& rhs, std::span<const double> y0, double t0, double t1,
                            const Dopri5Config& cfg = {});

// Evaluates the stored interpolant. At accepted-step times the stored state
// is returned bit-exactly.
std::vector<double> dense_eval(const Trajectory& traj, double t);

} // namespace hbrom::odeint
