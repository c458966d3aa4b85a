// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "dynamics/model.hpp"
#include "odeint/dopri5.hpp"

namespace hbrom::dynamics {

struct AdjointTrace {
    std::vector<double> times; // checkpoint times, ascending over the forward span
    std::vector<double> norms; // ||a(t)|| at each checkpoint
    double terminal_norm = 0.0;
    double initial_norm = 0.0;
};

// Loss cotangent injected at a given time of the forward span. Width matches
// the full (batched) state; entries for unobserved components are zero.
struct CotangentPulse {
    double time = 0.0;
    std::vector<double> value;
};

struct AdjointOptions {
    odeint::Dopri5Config integ;        // backward solver settings
    std::size_t checkpoint_count = 50; // uniform ||a(t)|| sampling
};

struct AdjointResult {
    std::vector<double> param_gradient;  // flat, layout of OdeModel::flat_params
    std::vector<double> initial_adjoint; // dL/dy0 over the batch
    AdjointTrace trace;
    long backward_nfe = 0;
};

// Single backward sweep of the augmented adjoint system. h(t) along the sweep
// comes from the dense interpolant of the stored forward trajectory; the
// parameter gradient accumulates as extra quadrature state in the same solve.
AdjointResult adjoint_gradient(const OdeModel& model, const odeint::Trajectory& forward,
                               std::span<const double> terminal_cotangent,
                               const AdjointOptions& opts = {}, std::size_t batch = 1);

// Generalisation with loss contributions at interior times (sequence
// prediction): the sweep integrates between pulse times and adds each
// cotangent as a jump in a.
AdjointResult adjoint_gradient_multi(const OdeModel& model, const odeint::Trajectory& forward,
                                     std::vector<CotangentPulse> pulses,
                                     const AdjointOptions& opts = {}, std::size_t batch = 1);

// da/dt of the bare adjoint state at matched instantaneous inputs (no
// quadrature block); exposed for the linearized structure checks.
std::vector<double> adjoint_state_derivative(const OdeModel& model,
                                             std::span<const double> state,
                                             std::span<const double> adjoint, double t);

} // namespace hbrom::dynamics
