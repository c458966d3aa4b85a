// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "numkit/dense.hpp"
#include "odeint/dopri5.hpp"

namespace hbrom::odeint {

// Central-difference Jacobian of rhs with respect to the state. eps = 0
// selects sqrt(machine epsilon) scaled per component.
numkit::DenseMatrix jacobian_fd(const RhsFn& rhs, std::span<const double> y, double t,
                                double eps = 0.0);

struct StiffnessEstimate {
    double kappa = 1.0;       // |lambda|_max / |lambda|_min over the retained spectrum
    double lambda_max = 0.0;  // extreme magnitudes
    double lambda_min = 0.0;
    bool degenerate = false;  // all eigenvalues negligible; kappa reported as 1
};

// Eigenvalue-magnitude ratio of the finite-difference Jacobian, excluding
// magnitudes below 1e-10 of the largest.
StiffnessEstimate stiffness_estimate(const RhsFn& rhs, std::span<const double> y, double t);

} // namespace hbrom::odeint
