// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "numkit/dense.hpp"

namespace hbrom::dynamics {

// Heavy-ball companion of the linear field h' = A h:
//   [[0, I], [A, -gamma I]]
numkit::DenseMatrix hb_companion(const numkit::DenseMatrix& a, double gamma);

// Ratio of extreme eigenvalue magnitudes, excluding magnitudes below 1e-10
// of the largest. Throws a degenerate-spectrum error when everything is
// negligible.
double spectral_ratio(const numkit::DenseMatrix& m);

// Assembles -M for a constant integrand of the generalized heavy-ball
// adjoint kernel,
//   -M = (T - t) [[0, J_sigma], [J_f - xi I, -gamma I]],
// computes its eigenvalues and greedily pairs them so each pair sum is as
// close as possible to (t-T)*gamma. Returns the pair sums.
std::vector<std::complex<double>> pairing_check(const numkit::DenseMatrix& f_jacobian,
                                                double gamma, double xi,
                                                const numkit::DenseMatrix& sigma_jacobian,
                                                double t_minus_terminal);

} // namespace hbrom::dynamics
