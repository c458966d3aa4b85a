// SPDX-License-Identifier: Apache-2.0
#include "odeint/stiffness.hpp"

#include <cfloat>
#include <cmath>

#include "numkit/eig.hpp"

namespace hbrom::odeint {

numkit::DenseMatrix jacobian_fd(const RhsFn& rhs, std::span<const double> y, double t,
                                double eps) {
    const std::size_t n = y.size();
    if (n == 0) fail(ErrorKind::shape, "jacobian_fd: empty state");
    if (eps < 0.0) fail(ErrorKind::invalid_argument, "jacobian_fd: eps must be positive");
    const double base = eps == 0.0 ? std::sqrt(DBL_EPSILON) : eps;

    numkit::DenseMatrix jac(n, n);
    std::vector<double> yp(y.begin(), y.end());
    std::vector<double> ym(y.begin(), y.end());
    std::vector<double> fp(n), fm(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double hj = base * std::max(1.0, std::fabs(y[j]));
        yp[j] = y[j] + hj;
        ym[j] = y[j] - hj;
        rhs(t, yp, fp);
        rhs(t, ym, fm);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (fp[i] - fm[i]) / (2.0 * hj);
            if (!std::isfinite(v))
                fail(ErrorKind::instability, "jacobian_fd: non-finite difference quotient");
            jac(i, j) = v;
        }
        yp[j] = y[j];
        ym[j] = y[j];
    }
    return jac;
}

StiffnessEstimate stiffness_estimate(const RhsFn& rhs, std::span<const double> y, double t) {
    const numkit::DenseMatrix jac = jacobian_fd(rhs, y, t);
    const auto eigs = numkit::eig_general(jac);

    double max_mag = 0.0;
    for (const auto& e : eigs) max_mag = std::max(max_mag, std::abs(e));

    StiffnessEstimate est;
    if (max_mag <= 0.0) {
        est.degenerate = true;
        return est;
    }
    double min_mag = max_mag;
    for (const auto& e : eigs) {
        const double m = std::abs(e);
        if (m >= 1e-10 * max_mag) min_mag = std::min(min_mag, m);
    }
    est.lambda_max = max_mag;
    est.lambda_min = min_mag;
    est.kappa = max_mag / min_mag;
    return est;
}

} // namespace hbrom::odeint
