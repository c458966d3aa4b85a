// SPDX-License-Identifier: Apache-2.0
#include "dynamics/linearized.hpp"

#include <cmath>

#include "numkit/eig.hpp"

namespace hbrom::dynamics {

numkit::DenseMatrix hb_companion(const numkit::DenseMatrix& a, double gamma) {
    const std::size_t n = a.rows();
    if (a.cols() != n) fail(ErrorKind::shape, "hb_companion: matrix must be square");
    numkit::DenseMatrix b(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        b(i, n + i) = 1.0;
        b(n + i, n + i) = -gamma;
        for (std::size_t j = 0; j < n; ++j) b(n + i, j) = a(i, j);
    }
    return b;
}

double spectral_ratio(const numkit::DenseMatrix& m) {
    const auto eigs = numkit::eig_general(m);
    double max_mag = 0.0;
    for (const auto& e : eigs) max_mag = std::max(max_mag, std::abs(e));
    if (max_mag <= 0.0)
        fail(ErrorKind::invalid_argument, "spectral_ratio: all eigenvalues negligible");
    double min_mag = max_mag;
    for (const auto& e : eigs) {
        const double mag = std::abs(e);
        if (mag >= 1e-10 * max_mag) min_mag = std::min(min_mag, mag);
    }
    return max_mag / min_mag;
}

std::vector<std::complex<double>> pairing_check(const numkit::DenseMatrix& f_jacobian,
                                                double gamma, double xi,
                                                const numkit::DenseMatrix& sigma_jacobian,
                                                double t_minus_terminal) {
    const std::size_t n = f_jacobian.rows();
    if (f_jacobian.cols() != n || sigma_jacobian.rows() != n || sigma_jacobian.cols() != n)
        fail(ErrorKind::shape, "pairing_check: blocks must be square with matching widths");

    const double span = -t_minus_terminal; // (T - t)
    numkit::DenseMatrix neg_m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            neg_m(i, n + j) = span * sigma_jacobian(i, j);
            neg_m(n + i, j) = span * (f_jacobian(i, j) - (i == j ? xi : 0.0));
        }
        neg_m(n + i, n + i) = span * -gamma;
    }

    auto eigs = numkit::eig_general(neg_m);
    const double target = t_minus_terminal * gamma;

    std::vector<std::complex<double>> sums;
    std::vector<bool> used(eigs.size(), false);
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::size_t best = eigs.size();
        double best_dev = 0.0;
        for (std::size_t j = i + 1; j < eigs.size(); ++j) {
            if (used[j]) continue;
            const double dev = std::abs(eigs[i] + eigs[j] - std::complex<double>(target, 0.0));
            if (best == eigs.size() || dev < best_dev) {
                best = j;
                best_dev = dev;
            }
        }
        if (best == eigs.size())
            fail(ErrorKind::internal, "pairing_check: odd eigenvalue count");
        used[best] = true;
        sums.push_back(eigs[i] + eigs[best]);
    }
    return sums;
}

} // namespace hbrom::dynamics
