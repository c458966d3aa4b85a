// SPDX-License-Identifier: Apache-2.0
#include "numkit/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hbrom::numkit {

namespace {

// One-sided Jacobi on a tall matrix held column-wise: work[j] is column j.
// Rotations orthogonalize column pairs; rot accumulates the same rotations
// applied to the identity, so work = A * rot on exit.
struct OneSidedResult {
    std::vector<std::vector<double>> work; // n columns of length m
    DenseMatrix rot;                       // n x n orthogonal
};

OneSidedResult one_sided_jacobi(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    OneSidedResult r;
    r.work.assign(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) r.work[j][i] = a(i, j);
    r.rot = DenseMatrix::identity(n);

    constexpr int max_sweeps = 100;
    constexpr double tol = 1e-14;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto& cp = r.work[p];
                auto& cq = r.work[q];
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += cp[i] * cp[i];
                    aqq += cq[i] * cq[i];
                    apq += cp[i] * cq[i];
                }
                if (app == 0.0 || aqq == 0.0) continue;
                if (std::fabs(apq) <= tol * std::sqrt(app * aqq)) continue;
                converged = false;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = cp[i];
                    const double xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = r.rot(i, p);
                    const double vq = r.rot(i, q);
                    r.rot(i, p) = c * vp - s * vq;
                    r.rot(i, q) = s * vp + c * vq;
                }
            }
        }
    }
    if (!converged)
        fail(ErrorKind::convergence, "svd: one-sided Jacobi did not converge in 100 sweeps");
    return r;
}

// Deterministic orthonormal completion for columns whose singular value
// vanished: try unit vectors in index order, Gram-Schmidt against what is
// already there.
void complete_zero_columns(DenseMatrix& u, const std::vector<bool>& filled) {
    const std::size_t m = u.rows();
    const std::size_t k = u.cols();
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (filled[j]) continue;
        while (true) {
            if (candidate >= m)
                fail(ErrorKind::internal, "svd: failed to complete orthonormal basis");
            std::vector<double> e(m, 0.0);
            e[candidate++] = 1.0;
            for (std::size_t jj = 0; jj < k; ++jj) {
                if (jj == j) continue;
                if (!filled[jj] && jj > j) continue;
                double d = 0.0;
                for (std::size_t i = 0; i < m; ++i) d += e[i] * u(i, jj);
                for (std::size_t i = 0; i < m; ++i) e[i] -= d * u(i, jj);
            }
            const double nrm = norm2(e);
            if (nrm > 0.5) { // e_k far from span of existing columns
                for (std::size_t i = 0; i < m; ++i) u(i, j) = e[i] / nrm;
                break;
            }
        }
    }
}

SvdResult svd_tall(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    OneSidedResult os = one_sided_jacobi(a);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(os.work[j]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult r;
    r.singular_values.resize(n);
    r.u = DenseMatrix(m, n);
    r.v = DenseMatrix(n, n);
    const double smax = sigma.empty() ? 0.0 : sigma[order[0]];
    const double drop = smax * 1e-300 + 1e-300; // only true zeros need completion
    std::vector<bool> filled(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        r.singular_values[k] = sigma[j];
        for (std::size_t i = 0; i < n; ++i) r.v(i, k) = os.rot(i, j);
        if (sigma[j] > drop) {
            for (std::size_t i = 0; i < m; ++i) r.u(i, k) = os.work[j][i] / sigma[j];
            filled[k] = true;
        }
    }
    complete_zero_columns(r.u, filled);

    // sign convention on u, carried jointly to v
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double mag = std::fabs(r.u(i, k));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (r.u(arg, k) < 0.0) {
            for (std::size_t i = 0; i < m; ++i) r.u(i, k) = -r.u(i, k);
            for (std::size_t i = 0; i < n; ++i) r.v(i, k) = -r.v(i, k);
        }
    }
    return r;
}

} // namespace

SvdResult svd(const DenseMatrix& matrix) {
    if (matrix.empty()) fail(ErrorKind::shape, "svd: empty matrix");
    if (!matrix.all_finite()) fail(ErrorKind::invalid_argument, "svd: non-finite entries");
    if (matrix.rows() >= matrix.cols()) return svd_tall(matrix);
    SvdResult tr = svd_tall(matrix.transposed());
    SvdResult r;
    r.u = std::move(tr.v);
    r.v = std::move(tr.u);
    r.singular_values = std::move(tr.singular_values);
    // convention is tied to u; re-apply after the swap
    for (std::size_t k = 0; k < r.u.cols(); ++k) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < r.u.rows(); ++i) {
            const double mag = std::fabs(r.u(i, k));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (r.u(arg, k) < 0.0) {
            for (std::size_t i = 0; i < r.u.rows(); ++i) r.u(i, k) = -r.u(i, k);
            for (std::size_t i = 0; i < r.v.rows(); ++i) r.v(i, k) = -r.v(i, k);
        }
    }
    return r;
}

} // namespace hbrom::numkit
