// SPDX-License-Identifier: Apache-2.0
#include "numkit/eig.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

namespace hbrom::numkit {

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

void enforce_sign_convention(DenseMatrix& vectors, std::size_t col) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const double m = std::fabs(vectors(i, col));
        if (m > best) {
            best = m;
            arg = i;
        }
    }
    if (vectors(arg, col) < 0.0)
        for (std::size_t i = 0; i < vectors.rows(); ++i) vectors(i, col) = -vectors(i, col);
}

} // namespace

SymEigResult sym_eig(const DenseMatrix& s) {
    const std::size_t n = s.rows();
    if (n == 0 || s.cols() != n) fail(ErrorKind::shape, "sym_eig: matrix must be square and non-empty");
    const double scale = s.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(s(i, j) - s(j, i)) > 1e-10 * std::max(scale, 1e-300))
                fail(ErrorKind::shape, "sym_eig: matrix is not symmetric within 1e-10 relative");

    DenseMatrix a = s;
    DenseMatrix vt = DenseMatrix::identity(n); // row i holds eigenvector i (transposed storage)
    const double tol = 1e-12 * s.frobenius_norm();
    constexpr int max_sweeps = 100;

    bool converged = (off_diagonal_norm(a) <= tol);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= tol / (static_cast<double>(n) * static_cast<double>(n)))
                    continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                double* rp = a.row_ptr(p);
                double* rq = a.row_ptr(q);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = rp[i];
                    const double aiq = rq[i];
                    rp[i] = c * aip - sn * aiq;
                    rq[i] = sn * aip + c * aiq;
                    a(i, p) = rp[i];
                    a(i, q) = rq[i];
                }
                double* vp = vt.row_ptr(p);
                double* vq = vt.row_ptr(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = vp[i];
                    const double viq = vq[i];
                    vp[i] = c * vip - sn * viq;
                    vq[i] = sn * vip + c * viq;
                }
            }
        }
        converged = (off_diagonal_norm(a) <= tol);
    }
    if (!converged)
        fail(ErrorKind::convergence, "sym_eig: Jacobi iteration did not converge in 100 sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymEigResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        result.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, k) = vt(order[k], i);
        enforce_sign_convention(result.eigenvectors, k);
    }
    return result;
}

namespace {

// Elimination reduction to upper Hessenberg form with partial pivoting.
void to_hessenberg(DenseMatrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t pivot = m;
        for (std::size_t j = m; j < n; ++j) {
            if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
                x = a(j, m - 1);
                pivot = j;
            }
        }
        if (pivot != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
        }
        if (x != 0.0) {
            for (std::size_t i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                a(i, m - 1) = 0.0;
                for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
            }
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

inline double sign_with(double magnitude, double sign_of) {
    return sign_of >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
void hqr_eigenvalues(DenseMatrix& a, std::vector<double>& wr, std::vector<double>& wi) {
    const int n = static_cast<int>(a.rows());
    wr.assign(n, 0.0);
    wi.assign(n, 0.0);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
    if (anorm == 0.0) return; // zero matrix

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= DBL_EPSILON * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::fabs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_with(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn] = z;
                        wi[nn - 1] = -z;
                    }
                    nn -= 2;
                } else {
                    if (its == 60)
                        fail(ErrorKind::convergence, "eig_general: QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 30 || its == 40 || its == 50) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        double z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        const double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) +
                                                         std::fabs(z) + std::fabs(a(m + 1, m + 1)));
                        if (u <= DBL_EPSILON * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        double scale = 0.0;
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
                            if (scale != 0.0) {
                                p /= scale;
                                q /= scale;
                                r /= scale;
                            }
                        }
                        const double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * scale;
                        }
                        p += s;
                        const double hx = p / s;
                        const double hy = q / s;
                        const double hz = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pj = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                pj += r * a(k + 2, j);
                                a(k + 2, j) -= pj * hz;
                            }
                            a(k + 1, j) -= pj * hy;
                            a(k, j) -= pj * hx;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pi = hx * a(i, k) + hy * a(i, k + 1);
                            if (k != nn - 1) {
                                pi += hz * a(i, k + 2);
                                a(i, k + 2) -= pi * r;
                            }
                            a(i, k + 1) -= pi * q;
                            a(i, k) -= pi;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

} // namespace

std::vector<std::complex<double>> eig_general(const DenseMatrix& matrix) {
    const std::size_t n = matrix.rows();
    if (n == 0 || matrix.cols() != n)
        fail(ErrorKind::shape, "eig_general: matrix must be square and non-empty");
    if (!matrix.all_finite()) fail(ErrorKind::invalid_argument, "eig_general: non-finite entries");

    DenseMatrix a = matrix;
    to_hessenberg(a);
    std::vector<double> wr, wi;
    hqr_eigenvalues(a, wr, wi);

    std::vector<std::complex<double>> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = {wr[i], wi[i]};
    std::stable_sort(eigs.begin(), eigs.end(), [](const auto& x, const auto& y) {
        const double mx = std::abs(x), my = std::abs(y);
        if (mx != my) return mx > my;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return eigs;
}

} // namespace hbrom::numkit
