// SPDX-License-Identifier: Apache-2.0
#include "rom/dmd.hpp"

#include <cmath>

#include "numkit/eig.hpp"
#include "numkit/svd.hpp"

namespace hbrom::rom {

namespace {

using Complex = std::complex<double>;

// Gaussian elimination with partial pivoting on a small complex system.
std::vector<Complex> solve_complex(std::vector<std::vector<Complex>> a, std::vector<Complex> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        if (std::abs(a[pivot][col]) < 1e-300)
            fail(ErrorKind::convergence, "dmd: singular system while extracting eigenpairs");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const Complex factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<Complex> x(n);
    for (std::size_t row = n; row-- > 0;) {
        Complex acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

// Eigenvector of the small real matrix for a known eigenvalue, by one step
// of shifted inverse iteration from a deterministic start.
std::vector<Complex> eigenvector_for(const numkit::DenseMatrix& m, Complex lambda,
                                     std::size_t index) {
    const std::size_t n = m.rows();
    const double scale = std::max(m.max_abs(), 1.0);
    const Complex shift = lambda + Complex(1e-10 * scale, 1e-10 * scale);

    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = Complex(1.0 + static_cast<double>((i + index) % 3),
                       0.5 * static_cast<double>((i + 2 * index) % 5));

    for (int iter = 0; iter < 3; ++iter) {
        std::vector<std::vector<Complex>> a(n, std::vector<Complex>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i][j] = Complex(m(i, j), 0.0) - (i == j ? shift : Complex{});
        v = solve_complex(std::move(a), std::move(v));
        double nrm = 0.0;
        for (const auto& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        for (auto& x : v) x /= nrm;
    }
    // deterministic phase: the largest-magnitude entry is real positive
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            arg = i;
        }
    const Complex phase = std::abs(v[arg]) / v[arg];
    for (auto& x : v) x *= phase;
    return v;
}

} // namespace

DmdModel dmd_fit(const fom::SnapshotSet& fluct, std::size_t rank, const LiftSpec& spec) {
    spec.validate();
    const std::size_t nt = fluct.num_times();
    if (nt < 3) fail(ErrorKind::invalid_argument, "dmd_fit: need at least three snapshots");

    const fom::SnapshotSet lifted = lift(fluct, spec);
    const std::size_t nl = lifted.num_dof();
    const std::size_t m = nt - 1; // training pairs
    if (rank < 1 || rank > std::min(nl, m))
        fail(ErrorKind::invalid_argument,
             "dmd_fit: rank must lie in [1, min(lifted dof, N_t - 1)]");

    // columns are time snapshots
    numkit::DenseMatrix u0(nl, m), u1(nl, m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < nl; ++j) {
            u0(j, k) = lifted.data(k, j);
            u1(j, k) = lifted.data(k + 1, j);
        }
    }

    const auto sv = numkit::svd(u0);
    if (sv.singular_values[rank - 1] < 1e-12 * sv.singular_values[0])
        fail(ErrorKind::invalid_argument,
             "dmd_fit: snapshot matrix is rank deficient at the requested order");

    DmdModel model;
    model.lift_spec = spec;
    model.rank = rank;
    model.identity_dof = fluct.num_dof();
    model.n_train = nt;
    model.mean.assign(nl, 0.0);

    model.projection = numkit::DenseMatrix(nl, rank);
    for (std::size_t j = 0; j < nl; ++j)
        for (std::size_t k = 0; k < rank; ++k) model.projection(j, k) = sv.u(j, k);

    // A~ = X~^T U1 V~ S~^-1
    const numkit::DenseMatrix xtu1 = numkit::matmul_at(model.projection, u1); // r x m
    numkit::DenseMatrix vs(m, rank);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < rank; ++k) vs(i, k) = sv.v(i, k) / sv.singular_values[k];
    model.reduced_op = numkit::matmul(xtu1, vs);

    model.eigenvalues = numkit::eig_general(model.reduced_op);

    // eigenvectors, conjugate-mirrored for negative-imaginary eigenvalues
    std::vector<std::vector<Complex>> vecs(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        const Complex lam = model.eigenvalues[i];
        bool mirrored = false;
        if (lam.imag() < 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                if (std::abs(model.eigenvalues[j] - std::conj(lam)) <=
                    1e-10 * (1.0 + std::abs(lam))) {
                    vecs[i].resize(rank);
                    for (std::size_t k = 0; k < rank; ++k) vecs[i][k] = std::conj(vecs[j][k]);
                    mirrored = true;
                    break;
                }
            }
        }
        if (!mirrored) vecs[i] = eigenvector_for(model.reduced_op, lam, i);
    }

    // full-space modes phi_i = X~ w_i
    model.modes_real = numkit::DenseMatrix(nl, rank);
    model.modes_imag = numkit::DenseMatrix(nl, rank);
    for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t j = 0; j < nl; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < rank; ++k)
                acc += Complex(model.projection(j, k), 0.0) * vecs[i][k];
            model.modes_real(j, i) = acc.real();
            model.modes_imag(j, i) = acc.imag();
        }
    }

    // amplitudes from the first training snapshot: W b = X~^T u'_0
    const auto z0 = numkit::matvec_t(model.projection, lifted.data.row(0));
    std::vector<std::vector<Complex>> w(rank, std::vector<Complex>(rank));
    std::vector<Complex> rhs(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        rhs[i] = Complex(z0[i], 0.0);
        for (std::size_t k = 0; k < rank; ++k) w[i][k] = vecs[k][i];
    }
    model.amplitudes = solve_complex(std::move(w), std::move(rhs));

    // reduced coordinates of the last training snapshot
    model.last_training = numkit::matvec_t(model.projection, lifted.data.row(nt - 1));

    // one-step residual over the training pairs
    model.fit_residual = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const auto zk = numkit::matvec_t(model.projection, lifted.data.row(k));
        const auto azk = numkit::matvec(model.reduced_op, zk);
        const auto full = numkit::matvec(model.projection, azk);
        double err = 0.0;
        for (std::size_t j = 0; j < nl; ++j) {
            const double d = lifted.data(k + 1, j) - full[j];
            err += d * d;
        }
        model.fit_residual = std::max(model.fit_residual, std::sqrt(err));
    }
    return model;
}

void dmd_attach_mean(DmdModel& model, std::span<const double> raw_mean) {
    if (raw_mean.size() != model.identity_dof)
        fail(ErrorKind::shape, "dmd_attach_mean: mean width mismatch");
    const std::size_t nd = model.identity_dof;
    model.mean.assign(nd * model.lift_spec.fns.size(), 0.0);
    for (std::size_t f = 0; f < model.lift_spec.fns.size(); ++f)
        for (std::size_t j = 0; j < nd; ++j)
            model.mean[f * nd + j] = apply_lift(model.lift_spec.fns[f], raw_mean[j]);
}

std::vector<double> dmd_predict(const DmdModel& model, long steps) {
    if (steps < 0) fail(ErrorKind::invalid_argument, "dmd_predict: steps must be non-negative");
    std::vector<double> z = model.last_training;
    for (long k = 0; k < steps; ++k) z = numkit::matvec(model.reduced_op, z);
    const auto full = numkit::matvec(model.projection, z);
    std::vector<double> out(model.identity_dof);
    for (std::size_t j = 0; j < model.identity_dof; ++j) out[j] = full[j] + model.mean[j];
    return out;
}

std::vector<std::complex<double>> dmd_mode_expansion(const DmdModel& model, long k) {
    const std::size_t nl = model.modes_real.rows();
    std::vector<Complex> out(nl, Complex{});
    for (std::size_t i = 0; i < model.rank; ++i) {
        const Complex weight = std::pow(model.eigenvalues[i], static_cast<double>(k)) *
                               model.amplitudes[i];
        for (std::size_t j = 0; j < nl; ++j)
            out[j] += weight * Complex(model.modes_real(j, i), model.modes_imag(j, i));
    }
    return out;
}

} // namespace hbrom::rom
