// SPDX-License-Identifier: Apache-2.0
#include "rom/pod.hpp"

#include <cmath>

#include "numkit/eig.hpp"

namespace hbrom::rom {

std::pair<fom::SnapshotSet, std::vector<double>> center_snapshots(const fom::SnapshotSet& s) {
    if (s.num_times() < 2)
        fail(ErrorKind::invalid_argument, "center_snapshots: need at least two snapshots");
    const std::size_t nt = s.num_times();
    const std::size_t nd = s.num_dof();

    std::vector<double> mean(nd, 0.0);
    for (std::size_t i = 0; i < nt; ++i) {
        const double* row = s.data.row_ptr(i);
        for (std::size_t j = 0; j < nd; ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(nt);

    fom::SnapshotSet fluct = s;
    for (std::size_t i = 0; i < nt; ++i) {
        double* row = fluct.data.row_ptr(i);
        for (std::size_t j = 0; j < nd; ++j) row[j] -= mean[j];
    }
    return {std::move(fluct), std::move(mean)};
}

PodBasis pod_fit(const fom::SnapshotSet& fluct, std::size_t rank) {
    const std::size_t nt = fluct.num_times();
    const std::size_t nd = fluct.num_dof();
    if (rank < 1 || rank > std::min(nt, nd))
        fail(ErrorKind::invalid_argument, "pod_fit: rank must lie in [1, min(N_t, N_dof)]");

    const numkit::DenseMatrix k = numkit::matmul_bt(fluct.data, fluct.data);
    const auto eig = numkit::sym_eig(k);

    PodBasis basis;
    basis.rank = rank;
    basis.mean.assign(nd, 0.0);
    basis.eigenvalues.resize(nt);
    const double lam1 = std::max(eig.eigenvalues.front(), 0.0);
    for (std::size_t i = 0; i < nt; ++i) basis.eigenvalues[i] = std::max(eig.eigenvalues[i], 0.0);

    basis.effective_rank = 0;
    for (double lam : basis.eigenvalues)
        if (lam >= 1e-12 * lam1 && lam > 0.0) ++basis.effective_rank;
    basis.rank_deficient = rank > basis.effective_rank;

    basis.modes = numkit::DenseMatrix(nd, rank);
    for (std::size_t i = 0; i < rank; ++i) {
        const auto alpha = eig.eigenvectors.column(i);
        auto mode = numkit::matvec_t(fluct.data, alpha);
        const double nrm = numkit::norm2(mode);
        if (nrm > 0.0)
            for (double& v : mode) v /= nrm;
        basis.modes.set_column(i, mode);
    }
    basis.coeffs = numkit::matmul(fluct.data, basis.modes);
    return basis;
}

PodBasis pod_from_snapshots(const fom::SnapshotSet& raw, std::size_t rank) {
    auto [fluct, mean] = center_snapshots(raw);
    PodBasis basis = pod_fit(fluct, rank);
    basis.mean = std::move(mean);
    return basis;
}

double relative_info(std::span<const double> eigenvalues, std::size_t r) {
    if (eigenvalues.empty() || r < 1 || r > eigenvalues.size())
        fail(ErrorKind::invalid_argument, "relative_info: order out of range");
    double head = 0.0, total = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues[i] < 0.0)
            fail(ErrorKind::invalid_argument, "relative_info: eigenvalues must be non-negative");
        total += eigenvalues[i];
        if (i < r) head += eigenvalues[i];
    }
    if (total <= 0.0)
        fail(ErrorKind::invalid_argument, "relative_info: degenerate all-zero spectrum");
    return head / total;
}

numkit::DenseMatrix pod_reconstruct(const PodBasis& basis, const numkit::DenseMatrix& coeff_rows) {
    if (coeff_rows.cols() != basis.rank)
        fail(ErrorKind::shape, "pod_reconstruct: coefficient width does not match basis rank");
    numkit::DenseMatrix out = numkit::matmul_bt(coeff_rows, basis.modes);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* row = out.row_ptr(i);
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] += basis.mean[j];
    }
    return out;
}

} // namespace hbrom::rom
