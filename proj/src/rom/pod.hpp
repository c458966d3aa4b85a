// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fom/snapshot.hpp"
#include "numkit/dense.hpp"

namespace hbrom::rom {

// Reduced basis from the method of snapshots: eigendecomposition of the
// N_t x N_t row covariance K = Y Y^T. Modes are column-orthonormal; the
// temporal coefficient matrix is scaled so that row j of the fluctuation
// data is coeffs.row(j) * modes^T.
struct PodBasis {
    std::vector<double> mean;        // per-dof temporal mean of the raw data
    std::vector<double> eigenvalues; // all N_t covariance eigenvalues, non-increasing
    numkit::DenseMatrix coeffs;      // N_t x r temporal coefficients
    numkit::DenseMatrix modes;       // N_dof x r spatial modes
    std::size_t rank = 0;
    std::size_t effective_rank = 0; // eigenvalues above 1e-12 * lambda_1
    bool rank_deficient = false;    // requested rank exceeds the effective rank
};

// Subtracts the per-column temporal mean; returns the fluctuating snapshots
// and the mean vector.
std::pair<fom::SnapshotSet, std::vector<double>> center_snapshots(const fom::SnapshotSet& s);

// POD of already-centered snapshots. The basis mean is left at zero; use
// pod_from_snapshots for the full pipeline.
PodBasis pod_fit(const fom::SnapshotSet& fluct, std::size_t rank);

// center_snapshots + pod_fit + mean attachment.
PodBasis pod_from_snapshots(const fom::SnapshotSet& raw, std::size_t rank);

// I(r) = sum_{i<=r} lambda_i / sum_i lambda_i.
double relative_info(std::span<const double> eigenvalues, std::size_t r);

// Rows of coefficients -> snapshots: row j = sum_i coeff(j,i) mode_i + mean.
numkit::DenseMatrix pod_reconstruct(const PodBasis& basis, const numkit::DenseMatrix& coeff_rows);

} // namespace hbrom::rom
