// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "rom/lift.hpp"

namespace hbrom::rom {

// Lifted dynamic mode decomposition of fluctuating snapshots. The reduced
// one-step operator lives in the rank-r POD subspace of the first shifted
// snapshot matrix; predictions are computed in real arithmetic by powering
// the reduced operator, while eigenpairs and amplitudes back the modal
// representation sum_i phi_i lambda_i^k b_i.
struct DmdModel {
    LiftSpec lift_spec;
    std::vector<double> mean; // per-lifted-dof offset re-added by predictions
    std::size_t rank = 0;
    std::size_t identity_dof = 0; // width of the identity segment
    std::size_t n_train = 0;

    numkit::DenseMatrix reduced_op;  // r x r
    numkit::DenseMatrix projection;  // lifted_dof x r, column-orthonormal
    std::vector<std::complex<double>> eigenvalues;
    numkit::DenseMatrix modes_real;  // lifted_dof x r
    numkit::DenseMatrix modes_imag;
    std::vector<std::complex<double>> amplitudes;
    std::vector<double> last_training; // reduced coordinates of the final training snapshot
    double fit_residual = 0.0;         // max one-step residual over training pairs
};

DmdModel dmd_fit(const fom::SnapshotSet& fluct, std::size_t rank, const LiftSpec& spec);

// Installs the recentring offset: each lift applied elementwise to the raw
// per-dof mean.
void dmd_attach_mean(DmdModel& model, std::span<const double> raw_mean);

// Un-lifted identity segment of the prediction k steps past the training
// end, mean re-added; k = 0 reproduces the projected last training snapshot.
std::vector<double> dmd_predict(const DmdModel& model, long steps);

// Modal route sum_i phi_i lambda_i^k b_i over the lifted space (k counted
// from the first training snapshot); used to audit conjugate pairing.
std::vector<std::complex<double>> dmd_mode_expansion(const DmdModel& model, long k);

} // namespace hbrom::rom
