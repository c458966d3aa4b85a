// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "numkit/dense.hpp"

namespace hbrom::numkit {

struct SymEigResult {
    std::vector<double> eigenvalues; // non-increasing
    DenseMatrix eigenvectors;        // orthonormal columns, column i pairs with eigenvalues[i]
};

// Symmetric eigendecomposition by cyclic Jacobi rotations.
// Iteration cap 100 sweeps, off-diagonal tolerance 1e-12 * ||S||_F.
// Each eigenvector is scaled so its largest-magnitude entry is positive.
SymEigResult sym_eig(const DenseMatrix& s);

// Eigenvalues of a general real square matrix: Hessenberg reduction followed
// by Francis double-shift QR. Eigenvalues only; complex pairs come out
// conjugate. Order: descending by magnitude, ties by real part.
std::vector<std::complex<double>> eig_general(const DenseMatrix& a);

} // namespace hbrom::numkit
