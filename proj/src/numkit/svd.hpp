// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "numkit/dense.hpp"

namespace hbrom::numkit {

struct SvdResult {
    DenseMatrix u;                        // m x k, column-orthonormal, k = min(m,n)
    std::vector<double> singular_values;  // length k, non-negative, non-increasing
    DenseMatrix v;                        // n x k, column-orthonormal
};

// Thin SVD via one-sided Jacobi applied on the shorter dimension.
// M = U diag(S) V^T within 1e-8 relative Frobenius. Sign convention: the
// largest-magnitude entry of each left singular vector is positive (the
// paired right vector is flipped along with it).
SvdResult svd(const DenseMatrix& m);

} // namespace hbrom::numkit
