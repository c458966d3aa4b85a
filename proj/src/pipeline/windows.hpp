// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "numkit/dense.hpp"

namespace hbrom::pipeline {

// Sliding windows over temporal coefficients. Window w pairs the input block
// inputs[w] (seq_in x r) with the label block labels[w] (seq_out x r); every
// label index strictly follows the window's last input index.
struct WindowDataset {
    std::vector<numkit::DenseMatrix> inputs;
    std::vector<numkit::DenseMatrix> labels;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    std::size_t seq_in = 0;
    std::size_t seq_out = 0;
    std::size_t stride = 1;
    std::size_t rank = 0;

    std::size_t window_count() const { return inputs.size(); }
};

// Time-interval split: a window trains when its labels end before
// split_point (0-based row index) and validates when its inputs start at or
// after split_point; straddling windows are dropped.
WindowDataset make_windows(const numkit::DenseMatrix& coeffs, std::size_t seq_in,
                           std::size_t seq_out, std::size_t stride, std::size_t split_point);

// Ensemble variant: one window per trajectory (inputs = the first seq_in
// rows, labels = the following seq_out rows); membership comes from the
// caller's trajectory split.
WindowDataset make_ensemble_windows(const std::vector<numkit::DenseMatrix>& trajectories,
                                    std::size_t seq_in, std::size_t seq_out,
                                    const std::vector<std::size_t>& train_traj,
                                    const std::vector<std::size_t>& val_traj);

// Per-mode standard deviation over the given rows (used to normalize
// coefficients before windowing); entries are floored at 1e-12.
std::vector<double> mode_scales(const numkit::DenseMatrix& coeffs, std::size_t row_count);

numkit::DenseMatrix scale_columns(const numkit::DenseMatrix& coeffs,
                                  const std::vector<double>& scales, bool invert);

} // namespace hbrom::pipeline
