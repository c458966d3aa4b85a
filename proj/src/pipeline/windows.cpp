// SPDX-License-Identifier: Apache-2.0
#include "pipeline/windows.hpp"

#include <cmath>

#include "util/error.hpp"

namespace hbrom::pipeline {

namespace {

numkit::DenseMatrix rows_of(const numkit::DenseMatrix& coeffs, std::size_t start,
                            std::size_t count) {
    numkit::DenseMatrix block(count, coeffs.cols());
    for (std::size_t i = 0; i < count; ++i)
        std::copy(coeffs.row_ptr(start + i), coeffs.row_ptr(start + i) + coeffs.cols(),
                  block.row_ptr(i));
    return block;
}

} // namespace

WindowDataset make_windows(const numkit::DenseMatrix& coeffs, std::size_t seq_in,
                           std::size_t seq_out, std::size_t stride, std::size_t split_point) {
    const std::size_t nt = coeffs.rows();
    if (seq_in == 0 || seq_out == 0 || stride == 0)
        fail(ErrorKind::invalid_argument, "make_windows: seq_in, seq_out and stride must be positive");
    if (nt < seq_in + seq_out)
        fail(ErrorKind::invalid_argument, "make_windows: not enough timesteps for one window");

    WindowDataset ds;
    ds.seq_in = seq_in;
    ds.seq_out = seq_out;
    ds.stride = stride;
    ds.rank = coeffs.cols();
    for (std::size_t start = 0; start + seq_in + seq_out <= nt; start += stride) {
        const std::size_t label_begin = start + seq_in;
        const std::size_t label_end = label_begin + seq_out; // exclusive
        const std::size_t w = ds.inputs.size();
        ds.inputs.push_back(rows_of(coeffs, start, seq_in));
        ds.labels.push_back(rows_of(coeffs, label_begin, seq_out));
        if (label_end <= split_point)
            ds.train_idx.push_back(w);
        else if (start >= split_point)
            ds.val_idx.push_back(w);
        // windows straddling the split belong to neither set
    }
    return ds;
}

WindowDataset make_ensemble_windows(const std::vector<numkit::DenseMatrix>& trajectories,
                                    std::size_t seq_in, std::size_t seq_out,
                                    const std::vector<std::size_t>& train_traj,
                                    const std::vector<std::size_t>& val_traj) {
    if (trajectories.empty())
        fail(ErrorKind::invalid_argument, "make_ensemble_windows: no trajectories");
    WindowDataset ds;
    ds.seq_in = seq_in;
    ds.seq_out = seq_out;
    ds.rank = trajectories.front().cols();
    for (const auto& traj : trajectories) {
        if (traj.rows() < seq_in + seq_out)
            fail(ErrorKind::invalid_argument,
                 "make_ensemble_windows: trajectory shorter than one window");
        if (traj.cols() != ds.rank)
            fail(ErrorKind::shape, "make_ensemble_windows: inconsistent coefficient width");
        ds.inputs.push_back(rows_of(traj, 0, seq_in));
        ds.labels.push_back(rows_of(traj, seq_in, seq_out));
    }
    for (std::size_t t : train_traj) {
        if (t >= trajectories.size())
            fail(ErrorKind::invalid_argument, "make_ensemble_windows: train index out of range");
        ds.train_idx.push_back(t);
    }
    for (std::size_t v : val_traj) {
        if (v >= trajectories.size())
            fail(ErrorKind::invalid_argument, "make_ensemble_windows: val index out of range");
        for (std::size_t t : train_traj)
            if (t == v)
                fail(ErrorKind::invalid_argument,
                     "make_ensemble_windows: trajectory in both train and validation sets");
        ds.val_idx.push_back(v);
    }
    return ds;
}

std::vector<double> mode_scales(const numkit::DenseMatrix& coeffs, std::size_t row_count) {
    const std::size_t rows = std::min(row_count, coeffs.rows());
    if (rows < 2) fail(ErrorKind::invalid_argument, "mode_scales: need at least two rows");
    std::vector<double> scales(coeffs.cols(), 0.0);
    for (std::size_t j = 0; j < coeffs.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < rows; ++i) mean += coeffs(i, j);
        mean /= static_cast<double>(rows);
        double var = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = coeffs(i, j) - mean;
            var += d * d;
        }
        scales[j] = std::max(std::sqrt(var / static_cast<double>(rows)), 1e-12);
    }
    return scales;
}

numkit::DenseMatrix scale_columns(const numkit::DenseMatrix& coeffs,
                                  const std::vector<double>& scales, bool invert) {
    if (scales.size() != coeffs.cols()) fail(ErrorKind::shape, "scale_columns: width mismatch");
    numkit::DenseMatrix out = coeffs;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            out(i, j) = invert ? out(i, j) * scales[j] : out(i, j) / scales[j];
    return out;
}

} // namespace hbrom::pipeline
