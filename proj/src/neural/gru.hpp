// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "neural/params.hpp"
#include "numkit/dense.hpp"
#include "util/rng.hpp"

namespace hbrom::neural {

// Gated recurrent unit cell:
//   z = sigmoid(Wz x + biz + Uz h + bhz)
//   r = sigmoid(Wr x + bir + Ur h + bhr)
//   n = tanh(Wn x + bin + r . (Un h + bhn))
//   h' = (1 - z) . n + z . h
struct GruParams {
    numkit::DenseMatrix wz, wr, wn; // hidden x input
    numkit::DenseMatrix uz, ur, un; // hidden x hidden
    std::vector<double> biz, bir, bin_;
    std::vector<double> bhz, bhr, bhn;
    std::uint64_t version = 0;

    std::size_t input_width() const { return wz.cols(); }
    std::size_t hidden_width() const { return wz.rows(); }
    std::vector<ParamBlock> param_blocks(const std::string& prefix, struct GruGrads& grads);
};

struct GruGrads {
    numkit::DenseMatrix wz, wr, wn, uz, ur, un;
    std::vector<double> biz, bir, bin_, bhz, bhr, bhn;
    void match_shapes(const GruParams& p);
    void zero();
};

GruParams make_gru(std::size_t input, std::size_t hidden, Rng& rng);

struct GruTape {
    std::vector<double> x, h_prev;
    std::vector<double> z, r, n, hk; // hk = Un h + bhn
    std::uint64_t version = 0;
};

std::vector<double> gru_step(const GruParams& p, std::span<const double> h_prev,
                             std::span<const double> x, GruTape* tape = nullptr);

// Reverse-mode step: writes v^T dh'/dh_prev and v^T dh'/dx, accumulates
// parameter products into grads.
void gru_vjp(const GruParams& p, const GruTape& tape, std::span<const double> dh_next,
             std::vector<double>& dh_prev, std::vector<double>& dx, GruGrads& grads);

} // namespace hbrom::neural
