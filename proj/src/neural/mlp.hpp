// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "neural/params.hpp"
#include "numkit/dense.hpp"
#include "util/rng.hpp"

namespace hbrom::neural {

enum class Activation { tanh_fn, identity };

inline double activate(Activation a, double z) {
    return a == Activation::tanh_fn ? std::tanh(z) : z;
}
// derivative expressed through the activation output
inline double activate_deriv_from_output(Activation a, double out) {
    return a == Activation::tanh_fn ? 1.0 - out * out : 1.0;
}

// Feed-forward network: `layers` affine maps, tanh on hidden layers, linear
// output layer.
struct MlpParams {
    std::vector<numkit::DenseMatrix> weights; // layer l: out_l x in_l
    std::vector<std::vector<double>> biases;
    Activation hidden_activation = Activation::tanh_fn;
    std::uint64_t version = 0;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_width() const { return weights.front().cols(); }
    std::size_t output_width() const { return weights.back().rows(); }
    std::size_t param_count() const;
    std::vector<ParamBlock> param_blocks(const std::string& prefix, struct MlpGrads& grads);
};

struct MlpGrads {
    std::vector<numkit::DenseMatrix> weights;
    std::vector<std::vector<double>> biases;
    void match_shapes(const MlpParams& p);
    void zero();
};

// Weights and biases uniform in +-sqrt(1/fan_in).
MlpParams make_mlp(std::size_t input, std::size_t output, std::size_t layers, std::size_t hidden,
                   Rng& rng);

struct MlpTape {
    std::vector<std::vector<double>> layer_inputs; // input to each affine layer
    std::vector<double> output;
    std::uint64_t version = 0;
};

// y = f(x); when tape is provided the activations needed for the backward
// pass are retained.
std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x,
                                MlpTape* tape = nullptr);

// Exact reverse-mode products v^T dy/dx (returned) and v^T dy/dtheta
// (accumulated into grads). The tape must come from the same parameter
// version; reuse after mutation raises a tape-invalidation error.
std::vector<double> mlp_vjp(const MlpParams& p, const MlpTape& tape,
                            std::span<const double> cotangent, MlpGrads& grads);

// Same products accumulated into a flat span laid out as
// [W0 row-major, b0, W1, b1, ...]; used by the adjoint quadrature.
std::vector<double> mlp_vjp_flat(const MlpParams& p, const MlpTape& tape,
                                 std::span<const double> cotangent, std::span<double> flat);

} // namespace hbrom::neural
