// SPDX-License-Identifier: Apache-2.0
#include "neural/mlp.hpp"

#include <cmath>

namespace hbrom::neural {

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].rows() * weights[l].cols() + biases[l].size();
    return n;
}

void MlpGrads::match_shapes(const MlpParams& p) {
    // idempotent: never reallocate storage that already matches, since
    // ParamBlock views alias it
    bool ok = weights.size() == p.weights.size() && biases.size() == p.biases.size();
    for (std::size_t l = 0; ok && l < p.weights.size(); ++l)
        ok = weights[l].rows() == p.weights[l].rows() &&
             weights[l].cols() == p.weights[l].cols() &&
             biases[l].size() == p.biases[l].size();
    if (ok) return;
    weights.clear();
    biases.clear();
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        weights.emplace_back(p.weights[l].rows(), p.weights[l].cols());
        biases.emplace_back(p.biases[l].size(), 0.0);
    }
}

void MlpGrads::zero() {
    for (auto& w : weights) std::fill(w.data().begin(), w.data().end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

std::vector<ParamBlock> MlpParams::param_blocks(const std::string& prefix, MlpGrads& grads) {
    if (grads.weights.size() != weights.size()) grads.match_shapes(*this);
    std::vector<ParamBlock> blocks;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::string tag = prefix + ".layer" + std::to_string(l);
        blocks.push_back({tag + ".weight", weights[l].data().data(), grads.weights[l].data().data(),
                          weights[l].data().size(), &version});
        blocks.push_back({tag + ".bias", biases[l].data(), grads.biases[l].data(),
                          biases[l].size(), &version});
    }
    return blocks;
}

MlpParams make_mlp(std::size_t input, std::size_t output, std::size_t layers, std::size_t hidden,
                   Rng& rng) {
    if (layers == 0) fail(ErrorKind::invalid_argument, "make_mlp: need at least one layer");
    MlpParams p;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = (l == 0) ? input : hidden;
        const std::size_t out = (l + 1 == layers) ? output : hidden;
        const double bound = std::sqrt(1.0 / static_cast<double>(in));
        numkit::DenseMatrix w(out, in);
        for (auto& v : w.data()) v = rng.uniform(-bound, bound);
        std::vector<double> b(out);
        for (auto& v : b) v = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x, MlpTape* tape) {
    if (x.size() != p.input_width())
        fail(ErrorKind::shape, "mlp_forward: input width mismatch");
    if (tape) {
        tape->layer_inputs.clear();
        tape->version = p.version;
    }
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        if (tape) tape->layer_inputs.push_back(cur);
        const auto& w = p.weights[l];
        std::vector<double> next(w.rows());
        for (std::size_t i = 0; i < w.rows(); ++i) {
            const double* wi = w.row_ptr(i);
            double s = p.biases[l][i];
            for (std::size_t j = 0; j < w.cols(); ++j) s += wi[j] * cur[j];
            next[i] = (l + 1 == p.weights.size()) ? s : activate(p.hidden_activation, s);
        }
        cur = std::move(next);
    }
    if (tape) tape->output = cur;
    return cur;
}

namespace {

template <typename AccumW, typename AccumB>
std::vector<double> vjp_impl(const MlpParams& p, const MlpTape& tape,
                             std::span<const double> cotangent, AccumW&& accum_w,
                             AccumB&& accum_b) {
    if (tape.version != p.version)
        fail(ErrorKind::invalid_argument,
             "mlp_vjp: tape is stale (parameters were mutated after the forward pass)");
    if (cotangent.size() != p.output_width())
        fail(ErrorKind::shape, "mlp_vjp: cotangent width mismatch");

    std::vector<double> delta(cotangent.begin(), cotangent.end());
    for (std::size_t li = p.weights.size(); li-- > 0;) {
        const auto& w = p.weights[li];
        const auto& layer_in = tape.layer_inputs[li];
        // activation backward (output layer is linear)
        if (li + 1 < p.weights.size()) {
            const auto& act_out = tape.layer_inputs[li + 1];
            for (std::size_t i = 0; i < delta.size(); ++i)
                delta[i] *= activate_deriv_from_output(p.hidden_activation, act_out[i]);
        }
        for (std::size_t i = 0; i < w.rows(); ++i) {
            accum_w(li, i, layer_in, delta[i]);
            accum_b(li, i, delta[i]);
        }
        std::vector<double> prev(w.cols(), 0.0);
        for (std::size_t i = 0; i < w.rows(); ++i) {
            const double* wi = w.row_ptr(i);
            const double di = delta[i];
            for (std::size_t j = 0; j < w.cols(); ++j) prev[j] += wi[j] * di;
        }
        delta = std::move(prev);
    }
    return delta;
}

} // namespace

std::vector<double> mlp_vjp(const MlpParams& p, const MlpTape& tape,
                            std::span<const double> cotangent, MlpGrads& grads) {
    if (grads.weights.size() != p.weights.size()) grads.match_shapes(p);
    return vjp_impl(
        p, tape, cotangent,
        [&](std::size_t l, std::size_t i, const std::vector<double>& in, double d) {
            double* gi = grads.weights[l].row_ptr(i);
            for (std::size_t j = 0; j < in.size(); ++j) gi[j] += d * in[j];
        },
        [&](std::size_t l, std::size_t i, double d) { grads.biases[l][i] += d; });
}

std::vector<double> mlp_vjp_flat(const MlpParams& p, const MlpTape& tape,
                                 std::span<const double> cotangent, std::span<double> flat) {
    if (flat.size() != p.param_count())
        fail(ErrorKind::shape, "mlp_vjp_flat: flat gradient span has wrong length");
    // per-layer offsets in the [W0,b0,W1,b1,...] layout
    std::vector<std::size_t> w_off(p.weights.size()), b_off(p.weights.size());
    std::size_t at = 0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        w_off[l] = at;
        at += p.weights[l].data().size();
        b_off[l] = at;
        at += p.biases[l].size();
    }
    return vjp_impl(
        p, tape, cotangent,
        [&](std::size_t l, std::size_t i, const std::vector<double>& in, double d) {
            double* gi = flat.data() + w_off[l] + i * in.size();
            for (std::size_t j = 0; j < in.size(); ++j) gi[j] += d * in[j];
        },
        [&](std::size_t l, std::size_t i, double d) { flat[b_off[l] + i] += d; });
}

} // namespace hbrom::neural
