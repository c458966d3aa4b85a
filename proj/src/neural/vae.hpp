// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "neural/params.hpp"
#include "numkit/dense.hpp"
#include "util/rng.hpp"

namespace hbrom::neural {

// Linear maps from an encoding to the mean and log-variance of a diagonal
// Gaussian posterior. Log-variance outputs are clamped to [-10, 10].
struct VaeHead {
    numkit::DenseMatrix w_mean, w_logvar; // latent x encoding
    std::vector<double> b_mean, b_logvar;
    std::uint64_t version = 0;

    std::size_t encoding_width() const { return w_mean.cols(); }
    std::size_t latent_width() const { return w_mean.rows(); }
    std::vector<ParamBlock> param_blocks(const std::string& prefix, struct VaeHeadGrads& grads);
};

struct VaeHeadGrads {
    numkit::DenseMatrix w_mean, w_logvar;
    std::vector<double> b_mean, b_logvar;
    void match_shapes(const VaeHead& h);
    void zero();
};

VaeHead make_vae_head(std::size_t encoding, std::size_t latent, Rng& rng);

struct VaeSample {
    std::vector<double> latent;
    double kl = 0.0;
    // tape
    std::vector<double> encoding, mean, logvar, noise;
    std::vector<bool> clamped;
    std::uint64_t version = 0;
};

// latent = mean + exp(logvar/2) . noise,
// kl = 1/2 sum(exp(logvar) + mean^2 - 1 - logvar).
// Noise is injected explicitly; a zero noise vector gives the deterministic
// mean path used for validation.
VaeSample vae_sample(const VaeHead& head, std::span<const double> encoding,
                     std::span<const double> noise);

// Backward of (latent, kl) -> gradient on the encoding; parameter products
// accumulate into grads. dkl scales the KL contribution.
std::vector<double> vae_vjp(const VaeHead& head, const VaeSample& sample,
                            std::span<const double> dlatent, double dkl, VaeHeadGrads& grads);

} // namespace hbrom::neural
