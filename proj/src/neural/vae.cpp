// SPDX-License-Identifier: Apache-2.0
#include "neural/vae.hpp"

#include <cmath>

namespace hbrom::neural {

void VaeHeadGrads::match_shapes(const VaeHead& h) {
    if (w_mean.rows() == h.w_mean.rows() && w_mean.cols() == h.w_mean.cols() &&
        b_mean.size() == h.b_mean.size())
        return;
    w_mean = numkit::DenseMatrix(h.w_mean.rows(), h.w_mean.cols());
    w_logvar = numkit::DenseMatrix(h.w_logvar.rows(), h.w_logvar.cols());
    b_mean.assign(h.b_mean.size(), 0.0);
    b_logvar.assign(h.b_logvar.size(), 0.0);
}

void VaeHeadGrads::zero() {
    std::fill(w_mean.data().begin(), w_mean.data().end(), 0.0);
    std::fill(w_logvar.data().begin(), w_logvar.data().end(), 0.0);
    std::fill(b_mean.begin(), b_mean.end(), 0.0);
    std::fill(b_logvar.begin(), b_logvar.end(), 0.0);
}

std::vector<ParamBlock> VaeHead::param_blocks(const std::string& prefix, VaeHeadGrads& grads) {
    if (grads.w_mean.rows() != w_mean.rows()) grads.match_shapes(*this);
    return {
        {prefix + ".w_mean", w_mean.data().data(), grads.w_mean.data().data(),
         w_mean.data().size(), &version},
        {prefix + ".b_mean", b_mean.data(), grads.b_mean.data(), b_mean.size(), &version},
        {prefix + ".w_logvar", w_logvar.data().data(), grads.w_logvar.data().data(),
         w_logvar.data().size(), &version},
        {prefix + ".b_logvar", b_logvar.data(), grads.b_logvar.data(), b_logvar.size(), &version},
    };
}

VaeHead make_vae_head(std::size_t encoding, std::size_t latent, Rng& rng) {
    VaeHead h;
    const double bound = std::sqrt(1.0 / static_cast<double>(encoding));
    h.w_mean = numkit::DenseMatrix(latent, encoding);
    h.w_logvar = numkit::DenseMatrix(latent, encoding);
    for (auto& v : h.w_mean.data()) v = rng.uniform(-bound, bound);
    for (auto& v : h.w_logvar.data()) v = rng.uniform(-bound, bound);
    h.b_mean.assign(latent, 0.0);
    h.b_logvar.assign(latent, 0.0);
    for (auto& v : h.b_mean) v = rng.uniform(-bound, bound);
    for (auto& v : h.b_logvar) v = rng.uniform(-bound, bound);
    return h;
}

VaeSample vae_sample(const VaeHead& head, std::span<const double> encoding,
                     std::span<const double> noise) {
    const std::size_t latent = head.latent_width();
    if (encoding.size() != head.encoding_width())
        fail(ErrorKind::shape, "vae_sample: encoding width mismatch");
    if (noise.size() != latent) fail(ErrorKind::shape, "vae_sample: noise width mismatch");

    VaeSample s;
    s.encoding.assign(encoding.begin(), encoding.end());
    s.noise.assign(noise.begin(), noise.end());
    s.mean = numkit::matvec(head.w_mean, encoding);
    s.logvar = numkit::matvec(head.w_logvar, encoding);
    s.clamped.assign(latent, false);
    s.latent.resize(latent);
    s.version = head.version;
    for (std::size_t i = 0; i < latent; ++i) {
        s.mean[i] += head.b_mean[i];
        s.logvar[i] += head.b_logvar[i];
        if (s.logvar[i] > 10.0) {
            s.logvar[i] = 10.0;
            s.clamped[i] = true;
        } else if (s.logvar[i] < -10.0) {
            s.logvar[i] = -10.0;
            s.clamped[i] = true;
        }
        s.latent[i] = s.mean[i] + std::exp(0.5 * s.logvar[i]) * noise[i];
        s.kl += 0.5 * (std::exp(s.logvar[i]) + s.mean[i] * s.mean[i] - 1.0 - s.logvar[i]);
    }
    return s;
}

std::vector<double> vae_vjp(const VaeHead& head, const VaeSample& sample,
                            std::span<const double> dlatent, double dkl, VaeHeadGrads& grads) {
    if (sample.version != head.version)
        fail(ErrorKind::invalid_argument, "vae_vjp: sample tape is stale");
    const std::size_t latent = head.latent_width();
    if (dlatent.size() != latent) fail(ErrorKind::shape, "vae_vjp: cotangent width mismatch");
    if (grads.w_mean.rows() != latent) grads.match_shapes(head);

    std::vector<double> dmean(latent), dlogvar(latent);
    for (std::size_t i = 0; i < latent; ++i) {
        dmean[i] = dlatent[i] + dkl * sample.mean[i];
        double dl = dlatent[i] * 0.5 * std::exp(0.5 * sample.logvar[i]) * sample.noise[i] +
                    dkl * 0.5 * (std::exp(sample.logvar[i]) - 1.0);
        if (sample.clamped[i]) dl = 0.0;
        dlogvar[i] = dl;
    }
    std::vector<double> denc(head.encoding_width(), 0.0);
    for (std::size_t i = 0; i < latent; ++i) {
        double* gm = grads.w_mean.row_ptr(i);
        double* gl = grads.w_logvar.row_ptr(i);
        const double* wm = head.w_mean.row_ptr(i);
        const double* wl = head.w_logvar.row_ptr(i);
        for (std::size_t j = 0; j < denc.size(); ++j) {
            gm[j] += dmean[i] * sample.encoding[j];
            gl[j] += dlogvar[i] * sample.encoding[j];
            denc[j] += wm[j] * dmean[i] + wl[j] * dlogvar[i];
        }
        grads.b_mean[i] += dmean[i];
        grads.b_logvar[i] += dlogvar[i];
    }
    return denc;
}

} // namespace hbrom::neural
