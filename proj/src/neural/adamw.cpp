// SPDX-License-Identifier: Apache-2.0
#include "neural/adamw.hpp"

#include <cmath>

#include "util/error.hpp"

namespace hbrom::neural {

void AdamW::step(const std::vector<ParamBlock>& blocks) {
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.size; ++i)
            if (!std::isfinite(b.grad[i]))
                fail(ErrorKind::divergence,
                     "adamw_step: non-finite gradient in parameter block '" + b.name + "'");

    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (const auto& b : blocks) {
        auto& mom = moments_[b.name];
        if (mom.m.size() != b.size) {
            mom.m.assign(b.size, 0.0);
            mom.v.assign(b.size, 0.0);
        }
        for (std::size_t i = 0; i < b.size; ++i) {
            b.value[i] *= 1.0 - cfg_.lr * cfg_.weight_decay;
            const double g = b.grad[i];
            mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * g;
            mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = mom.m[i] / bc1;
            const double vhat = mom.v[i] / bc2;
            b.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
        if (b.version) ++*b.version;
    }
}

} // namespace hbrom::neural
