// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "neural/params.hpp"

namespace hbrom::neural {

struct AdamWConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// Decoupled-weight-decay Adam. Decay is applied multiplicatively to the
// parameters before the moment update; with weight_decay = 0 this is exactly
// Adam.
class AdamW {
  public:
    explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

    const AdamWConfig& config() const { return cfg_; }
    long step_count() const { return step_; }
    void set_lr(double lr) { cfg_.lr = lr; }

    // One update over all blocks; gradients are read from block.grad.
    // A non-finite gradient raises a divergence error naming the block.
    void step(const std::vector<ParamBlock>& blocks);

  private:
    struct Moments {
        std::vector<double> m, v;
    };
    AdamWConfig cfg_;
    std::map<std::string, Moments> moments_;
    long step_ = 0;
};

} // namespace hbrom::neural
