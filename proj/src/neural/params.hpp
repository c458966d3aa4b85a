// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hbrom::neural {

// A named view over one trainable block and its gradient accumulator.
// `version` points at the owning container's mutation counter so tapes can
// detect stale reuse after an optimizer step.
struct ParamBlock {
    std::string name;
    double* value = nullptr;
    double* grad = nullptr;
    std::size_t size = 0;
    std::uint64_t* version = nullptr;
};

inline std::size_t total_size(const std::vector<ParamBlock>& blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size;
    return n;
}

inline void zero_grads(const std::vector<ParamBlock>& blocks) {
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < b.size; ++i) b.grad[i] = 0.0;
}

inline std::vector<double> flatten_values(const std::vector<ParamBlock>& blocks) {
    std::vector<double> out;
    out.reserve(total_size(blocks));
    for (const auto& b : blocks) out.insert(out.end(), b.value, b.value + b.size);
    return out;
}

inline std::vector<double> flatten_grads(const std::vector<ParamBlock>& blocks) {
    std::vector<double> out;
    out.reserve(total_size(blocks));
    for (const auto& b : blocks) out.insert(out.end(), b.grad, b.grad + b.size);
    return out;
}

inline void assign_values(const std::vector<ParamBlock>& blocks, std::span<const double> flat) {
    std::size_t at = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.size; ++i) b.value[i] = flat[at + i];
        at += b.size;
        if (b.version) ++*b.version;
    }
}

} // namespace hbrom::neural
