// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "fom/snapshot.hpp"

namespace hbrom::fom {

struct SyntheticVksConfig {
    std::size_t n_dof = 512;
    std::size_t n_t = 250;
    std::vector<double> frequencies = {0.05, 0.05 * M_SQRT2}; // cycles per unit step
    std::size_t transient_len = 100;                           // steps before steady oscillation
    void validate() const;
};

// Quasi-periodic stand-in for vortex-street snapshot data: a constant mean
// field plus one orthogonal traveling-wave pair per frequency. Amplitudes
// ramp monotonically during the transient and rotate at unit amplitude
// afterwards, so the centered data has rank exactly 2 * frequencies.size().
SnapshotSet synthetic_vks(const SyntheticVksConfig& cfg = {});

} // namespace hbrom::fom
