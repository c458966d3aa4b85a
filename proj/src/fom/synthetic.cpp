// SPDX-License-Identifier: Apache-2.0
#include "fom/synthetic.hpp"

#include <cmath>

#include "numkit/dense.hpp"

namespace hbrom::fom {

void SyntheticVksConfig::validate() const {
    if (n_dof == 0 || n_t == 0) fail(ErrorKind::invalid_argument, "synthetic_vks: empty shape");
    if (frequencies.empty())
        fail(ErrorKind::invalid_argument, "synthetic_vks: need at least one frequency");
    if (n_t <= transient_len)
        fail(ErrorKind::invalid_argument, "synthetic_vks: n_t must exceed transient_len");
}

namespace {

// fixed sinusoidal profiles of increasing wavenumber, orthonormalized
std::vector<std::vector<double>> spatial_modes(std::size_t n_dof, std::size_t count) {
    std::vector<std::vector<double>> modes;
    std::size_t wave = 1;
    while (modes.size() < count) {
        for (int phase = 0; phase < 2 && modes.size() < count; ++phase) {
            std::vector<double> m(n_dof);
            for (std::size_t i = 0; i < n_dof; ++i) {
                const double x = 2.0 * M_PI * static_cast<double>(wave) *
                                 static_cast<double>(i) / static_cast<double>(n_dof);
                m[i] = phase == 0 ? std::sin(x) : std::cos(x);
            }
            // Gram-Schmidt against accepted modes
            for (const auto& prev : modes) {
                double d = numkit::dot(m, prev);
                for (std::size_t i = 0; i < n_dof; ++i) m[i] -= d * prev[i];
            }
            const double nrm = numkit::norm2(m);
            if (nrm > 1e-8) {
                for (auto& v : m) v /= nrm;
                modes.push_back(std::move(m));
            }
        }
        ++wave;
    }
    return modes;
}

} // namespace

SnapshotSet synthetic_vks(const SyntheticVksConfig& cfg) {
    cfg.validate();
    const std::size_t pairs = cfg.frequencies.size();
    const auto modes = spatial_modes(cfg.n_dof, 2 * pairs);

    SnapshotSet out;
    out.source = SnapshotSource::synthetic;
    out.fields = {{"u", cfg.n_dof}};
    out.times.resize(cfg.n_t);
    out.data = numkit::DenseMatrix(cfg.n_t, cfg.n_dof);

    for (std::size_t k = 0; k < cfg.n_t; ++k) {
        out.times[k] = static_cast<double>(k);
        double* row = out.data.row_ptr(k);
        const double tk = static_cast<double>(k);
        // constant mean field
        for (std::size_t i = 0; i < cfg.n_dof; ++i)
            row[i] = 1.0 + 0.25 * std::sin(2.0 * M_PI * static_cast<double>(i) /
                                           static_cast<double>(cfg.n_dof));

        const double ramp =
            cfg.transient_len == 0
                ? 1.0
                : std::min(1.0, tk / static_cast<double>(cfg.transient_len));
        const double steady_t = std::max(0.0, tk - static_cast<double>(cfg.transient_len));
        for (std::size_t p = 0; p < pairs; ++p) {
            const double amplitude = ramp / static_cast<double>(p + 1);
            const double phase = 2.0 * M_PI * cfg.frequencies[p] * steady_t;
            const double a = amplitude * std::cos(phase);
            const double b = amplitude * std::sin(phase);
            const auto& mc = modes[2 * p];
            const auto& ms = modes[2 * p + 1];
            for (std::size_t i = 0; i < cfg.n_dof; ++i) row[i] += a * mc[i] + b * ms[i];
        }
    }
    out.validate();
    return out;
}

} // namespace hbrom::fom
