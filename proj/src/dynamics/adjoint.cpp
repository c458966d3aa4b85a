// SPDX-License-Identifier: Apache-2.0
#include "dynamics/adjoint.hpp"

#include <algorithm>
#include <cmath>

namespace hbrom::dynamics {

namespace {

double norm_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

std::vector<double> adjoint_state_derivative(const OdeModel& model,
                                             std::span<const double> state,
                                             std::span<const double> adjoint, double t) {
    std::vector<double> grad_state(state.size());
    std::vector<double> pscratch(model.param_count(), 0.0);
    model_rhs_vjp(model, state, t, adjoint, grad_state, pscratch);
    for (auto& g : grad_state) g = -g;
    return grad_state;
}

AdjointResult adjoint_gradient(const OdeModel& model, const odeint::Trajectory& forward,
                               std::span<const double> terminal_cotangent,
                               const AdjointOptions& opts, std::size_t batch) {
    std::vector<CotangentPulse> pulses(1);
    pulses[0].time = forward.t_end;
    pulses[0].value.assign(terminal_cotangent.begin(), terminal_cotangent.end());
    return adjoint_gradient_multi(model, forward, std::move(pulses), opts, batch);
}

AdjointResult adjoint_gradient_multi(const OdeModel& model, const odeint::Trajectory& forward,
                                     std::vector<CotangentPulse> pulses,
                                     const AdjointOptions& opts, std::size_t batch) {
    const std::size_t width = model.state_width();
    const std::size_t na = batch * width;
    const std::size_t np = model.param_count();
    if (forward.dim != na)
        fail(ErrorKind::invalid_argument,
             "adjoint_gradient: forward trajectory does not match model/batch width");
    if (pulses.empty()) fail(ErrorKind::invalid_argument, "adjoint_gradient: no cotangents");

    const double t_lo = std::min(forward.t_begin, forward.t_end);
    const double t_hi = std::max(forward.t_begin, forward.t_end);
    for (const auto& p : pulses) {
        if (p.value.size() != na)
            fail(ErrorKind::shape, "adjoint_gradient: cotangent width mismatch");
        if (p.time < t_lo - 1e-12 || p.time > t_hi + 1e-12)
            fail(ErrorKind::invalid_argument, "adjoint_gradient: cotangent outside span");
    }
    // backward sweep runs from t_end toward t_begin
    const double back_from = forward.t_end;
    const double back_to = forward.t_begin;
    const double dir = back_to > back_from ? 1.0 : -1.0; // direction of the sweep in t
    std::stable_sort(pulses.begin(), pulses.end(), [&](const auto& a, const auto& b) {
        return (a.time - b.time) * dir < 0.0; // first-applied first
    });

    // augmented backward system: d(a)/dt = -a^T d(rhs)/dy, d(q)/dt = -a^T d(rhs)/dtheta
    const auto aug_rhs = [&](double t, std::span<const double> aug, std::span<double> daug) {
        const std::vector<double> y = odeint::dense_eval(forward, t);
        std::vector<double> pdot(np, 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            model_rhs_vjp(model, std::span<const double>(y).subspan(b * width, width), t,
                          aug.subspan(b * width, width), daug.subspan(b * width, width), pdot);
        }
        for (std::size_t i = 0; i < na; ++i) daug[i] = -daug[i];
        for (std::size_t i = 0; i < np; ++i) daug[na + i] = -pdot[i];
    };

    std::vector<double> aug(na + np, 0.0);
    double t_cur = back_from;
    std::vector<odeint::Trajectory> segments;
    long backward_nfe = 0;

    std::size_t pi = 0;
    auto apply_pulses_at = [&](double t) {
        while (pi < pulses.size() && std::fabs(pulses[pi].time - t) <= 1e-12 * std::max(1.0, t_hi - t_lo)) {
            for (std::size_t i = 0; i < na; ++i) aug[i] += pulses[pi].value[i];
            ++pi;
        }
    };
    apply_pulses_at(t_cur);
    const double terminal_norm = norm_of(std::span<const double>(aug).subspan(0, na));

    while (true) {
        double t_next = back_to;
        if (pi < pulses.size()) t_next = pulses[pi].time;
        if (std::fabs(t_next - t_cur) > 1e-14 * std::max(1.0, t_hi - t_lo)) {
            odeint::Trajectory seg = odeint::dopri5_integrate(aug_rhs, aug, t_cur, t_next, opts.integ);
            backward_nfe += seg.nfe;
            aug = seg.final_state();
            segments.push_back(std::move(seg));
            t_cur = t_next;
        }
        if (pi < pulses.size())
            apply_pulses_at(t_cur);
        else
            break;
        if (t_cur == back_to && pi >= pulses.size()) break;
    }

    AdjointResult result;
    result.backward_nfe = backward_nfe;
    result.param_gradient.assign(aug.begin() + static_cast<std::ptrdiff_t>(na), aug.end());
    result.initial_adjoint.assign(aug.begin(), aug.begin() + static_cast<std::ptrdiff_t>(na));
    result.trace.terminal_norm = terminal_norm;
    result.trace.initial_norm = norm_of(std::span<const double>(aug).subspan(0, na));

    const std::size_t nchk = std::max<std::size_t>(2, opts.checkpoint_count);
    result.trace.times.resize(nchk);
    result.trace.norms.assign(nchk, 0.0);
    for (std::size_t k = 0; k < nchk; ++k) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(k) /
                                    static_cast<double>(nchk - 1);
        result.trace.times[k] = t;
        // prefer the segment closest to the end of the sweep containing t
        double norm = 0.0;
        bool found = false;
        for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
            const double lo = std::min(it->t_begin, it->t_end);
            const double hi = std::max(it->t_begin, it->t_end);
            if (t >= lo - 1e-12 && t <= hi + 1e-12) {
                const auto v = odeint::dense_eval(*it, t);
                norm = norm_of(std::span<const double>(v).subspan(0, na));
                found = true;
                break;
            }
        }
        if (!found && t == back_from) norm = terminal_norm;
        result.trace.norms[k] = norm;
    }
    return result;
}

} // namespace hbrom::dynamics
