// SPDX-License-Identifier: Apache-2.0
#include "dynamics/model.hpp"

#include <cmath>

namespace hbrom::dynamics {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::node: return "node";
        case ModelKind::hbnode: return "hbnode";
        case ModelKind::ghbnode: return "ghbnode";
    }
    return "node";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "node") return ModelKind::node;
    if (name == "hbnode") return ModelKind::hbnode;
    if (name == "ghbnode") return ModelKind::ghbnode;
    fail(ErrorKind::invalid_argument, "unknown model kind '" + name + "'");
}

std::size_t OdeModel::param_count() const {
    return net.param_count() + (has_omega() ? 1 : 0) + (has_chi() ? 1 : 0);
}

std::vector<double> OdeModel::flat_params() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        flat.insert(flat.end(), net.weights[l].data().begin(), net.weights[l].data().end());
        flat.insert(flat.end(), net.biases[l].begin(), net.biases[l].end());
    }
    if (has_omega()) flat.push_back(omega);
    if (has_chi()) flat.push_back(chi);
    return flat;
}

void OdeModel::set_flat_params(std::span<const double> flat) {
    if (flat.size() != param_count())
        fail(ErrorKind::shape, "OdeModel::set_flat_params: length mismatch");
    std::size_t at = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        auto& wd = net.weights[l].data();
        std::copy(flat.begin() + at, flat.begin() + at + wd.size(), wd.begin());
        at += wd.size();
        auto& bd = net.biases[l];
        std::copy(flat.begin() + at, flat.begin() + at + bd.size(), bd.begin());
        at += bd.size();
    }
    if (has_omega()) omega = flat[at++];
    if (has_chi()) chi = flat[at++];
    ++net.version;
    ++scalar_version;
}

std::vector<neural::ParamBlock> OdeModel::param_blocks(const std::string& prefix,
                                                       ModelGrads& grads) {
    grads.match_shapes(*this);
    auto blocks = net.param_blocks(prefix + ".net", grads.net);
    if (has_omega())
        blocks.push_back({prefix + ".omega", &omega, &grads.omega, 1, &scalar_version});
    if (has_chi()) blocks.push_back({prefix + ".chi", &chi, &grads.chi, 1, &scalar_version});
    return blocks;
}

OdeModel make_model(ModelKind kind, std::size_t latent_dim, std::size_t layers,
                    std::size_t hidden, Rng& rng, double epsilon) {
    OdeModel m;
    m.kind = kind;
    m.latent_dim = latent_dim;
    m.net = neural::make_mlp(latent_dim, latent_dim, layers, hidden, rng);
    m.epsilon = epsilon;
    return m;
}

void model_rhs(const OdeModel& model, std::span<const double> state, double t,
               std::span<double> out) {
    (void)t; // the learned field is autonomous
    const std::size_t d = model.latent_dim;
    if (state.size() != model.state_width() || out.size() != state.size())
        fail(ErrorKind::shape, "model_rhs: state width mismatch");

    if (model.kind == ModelKind::node) {
        const auto f = neural::mlp_forward(model.net, state);
        std::copy(f.begin(), f.end(), out.begin());
        return;
    }
    const auto h = state.subspan(0, d);
    const auto m = state.subspan(d, d);
    const auto f = neural::mlp_forward(model.net, h);
    const double gamma = model.gamma();
    if (model.kind == ModelKind::hbnode) {
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = m[i];
            out[d + i] = -gamma * m[i] + f[i];
        }
    } else {
        const double xi = model.xi();
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = neural::activate(model.sigma, m[i]);
            out[d + i] = -gamma * m[i] + f[i] - xi * h[i];
        }
    }
}

void model_rhs_vjp(const OdeModel& model, std::span<const double> state, double t,
                   std::span<const double> adjoint, std::span<double> grad_state,
                   std::span<double> param_accum) {
    (void)t;
    const std::size_t d = model.latent_dim;
    if (state.size() != model.state_width() || adjoint.size() != state.size() ||
        grad_state.size() != state.size())
        fail(ErrorKind::shape, "model_rhs_vjp: width mismatch");
    if (param_accum.size() != model.param_count())
        fail(ErrorKind::shape, "model_rhs_vjp: parameter span mismatch");

    neural::MlpTape tape;
    const std::size_t net_params = model.net.param_count();
    auto net_span = param_accum.subspan(0, net_params);

    if (model.kind == ModelKind::node) {
        (void)neural::mlp_forward(model.net, state, &tape);
        const auto gx = neural::mlp_vjp_flat(model.net, tape, adjoint, net_span);
        std::copy(gx.begin(), gx.end(), grad_state.begin());
        return;
    }

    const auto h = state.subspan(0, d);
    const auto m = state.subspan(d, d);
    const auto a_h = adjoint.subspan(0, d);
    const auto a_m = adjoint.subspan(d, d);
    (void)neural::mlp_forward(model.net, h, &tape);
    const auto gx = neural::mlp_vjp_flat(model.net, tape, a_m, net_span);

    const double gamma = model.gamma();
    const double sig = 1.0 / (1.0 + std::exp(-model.omega));
    const double dgamma_domega = model.epsilon * sig * (1.0 - sig);
    double am_dot_m = 0.0;
    for (std::size_t i = 0; i < d; ++i) am_dot_m += a_m[i] * m[i];
    std::size_t scalar_at = net_params;

    if (model.kind == ModelKind::hbnode) {
        for (std::size_t i = 0; i < d; ++i) {
            grad_state[i] = gx[i];
            grad_state[d + i] = a_h[i] - gamma * a_m[i];
        }
        param_accum[scalar_at] += -am_dot_m * dgamma_domega;
        return;
    }

    const double xi = model.xi();
    const double dxi_dchi = 1.0 / (1.0 + std::exp(-model.chi));
    double am_dot_h = 0.0;
    for (std::size_t i = 0; i < d; ++i) am_dot_h += a_m[i] * h[i];
    for (std::size_t i = 0; i < d; ++i) {
        const double sm = neural::activate(model.sigma, m[i]);
        const double sprime = neural::activate_deriv_from_output(model.sigma, sm);
        grad_state[i] = gx[i] - xi * a_m[i];
        grad_state[d + i] = a_h[i] * sprime - gamma * a_m[i];
    }
    param_accum[scalar_at] += -am_dot_m * dgamma_domega;
    param_accum[scalar_at + 1] += -am_dot_h * dxi_dchi;
}

odeint::RhsFn make_batched_rhs(const OdeModel& model, std::size_t batch) {
    const std::size_t width = model.state_width();
    return [&model, batch, width](double t, std::span<const double> y, std::span<double> dy) {
        for (std::size_t b = 0; b < batch; ++b)
            model_rhs(model, y.subspan(b * width, width), t, dy.subspan(b * width, width));
    };
}

odeint::Trajectory integrate_model(const OdeModel& model, std::span<const double> y0, double t0,
                                   double t1, const odeint::Dopri5Config& cfg,
                                   std::size_t batch) {
    if (y0.size() != batch * model.state_width())
        fail(ErrorKind::shape, "integrate_model: initial state width mismatch");
    return odeint::dopri5_integrate(make_batched_rhs(model, batch), y0, t0, t1, cfg);
}

void add_param_gradient(const OdeModel& model, std::span<const double> flat, ModelGrads& grads) {
    if (flat.size() != model.param_count())
        fail(ErrorKind::shape, "add_param_gradient: length mismatch");
    grads.match_shapes(model);
    std::size_t at = 0;
    for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
        auto& wd = grads.net.weights[l].data();
        for (std::size_t i = 0; i < wd.size(); ++i) wd[i] += flat[at + i];
        at += wd.size();
        auto& bd = grads.net.biases[l];
        for (std::size_t i = 0; i < bd.size(); ++i) bd[i] += flat[at + i];
        at += bd.size();
    }
    if (model.has_omega()) grads.omega += flat[at++];
    if (model.has_chi()) grads.chi += flat[at++];
}

} // namespace hbrom::dynamics
