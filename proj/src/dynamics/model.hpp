// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "neural/mlp.hpp"
#include "odeint/dopri5.hpp"
#include "util/rng.hpp"

namespace hbrom::dynamics {

enum class ModelKind { node, hbnode, ghbnode };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Continuous-depth latent model. The state is h (width d) for node and the
// stacked pair (h, m) (width 2d) for the heavy-ball variants:
//   node:    dh/dt = f(h)
//   hbnode:  dh/dt = m,         dm/dt = -gamma m + f(h)
//   ghbnode: dh/dt = sigma(m),  dm/dt = -gamma m + f(h) - xi h
// gamma = epsilon * sigmoid(omega), xi = softplus(chi).
struct OdeModel {
    ModelKind kind = ModelKind::node;
    neural::MlpParams net; // f: d -> d
    std::size_t latent_dim = 0;
    double omega = 0.0;
    double epsilon = 1.0;
    double chi = 0.0;
    neural::Activation sigma = neural::Activation::tanh_fn;
    std::uint64_t scalar_version = 0;

    std::size_t state_width() const {
        return kind == ModelKind::node ? latent_dim : 2 * latent_dim;
    }
    double gamma() const { return epsilon / (1.0 + std::exp(-omega)); }
    double xi() const { return std::log1p(std::exp(chi)); }
    bool has_omega() const { return kind != ModelKind::node; }
    bool has_chi() const { return kind == ModelKind::ghbnode; }

    // trainable parameters: network, then omega (hb/ghb), then chi (ghb)
    std::size_t param_count() const;
    std::vector<double> flat_params() const;
    void set_flat_params(std::span<const double> flat);
    std::vector<neural::ParamBlock> param_blocks(const std::string& prefix,
                                                 struct ModelGrads& grads);
};

struct ModelGrads {
    neural::MlpGrads net;
    double omega = 0.0;
    double chi = 0.0;
    void match_shapes(const OdeModel& m) { net.match_shapes(m.net); }
    void zero() {
        net.zero();
        omega = 0.0;
        chi = 0.0;
    }
};

OdeModel make_model(ModelKind kind, std::size_t latent_dim, std::size_t layers,
                    std::size_t hidden, Rng& rng, double epsilon = 1.0);

// Vector field for a single latent instance.
void model_rhs(const OdeModel& model, std::span<const double> state, double t,
               std::span<double> out);

// Plain reverse-mode products of the vector field: writes a^T d(rhs)/d(state)
// into grad_state and accumulates a^T d(rhs)/d(params) into the flat span
// (layout matching flat_params). The adjoint system negates both.
void model_rhs_vjp(const OdeModel& model, std::span<const double> state, double t,
                   std::span<const double> adjoint, std::span<double> grad_state,
                   std::span<double> param_accum);

// Row-wise application over a batch of stacked states.
odeint::RhsFn make_batched_rhs(const OdeModel& model, std::size_t batch);

// Forward solve of the batched latent ODE.
odeint::Trajectory integrate_model(const OdeModel& model, std::span<const double> y0, double t0,
                                   double t1, const odeint::Dopri5Config& cfg,
                                   std::size_t batch = 1);

// Adds a flat parameter gradient (layout of flat_params) into block grads.
void add_param_gradient(const OdeModel& model, std::span<const double> flat, ModelGrads& grads);

} // namespace hbrom::dynamics
