#include "envsynth/gan/adam.hpp"

#include <cmath>

namespace envsynth::gan {

AdamState make_adam_state(const MlpParams& params) {
  AdamState state;
  state.m = zeros_like(params);
  state.v = zeros_like(params);
  return state;
}

namespace {

template <typename T>
void update_tensor(T& param, const T& grad, T& m, T& v, double lr1, double beta1,
                   double beta2, double inv_bc1, double inv_bc2, double eps) {
  if (param.size() == 0) return;
  m = beta1 * m + (1.0 - beta1) * grad;
  v.array() = beta2 * v.array() + (1.0 - beta2) * grad.array().square();
  param.array() -=
      lr1 * (m.array() * inv_bc1) / ((v.array() * inv_bc2).sqrt() + eps);
}

}  // namespace

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamConfig& cfg) {
  ++state.t;
  const double inv_bc1 = 1.0 / (1.0 - std::pow(cfg.beta1, state.t));
  const double inv_bc2 = 1.0 / (1.0 - std::pow(cfg.beta2, state.t));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grads.layers[l];
    auto& m = state.m.layers[l];
    auto& v = state.v.layers[l];
    update_tensor(p.weight, g.weight, m.weight, v.weight, cfg.learning_rate, cfg.beta1,
                  cfg.beta2, inv_bc1, inv_bc2, cfg.epsilon);
    update_tensor(p.bias, g.bias, m.bias, v.bias, cfg.learning_rate, cfg.beta1,
                  cfg.beta2, inv_bc1, inv_bc2, cfg.epsilon);
    update_tensor(p.bn_scale, g.bn_scale, m.bn_scale, v.bn_scale, cfg.learning_rate,
                  cfg.beta1, cfg.beta2, inv_bc1, inv_bc2, cfg.epsilon);
    update_tensor(p.bn_shift, g.bn_shift, m.bn_shift, v.bn_shift, cfg.learning_rate,
                  cfg.beta1, cfg.beta2, inv_bc1, inv_bc2, cfg.epsilon);
  }
}

}  // namespace envsynth::gan
