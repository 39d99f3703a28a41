#pragma once

#include "envsynth/gan/mlp.hpp"

namespace envsynth::gan {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators, one pair per parameter tensor.
struct AdamState {
  MlpParams m;
  MlpParams v;
  long long t = 0;
};

AdamState make_adam_state(const MlpParams& params);

// Bias-corrected Adam update applied in place.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace envsynth::gan
