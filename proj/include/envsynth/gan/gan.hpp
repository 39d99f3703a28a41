#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>

#include "envsynth/core/rng.hpp"
#include "envsynth/core/types.hpp"
#include "envsynth/gan/mlp.hpp"

namespace envsynth::gan {

enum class GanLossMode {
  non_saturating,  // generator minimizes -mean(log D(G(z)))
  saturating,      // generator minimizes  mean(log(1 - D(G(z))))
};

struct GanTrainConfig {
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  int d_steps_per_g_step = 1;
  int latent_dim = 100;
  GanLossMode loss_mode = GanLossMode::non_saturating;
};

struct GanModel {
  MlpSpec generator_spec;
  MlpSpec discriminator_spec;
  MlpParams generator;
  MlpParams discriminator;
  int latent_dim = 100;
  std::uint64_t train_seed = 0;
};

// Paper architecture: generator latent -> 256 -> 512 -> 1024 -> 900 with
// batch-norm, leaky ReLU 0.2 and a tanh output; discriminator
// 900 -> 512 -> 256 -> 256 -> 1 with batch-norm, leaky ReLU 0.2, dropout 0.5
// per hidden layer and a sigmoid output.
GanModel make_gan_model(int latent_dim = 100);

struct GanLosses {
  double discriminator = 0.0;
  double generator = 0.0;
};

// Binary cross-entropy pair of the minimax game. Probabilities are clamped
// to [1e-7, 1 - 1e-7] before the logs.
GanLosses gan_losses(const Eigen::VectorXd& d_real, const Eigen::VectorXd& d_fake,
                     GanLossMode mode = GanLossMode::non_saturating);

// Grids encoded to {-1,+1} row vectors (free -> -1, occupied -> +1) to match
// the tanh output range.
Eigen::MatrixXd encode_grids(const EnvironmentSet& dataset);

// Alternating minimax training with Adam; deterministic given cfg.seed.
// Throws std::runtime_error naming epoch and step if any loss goes
// non-finite.
GanModel train_gan(const EnvironmentSet& dataset, const GanTrainConfig& cfg);

// Draws z ~ N(0,1)^latent_dim, runs the generator in eval mode, thresholds
// the tanh output at 0 and keeps only navigable grids, redrawing rejects.
// Throws std::runtime_error (naming the acceptance rate) once
// retry_factor * count draws are exhausted.
EnvironmentSet sample_environments(const GanModel& model, int count, SeededRng& rng,
                                   int retry_factor = 100);

// Versioned checkpoint: a magic line, a JSON header describing both specs,
// and a little-endian float64 blob of every tensor.
void save_gan(const GanModel& model, const std::filesystem::path& path);
GanModel load_gan(const std::filesystem::path& path);

}  // namespace envsynth::gan
