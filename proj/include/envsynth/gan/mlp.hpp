#pragma once

#include <Eigen/Core>
#include <vector>

#include "envsynth/core/rng.hpp"

namespace envsynth::gan {

enum class OutputActivation { tanh, sigmoid };
enum class Mode { train, eval };

// Fully connected net: per hidden layer affine -> batch-norm (optional) ->
// leaky ReLU -> dropout (train mode only), then a final affine and the
// output activation. layer_widths runs [input, hidden..., output].
struct MlpSpec {
  std::vector<int> layer_widths;
  double leaky_slope = 0.2;
  OutputActivation output_activation = OutputActivation::tanh;
  bool batch_norm = false;
  double dropout_rate = 0.0;

  int hidden_count() const { return static_cast<int>(layer_widths.size()) - 2; }
  int input_width() const { return layer_widths.front(); }
  int output_width() const { return layer_widths.back(); }
  void validate() const;
};

// Trainable tensors for one affine layer plus its batch-norm state. The
// batch-norm vectors are empty on the output layer and when batch_norm is
// off. Running statistics are carried here so a saved model is
// self-contained.
struct LayerParams {
  Eigen::MatrixXd weight;  // fan_in x fan_out
  Eigen::VectorXd bias;
  Eigen::VectorXd bn_scale;         // gamma
  Eigen::VectorXd bn_shift;         // beta
  Eigen::VectorXd bn_running_mean;
  Eigen::VectorXd bn_running_var;   // biased estimate, momentum-blended
};

struct MlpParams {
  std::vector<LayerParams> layers;
};

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.1;

// He-style init scaled for the leaky slope; biases zero, bn scale one.
MlpParams init_params(const MlpSpec& spec, SeededRng& rng);

// Same tensor shapes as `like`, all zero. Gradients use this layout (the
// running-stat vectors stay empty; they are not gradient-trained).
MlpParams zeros_like(const MlpParams& like);

struct LayerCache {
  Eigen::MatrixXd input;        // batch fed into the affine
  Eigen::MatrixXd normalized;   // z-hat (batch_norm only)
  Eigen::MatrixXd act_input;    // what the leaky ReLU saw
  Eigen::MatrixXd dropout_mask; // 0 or 1/(1-p); empty when dropout off
  Eigen::RowVectorXd inv_std;   // 1/sqrt(var+eps) of the batch (train+bn)
  Eigen::RowVectorXd batch_mean;
  Eigen::RowVectorXd batch_var;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::MatrixXd final_input;
  Eigen::MatrixXd output;
  Mode mode = Mode::eval;
};

// Runs the net on a row-per-sample batch. Train mode normalizes with batch
// statistics and draws fresh dropout masks from rng; eval mode uses running
// statistics, skips dropout, and is a deterministic pure function of
// (params, input). Throws std::invalid_argument on width mismatch and on a
// train-mode batch of one row with batch-norm (undefined variance).
Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const MlpParams& params,
                            const Eigen::MatrixXd& input, Mode mode,
                            SeededRng* rng = nullptr, ForwardCache* cache = nullptr);

// Momentum-blends the batch statistics captured in a train-mode cache into
// the running statistics. The trainer calls this after each train forward.
void update_running_stats(MlpParams& params, const MlpSpec& spec,
                          const ForwardCache& cache);

struct BackwardResult {
  MlpParams grads;
  Eigen::MatrixXd input_grad;
};

// Exact analytic gradients for every parameter (including batch-norm scale
// and shift, differentiated through the batch statistics) plus the gradient
// with respect to the input batch. upstream is dLoss/dOutput. Requires a
// cache from a matching train-mode forward.
BackwardResult mlp_backward(const MlpSpec& spec, const MlpParams& params,
                            const ForwardCache& cache, const Eigen::MatrixXd& upstream);

}  // namespace envsynth::gan
