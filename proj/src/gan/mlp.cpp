#include "envsynth/gan/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace envsynth::gan {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

void MlpSpec::validate() const {
  if (layer_widths.size() < 3) {
    throw std::invalid_argument("mlp spec needs at least one hidden layer");
  }
  for (int w : layer_widths) {
    if (w <= 0) throw std::invalid_argument("mlp layer widths must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout rate must lie in [0, 1)");
  }
  if (leaky_slope < 0.0) {
    throw std::invalid_argument("leaky slope must be non-negative");
  }
}

MlpParams init_params(const MlpSpec& spec, SeededRng& rng) {
  spec.validate();
  MlpParams params;
  const int n_layers = static_cast<int>(spec.layer_widths.size()) - 1;
  params.layers.resize(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    const bool hidden = l < n_layers - 1;
    const double gain = hidden ? 2.0 / (1.0 + spec.leaky_slope * spec.leaky_slope) : 1.0;
    const double stddev = std::sqrt(gain / fan_in);
    auto& layer = params.layers[l];
    layer.weight.resize(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        layer.weight(i, j) = stddev * rng.next_normal();
      }
    }
    layer.bias = VectorXd::Zero(fan_out);
    if (hidden && spec.batch_norm) {
      layer.bn_scale = VectorXd::Ones(fan_out);
      layer.bn_shift = VectorXd::Zero(fan_out);
      layer.bn_running_mean = VectorXd::Zero(fan_out);
      layer.bn_running_var = VectorXd::Ones(fan_out);
    }
  }
  return params;
}

MlpParams zeros_like(const MlpParams& like) {
  MlpParams out;
  out.layers.resize(like.layers.size());
  for (std::size_t l = 0; l < like.layers.size(); ++l) {
    out.layers[l].weight = MatrixXd::Zero(like.layers[l].weight.rows(),
                                          like.layers[l].weight.cols());
    out.layers[l].bias = VectorXd::Zero(like.layers[l].bias.size());
    out.layers[l].bn_scale = VectorXd::Zero(like.layers[l].bn_scale.size());
    out.layers[l].bn_shift = VectorXd::Zero(like.layers[l].bn_shift.size());
  }
  return out;
}

namespace {

MatrixXd leaky_relu(const MatrixXd& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

MatrixXd leaky_relu_grad(const MatrixXd& act_input, double slope) {
  return act_input.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

}  // namespace

MatrixXd mlp_forward(const MlpSpec& spec, const MlpParams& params,
                     const MatrixXd& input, Mode mode, SeededRng* rng,
                     ForwardCache* cache) {
  spec.validate();
  if (input.cols() != spec.input_width()) {
    throw std::invalid_argument("mlp_forward: input width " + std::to_string(input.cols()) +
                                " does not match spec input " +
                                std::to_string(spec.input_width()));
  }
  if (params.layers.size() != spec.layer_widths.size() - 1) {
    throw std::invalid_argument("mlp_forward: params do not match spec layer count");
  }
  const bool train = mode == Mode::train;
  if (train && spec.batch_norm && input.rows() < 2) {
    throw std::invalid_argument(
        "mlp_forward: batch-norm in train mode needs a batch of at least 2");
  }
  if (train && spec.dropout_rate > 0.0 && rng == nullptr) {
    throw std::invalid_argument("mlp_forward: train-mode dropout needs an rng");
  }

  const int n_hidden = spec.hidden_count();
  if (cache) {
    cache->layers.assign(n_hidden, LayerCache{});
    cache->mode = mode;
  }

  const double batch = static_cast<double>(input.rows());
  MatrixXd x = input;
  for (int l = 0; l < n_hidden; ++l) {
    const auto& layer = params.layers[l];
    if (x.cols() != layer.weight.rows()) {
      throw std::invalid_argument("mlp_forward: layer " + std::to_string(l) +
                                  " width mismatch");
    }
    MatrixXd z = (x * layer.weight).rowwise() + layer.bias.transpose();
    MatrixXd act_input;
    MatrixXd normalized;
    RowVectorXd inv_std, batch_mean, batch_var;
    if (spec.batch_norm) {
      if (train) {
        batch_mean = z.colwise().mean();
        batch_var = (z.rowwise() - batch_mean).array().square().colwise().sum() / batch;
      } else {
        batch_mean = layer.bn_running_mean.transpose();
        batch_var = layer.bn_running_var.transpose();
      }
      inv_std = (batch_var.array() + kBnEpsilon).rsqrt();
      normalized = (z.rowwise() - batch_mean).array().rowwise() * inv_std.array();
      act_input = (normalized.array().rowwise() * layer.bn_scale.transpose().array())
                      .rowwise() +
                  layer.bn_shift.transpose().array();
    } else {
      act_input = std::move(z);
    }
    MatrixXd h = leaky_relu(act_input, spec.leaky_slope);
    MatrixXd mask;
    if (train && spec.dropout_rate > 0.0) {
      // Inverted dropout: surviving activations are scaled by 1/keep so the
      // expected value matches eval mode.
      const double keep = 1.0 - spec.dropout_rate;
      mask.resize(h.rows(), h.cols());
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          mask(r, c) = rng->next_double() < keep ? 1.0 / keep : 0.0;
        }
      }
      h.array() *= mask.array();
    }
    if (cache) {
      auto& lc = cache->layers[l];
      lc.input = x;
      lc.normalized = std::move(normalized);
      lc.act_input = std::move(act_input);
      lc.dropout_mask = std::move(mask);
      lc.inv_std = std::move(inv_std);
      lc.batch_mean = std::move(batch_mean);
      lc.batch_var = std::move(batch_var);
    }
    x = std::move(h);
  }

  const auto& out_layer = params.layers.back();
  if (x.cols() != out_layer.weight.rows()) {
    throw std::invalid_argument("mlp_forward: output layer width mismatch");
  }
  MatrixXd z_out = (x * out_layer.weight).rowwise() + out_layer.bias.transpose();
  MatrixXd out = spec.output_activation == OutputActivation::tanh
                     ? MatrixXd(z_out.array().tanh())
                     : MatrixXd((1.0 / (1.0 + (-z_out.array()).exp())));
  if (cache) {
    cache->final_input = std::move(x);
    cache->output = out;
  }
  return out;
}

void update_running_stats(MlpParams& params, const MlpSpec& spec,
                          const ForwardCache& cache) {
  if (!spec.batch_norm || cache.mode != Mode::train) return;
  for (int l = 0; l < spec.hidden_count(); ++l) {
    auto& layer = params.layers[l];
    const auto& lc = cache.layers[l];
    layer.bn_running_mean = (1.0 - kBnMomentum) * layer.bn_running_mean +
                            kBnMomentum * lc.batch_mean.transpose();
    layer.bn_running_var = (1.0 - kBnMomentum) * layer.bn_running_var +
                           kBnMomentum * lc.batch_var.transpose();
  }
}

BackwardResult mlp_backward(const MlpSpec& spec, const MlpParams& params,
                            const ForwardCache& cache, const MatrixXd& upstream) {
  if (cache.mode != Mode::train) {
    throw std::invalid_argument("mlp_backward: cache must come from a train-mode forward");
  }
  if (static_cast<int>(cache.layers.size()) != spec.hidden_count()) {
    throw std::invalid_argument("mlp_backward: cache does not match spec");
  }
  if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols()) {
    throw std::invalid_argument("mlp_backward: upstream gradient shape mismatch");
  }

  BackwardResult result;
  result.grads = zeros_like(params);

  // Output activation.
  MatrixXd dz;
  if (spec.output_activation == OutputActivation::tanh) {
    dz = upstream.array() * (1.0 - cache.output.array().square());
  } else {
    dz = upstream.array() * cache.output.array() * (1.0 - cache.output.array());
  }

  // Output affine.
  {
    auto& g = result.grads.layers.back();
    g.weight = cache.final_input.transpose() * dz;
    g.bias = dz.colwise().sum().transpose();
  }
  MatrixXd dx = dz * params.layers.back().weight.transpose();

  const double batch = static_cast<double>(upstream.rows());
  for (int l = spec.hidden_count() - 1; l >= 0; --l) {
    const auto& lc = cache.layers[l];
    const auto& layer = params.layers[l];
    auto& g = result.grads.layers[l];

    MatrixXd dh = std::move(dx);
    if (lc.dropout_mask.size() > 0) {
      dh.array() *= lc.dropout_mask.array();
    }
    MatrixXd d_act = dh.array() * leaky_relu_grad(lc.act_input, spec.leaky_slope).array();

    MatrixXd dz_layer;
    if (spec.batch_norm) {
      g.bn_scale = (d_act.array() * lc.normalized.array()).colwise().sum().transpose();
      g.bn_shift = d_act.colwise().sum().transpose();
      MatrixXd d_norm =
          d_act.array().rowwise() * layer.bn_scale.transpose().array();
      // Backprop through the batch statistics:
      //   dz = inv_std/N * (N*d_norm - sum(d_norm) - zhat * sum(d_norm .* zhat))
      const RowVectorXd sum_dnorm = d_norm.colwise().sum();
      const RowVectorXd sum_dnorm_zhat =
          (d_norm.array() * lc.normalized.array()).colwise().sum();
      dz_layer =
          ((batch * d_norm.array() -
            (MatrixXd::Ones(d_norm.rows(), 1) * sum_dnorm).array() -
            lc.normalized.array() *
                (MatrixXd::Ones(d_norm.rows(), 1) * sum_dnorm_zhat).array())
               .rowwise() *
           (lc.inv_std.array() / batch));
    } else {
      dz_layer = std::move(d_act);
    }

    g.weight = lc.input.transpose() * dz_layer;
    g.bias = dz_layer.colwise().sum().transpose();
    dx = dz_layer * layer.weight.transpose();
  }

  result.input_grad = std::move(dx);
  return result;
}

}  // namespace envsynth::gan
