#include <cmath>
#include <vector>

#include "doctest.h"
#include "envsynth/gan/adam.hpp"
#include "envsynth/gan/mlp.hpp"

using namespace envsynth;
using namespace envsynth::gan;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int rows, int cols, SeededRng& rng, double scale = 1.0) {
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = scale * rng.next_normal();
    }
  }
  return m;
}

// Scalar loss: mean over the batch of <output_row, target_row>. Smooth in
// every parameter, so central differences apply.
double probe_loss(const MlpSpec& spec, const MlpParams& params, const MatrixXd& x,
                  const MatrixXd& t) {
  const MatrixXd y = mlp_forward(spec, params, x, Mode::train);
  return (y.array() * t.array()).sum() / x.rows();
}

struct GradCheckStats {
  double max_err = 0.0;
  int checked = 0;
};

double guarded_rel_err(double analytic, double fd) {
  const double diff = std::abs(analytic - fd);
  if (diff < 1e-8) return 0.0;
  return diff / std::max(std::abs(analytic), std::abs(fd));
}

// Central finite differences over every parameter and every input entry.
GradCheckStats gradient_check(const MlpSpec& spec, MlpParams params, const MatrixXd& x,
                              SeededRng& rng) {
  const int out_w = spec.output_width();
  MatrixXd t = random_matrix(static_cast<int>(x.rows()), out_w, rng);

  ForwardCache cache;
  mlp_forward(spec, params, x, Mode::train, nullptr, &cache);
  const MatrixXd upstream = t / static_cast<double>(x.rows());
  const BackwardResult back = mlp_backward(spec, params, cache, upstream);

  const double eps = 1e-4;
  GradCheckStats stats;
  auto check_tensor = [&](auto& tensor, const auto& grad) {
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      const double saved = tensor.data()[i];
      tensor.data()[i] = saved + eps;
      const double up = probe_loss(spec, params, x, t);
      tensor.data()[i] = saved - eps;
      const double down = probe_loss(spec, params, x, t);
      tensor.data()[i] = saved;
      const double fd = (up - down) / (2.0 * eps);
      stats.max_err = std::max(stats.max_err, guarded_rel_err(grad.data()[i], fd));
      ++stats.checked;
    }
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    check_tensor(params.layers[l].weight, back.grads.layers[l].weight);
    check_tensor(params.layers[l].bias, back.grads.layers[l].bias);
    if (params.layers[l].bn_scale.size() > 0) {
      check_tensor(params.layers[l].bn_scale, back.grads.layers[l].bn_scale);
      check_tensor(params.layers[l].bn_shift, back.grads.layers[l].bn_shift);
    }
  }
  // Input gradient (the generator trains through it).
  MatrixXd x_pert = x;
  for (Eigen::Index i = 0; i < x_pert.size(); ++i) {
    const double saved = x_pert.data()[i];
    x_pert.data()[i] = saved + eps;
    const double up = probe_loss(spec, params, x_pert, t);
    x_pert.data()[i] = saved - eps;
    const double down = probe_loss(spec, params, x_pert, t);
    x_pert.data()[i] = saved;
    const double fd = (up - down) / (2.0 * eps);
    stats.max_err = std::max(stats.max_err, guarded_rel_err(back.input_grad.data()[i], fd));
    ++stats.checked;
  }
  return stats;
}

MlpSpec random_spec(SeededRng& rng, bool batch_norm, OutputActivation out) {
  MlpSpec spec;
  const int hidden = 1 + static_cast<int>(rng.next_index(2));
  spec.layer_widths.push_back(2 + static_cast<int>(rng.next_index(7)));
  for (int h = 0; h < hidden; ++h) {
    spec.layer_widths.push_back(2 + static_cast<int>(rng.next_index(7)));
  }
  spec.layer_widths.push_back(1 + static_cast<int>(rng.next_index(8)));
  spec.leaky_slope = 0.2;
  spec.output_activation = out;
  spec.batch_norm = batch_norm;
  spec.dropout_rate = 0.0;
  return spec;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  SeededRng rng(606);
  for (int trial = 0; trial < 12; ++trial) {
    const bool bn = trial % 2 == 0;
    const auto out = trial % 4 < 2 ? OutputActivation::tanh : OutputActivation::sigmoid;
    const MlpSpec spec = random_spec(rng, bn, out);
    SeededRng init = rng.split(trial);
    MlpParams params = init_params(spec, init);
    const int batch = bn ? 2 + static_cast<int>(rng.next_index(3)) : 1 + static_cast<int>(rng.next_index(4));
    const MatrixXd x = random_matrix(batch, spec.input_width(), rng);
    const auto stats = gradient_check(spec, params, x, rng);
    CAPTURE(trial);
    CHECK(stats.max_err < 1e-4);
  }
}

TEST_CASE("zero weights with tanh output produce all-zero output") {
  MlpSpec spec;
  spec.layer_widths = {4, 5, 3};
  spec.output_activation = OutputActivation::tanh;
  SeededRng rng(1);
  MlpParams params = init_params(spec, rng);
  for (auto& layer : params.layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  SeededRng data_rng(2);
  const MatrixXd x = random_matrix(3, 4, data_rng);
  const MatrixXd y = mlp_forward(spec, params, x, Mode::eval);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("leaky ReLU slope is applied to negative pre-activations") {
  MlpSpec spec;
  spec.layer_widths = {1, 1, 1};
  spec.leaky_slope = 0.2;
  spec.output_activation = OutputActivation::tanh;
  SeededRng rng(1);
  MlpParams params = init_params(spec, rng);
  params.layers[0].weight(0, 0) = 1.0;
  params.layers[0].bias[0] = 0.0;
  params.layers[1].weight(0, 0) = 1.0;
  params.layers[1].bias[0] = 0.0;
  MatrixXd x(1, 1);
  x(0, 0) = -1.0;
  const MatrixXd y = mlp_forward(spec, params, x, Mode::eval);
  CHECK(y(0, 0) == doctest::Approx(std::tanh(-0.2)).epsilon(1e-12));
}

TEST_CASE("eval output matches a straight-line reimplementation") {
  MlpSpec spec;
  spec.layer_widths = {3, 4, 2};
  spec.leaky_slope = 0.2;
  spec.output_activation = OutputActivation::tanh;
  SeededRng rng(77);
  const MlpParams params = init_params(spec, rng);
  SeededRng data_rng(78);
  const MatrixXd x = random_matrix(2, 3, data_rng);
  const MatrixXd y = mlp_forward(spec, params, x, Mode::eval);

  for (int row = 0; row < 2; ++row) {
    std::vector<double> h(4, 0.0);
    for (int j = 0; j < 4; ++j) {
      double z = params.layers[0].bias[j];
      for (int i = 0; i < 3; ++i) z += x(row, i) * params.layers[0].weight(i, j);
      h[j] = z > 0 ? z : 0.2 * z;
    }
    for (int j = 0; j < 2; ++j) {
      double z = params.layers[1].bias[j];
      for (int i = 0; i < 4; ++i) z += h[i] * params.layers[1].weight(i, j);
      CHECK(y(row, j) == doctest::Approx(std::tanh(z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval mode is deterministic even with dropout configured") {
  MlpSpec spec;
  spec.layer_widths = {4, 6, 2};
  spec.dropout_rate = 0.5;
  spec.batch_norm = true;
  SeededRng rng(5);
  const MlpParams params = init_params(spec, rng);
  SeededRng data_rng(6);
  const MatrixXd x = random_matrix(3, 4, data_rng);
  const MatrixXd y1 = mlp_forward(spec, params, x, Mode::eval);
  const MatrixXd y2 = mlp_forward(spec, params, x, Mode::eval);
  CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("contract violations throw") {
  MlpSpec spec;
  spec.layer_widths = {4, 6, 2};
  SeededRng rng(5);
  MlpParams params = init_params(spec, rng);
  SeededRng data_rng(6);

  // Width mismatch.
  CHECK_THROWS_AS(mlp_forward(spec, params, random_matrix(2, 5, data_rng), Mode::eval),
                  std::invalid_argument);

  // Batch of one with train-mode batch-norm.
  spec.batch_norm = true;
  MlpParams bn_params = init_params(spec, rng);
  CHECK_THROWS_AS(
      mlp_forward(spec, bn_params, random_matrix(1, 4, data_rng), Mode::train),
      std::invalid_argument);

  // Train-mode dropout without an rng.
  spec.batch_norm = false;
  spec.dropout_rate = 0.3;
  MlpParams do_params = init_params(spec, rng);
  CHECK_THROWS_AS(
      mlp_forward(spec, do_params, random_matrix(2, 4, data_rng), Mode::train),
      std::invalid_argument);
}

TEST_CASE("inverted dropout keeps the expected activation scale") {
  MlpSpec spec;
  spec.layer_widths = {2, 8, 1};
  spec.dropout_rate = 0.5;
  SeededRng rng(9);
  MlpParams params = init_params(spec, rng);
  // Positive weights and inputs keep the hidden layer in the linear regime.
  params.layers[0].weight.setConstant(0.5);
  params.layers[0].bias.setConstant(0.1);
  params.layers[1].weight.setConstant(1.0);
  params.layers[1].bias.setZero();
  spec.output_activation = OutputActivation::tanh;

  MatrixXd x(1, 2);
  x << 0.4, 0.6;

  // Pre-dropout hidden activation is identical across units: z = 0.6.
  // Inverted dropout keeps E[post] = pre; check the empirical mean of the
  // mask-scaled activations over many draws.
  SeededRng mask_rng(1234);
  const int trials = 10000;
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t < trials; ++t) {
    ForwardCache cache;
    (void)mlp_forward(spec, params, x, Mode::train, &mask_rng, &cache);
    const auto& lc = cache.layers[0];
    for (int j = 0; j < 8; ++j) {
      sum += lc.act_input(0, j) > 0
                 ? lc.act_input(0, j) * lc.dropout_mask(0, j)
                 : 0.0;
      ++count;
    }
  }
  const double expected = 0.6;
  const double mean = sum / count;
  // Mask variance for p=0.5 is 1, so the SE of the mean activation is
  // 0.6/sqrt(count); allow three standard errors.
  const double se = expected / std::sqrt(static_cast<double>(count));
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  MlpSpec spec;
  spec.layer_widths = {3, 5, 2};
  spec.batch_norm = true;
  SeededRng rng(11);
  MlpParams params = init_params(spec, rng);
  SeededRng data_rng(12);
  const MatrixXd x = random_matrix(3, 3, data_rng);
  ForwardCache cache;
  mlp_forward(spec, params, x, Mode::train, nullptr, &cache);
  const BackwardResult back = mlp_backward(spec, params, cache, MatrixXd::Zero(3, 2));
  for (const auto& layer : back.grads.layers) {
    CHECK(layer.weight.cwiseAbs().maxCoeff() == 0.0);
    CHECK(layer.bias.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(back.input_grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("duplicated rows reproduce the single-row gradient under mean reduction") {
  MlpSpec spec;
  spec.layer_widths = {3, 4, 2};
  SeededRng rng(13);
  MlpParams params = init_params(spec, rng);
  SeededRng data_rng(14);
  const MatrixXd x1 = random_matrix(1, 3, data_rng);
  MatrixXd x2(2, 3);
  x2.row(0) = x1.row(0);
  x2.row(1) = x1.row(0);
  MatrixXd t1 = random_matrix(1, 2, data_rng);
  MatrixXd t2(2, 2);
  t2.row(0) = t1.row(0);
  t2.row(1) = t1.row(0);

  ForwardCache c1, c2;
  mlp_forward(spec, params, x1, Mode::train, nullptr, &c1);
  mlp_forward(spec, params, x2, Mode::train, nullptr, &c2);
  const auto b1 = mlp_backward(spec, params, c1, t1 / 1.0);
  const auto b2 = mlp_backward(spec, params, c2, t2 / 2.0);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    CHECK((b1.grads.layers[l].weight - b2.grads.layers[l].weight).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((b1.grads.layers[l].bias - b2.grads.layers[l].bias).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("adam takes a bias-corrected first step") {
  MlpSpec spec;
  spec.layer_widths = {1, 1, 1};
  SeededRng rng(15);
  MlpParams params = init_params(spec, rng);
  params.layers[0].weight(0, 0) = 1.0;
  MlpParams grads = zeros_like(params);
  grads.layers[0].weight(0, 0) = 0.5;

  AdamState state = make_adam_state(params);
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  adam_step(params, grads, state, cfg);
  // After bias correction the first step is lr * g / (|g| + eps) ~= lr.
  CHECK(params.layers[0].weight(0, 0) == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
}
