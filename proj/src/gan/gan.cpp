#include "envsynth/gan/gan.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "envsynth/gan/adam.hpp"
#include "envsynth/sim/world.hpp"

namespace envsynth::gan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kProbClamp = 1e-7;

double clamp_prob(double p) {
  if (p < kProbClamp) return kProbClamp;
  if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return p;
}
}  // namespace

GanModel make_gan_model(int latent_dim) {
  if (latent_dim <= 0) {
    throw std::invalid_argument("latent_dim must be positive");
  }
  GanModel model;
  model.latent_dim = latent_dim;
  model.generator_spec.layer_widths = {latent_dim, 256, 512, 1024,
                                       OccupancyGrid::kCellCount};
  model.generator_spec.leaky_slope = 0.2;
  model.generator_spec.output_activation = OutputActivation::tanh;
  model.generator_spec.batch_norm = true;
  model.generator_spec.dropout_rate = 0.0;

  model.discriminator_spec.layer_widths = {OccupancyGrid::kCellCount, 512, 256, 256, 1};
  model.discriminator_spec.leaky_slope = 0.2;
  model.discriminator_spec.output_activation = OutputActivation::sigmoid;
  model.discriminator_spec.batch_norm = true;
  model.discriminator_spec.dropout_rate = 0.5;
  return model;
}

GanLosses gan_losses(const VectorXd& d_real, const VectorXd& d_fake, GanLossMode mode) {
  if (d_real.size() == 0 || d_fake.size() == 0) {
    throw std::invalid_argument("gan_losses: empty probability vectors");
  }
  GanLosses out;
  double sum_real = 0.0;
  for (Eigen::Index i = 0; i < d_real.size(); ++i) {
    sum_real += std::log(clamp_prob(d_real[i]));
  }
  double sum_fake_one_minus = 0.0;
  double sum_fake = 0.0;
  for (Eigen::Index i = 0; i < d_fake.size(); ++i) {
    const double p = clamp_prob(d_fake[i]);
    sum_fake_one_minus += std::log(1.0 - p);
    sum_fake += std::log(p);
  }
  out.discriminator = -sum_real / d_real.size() - sum_fake_one_minus / d_fake.size();
  out.generator = mode == GanLossMode::non_saturating
                      ? -sum_fake / d_fake.size()
                      : sum_fake_one_minus / d_fake.size();
  return out;
}

Eigen::MatrixXd encode_grids(const EnvironmentSet& dataset) {
  MatrixXd data(dataset.entries.size(), OccupancyGrid::kCellCount);
  for (std::size_t i = 0; i < dataset.entries.size(); ++i) {
    const auto& cells = dataset.entries[i].grid.cells();
    for (int j = 0; j < OccupancyGrid::kCellCount; ++j) {
      data(static_cast<Eigen::Index>(i), j) = cells[j] ? 1.0 : -1.0;
    }
  }
  return data;
}

namespace {

MatrixXd draw_latent(int batch, int latent_dim, SeededRng& rng) {
  MatrixXd z(batch, latent_dim);
  for (int r = 0; r < batch; ++r) {
    for (int c = 0; c < latent_dim; ++c) {
      z(r, c) = rng.next_normal();
    }
  }
  return z;
}

void accumulate(MlpParams& into, const MlpParams& from) {
  for (std::size_t l = 0; l < into.layers.size(); ++l) {
    into.layers[l].weight += from.layers[l].weight;
    into.layers[l].bias += from.layers[l].bias;
    if (into.layers[l].bn_scale.size() > 0) {
      into.layers[l].bn_scale += from.layers[l].bn_scale;
      into.layers[l].bn_shift += from.layers[l].bn_shift;
    }
  }
}

void check_finite(const GanLosses& losses, int epoch, int step) {
  if (!std::isfinite(losses.discriminator) || !std::isfinite(losses.generator)) {
    throw std::runtime_error("gan training aborted: non-finite loss at epoch " +
                             std::to_string(epoch) + " step " + std::to_string(step));
  }
}

}  // namespace

GanModel train_gan(const EnvironmentSet& dataset, const GanTrainConfig& cfg) {
  const int n = static_cast<int>(dataset.entries.size());
  if (n == 0) {
    throw std::invalid_argument("train_gan: dataset must be non-empty");
  }
  if (cfg.batch_size <= 0 || cfg.batch_size > n) {
    throw std::invalid_argument("train_gan: batch_size must lie in [1, dataset size]");
  }
  if (cfg.epochs <= 0 || cfg.d_steps_per_g_step <= 0 || cfg.learning_rate <= 0.0) {
    throw std::invalid_argument("train_gan: config values must be positive");
  }

  const MatrixXd data = encode_grids(dataset);

  SeededRng root(cfg.seed);
  SeededRng g_init = root.split(1);
  SeededRng d_init = root.split(2);
  SeededRng train_rng = root.split(3);

  GanModel model = make_gan_model(cfg.latent_dim);
  model.train_seed = cfg.seed;
  model.generator = init_params(model.generator_spec, g_init);
  model.discriminator = init_params(model.discriminator_spec, d_init);

  const AdamConfig adam_cfg{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                            cfg.adam_epsilon};
  AdamState adam_g = make_adam_state(model.generator);
  AdamState adam_d = make_adam_state(model.discriminator);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const int batches_per_epoch = n / cfg.batch_size;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the shared train stream keeps runs reproducible.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(train_rng.next_index(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int b = 0; b < batches_per_epoch; ++b) {
      MatrixXd real(cfg.batch_size, OccupancyGrid::kCellCount);
      for (int r = 0; r < cfg.batch_size; ++r) {
        real.row(r) = data.row(order[b * cfg.batch_size + r]);
      }

      for (int s = 0; s < cfg.d_steps_per_g_step; ++s) {
        const MatrixXd z = draw_latent(cfg.batch_size, cfg.latent_dim, train_rng);
        ForwardCache g_cache;
        const MatrixXd fake = mlp_forward(model.generator_spec, model.generator, z,
                                          Mode::train, &train_rng, &g_cache);
        update_running_stats(model.generator, model.generator_spec, g_cache);

        ForwardCache d_real_cache, d_fake_cache;
        const MatrixXd p_real = mlp_forward(model.discriminator_spec, model.discriminator,
                                            real, Mode::train, &train_rng, &d_real_cache);
        update_running_stats(model.discriminator, model.discriminator_spec, d_real_cache);
        const MatrixXd p_fake = mlp_forward(model.discriminator_spec, model.discriminator,
                                            fake, Mode::train, &train_rng, &d_fake_cache);
        update_running_stats(model.discriminator, model.discriminator_spec, d_fake_cache);

        const GanLosses losses = gan_losses(p_real.col(0), p_fake.col(0), cfg.loss_mode);
        check_finite(losses, epoch, s);

        // dL_d/dp over the clamped probabilities, mean reduction.
        MatrixXd d_real_up(p_real.rows(), 1);
        for (Eigen::Index i = 0; i < p_real.rows(); ++i) {
          d_real_up(i, 0) = -1.0 / (clamp_prob(p_real(i, 0)) * p_real.rows());
        }
        MatrixXd d_fake_up(p_fake.rows(), 1);
        for (Eigen::Index i = 0; i < p_fake.rows(); ++i) {
          d_fake_up(i, 0) = 1.0 / ((1.0 - clamp_prob(p_fake(i, 0))) * p_fake.rows());
        }

        BackwardResult br_real = mlp_backward(model.discriminator_spec,
                                              model.discriminator, d_real_cache, d_real_up);
        BackwardResult br_fake = mlp_backward(model.discriminator_spec,
                                              model.discriminator, d_fake_cache, d_fake_up);
        accumulate(br_real.grads, br_fake.grads);
        adam_step(model.discriminator, br_real.grads, adam_d, adam_cfg);
      }

      {
        const MatrixXd z = draw_latent(cfg.batch_size, cfg.latent_dim, train_rng);
        ForwardCache g_cache;
        const MatrixXd fake = mlp_forward(model.generator_spec, model.generator, z,
                                          Mode::train, &train_rng, &g_cache);
        update_running_stats(model.generator, model.generator_spec, g_cache);

        ForwardCache d_cache;
        const MatrixXd p_fake = mlp_forward(model.discriminator_spec, model.discriminator,
                                            fake, Mode::train, &train_rng, &d_cache);
        update_running_stats(model.discriminator, model.discriminator_spec, d_cache);

        double loss_g = 0.0;
        for (Eigen::Index i = 0; i < p_fake.rows(); ++i) {
          const double p = clamp_prob(p_fake(i, 0));
          loss_g += cfg.loss_mode == GanLossMode::non_saturating ? -std::log(p)
                                                                 : std::log(1.0 - p);
        }
        loss_g /= static_cast<double>(p_fake.rows());
        if (!std::isfinite(loss_g)) {
          throw std::runtime_error("gan training aborted: non-finite loss at epoch " +
                                   std::to_string(epoch) + " generator step");
        }

        MatrixXd up(p_fake.rows(), 1);
        for (Eigen::Index i = 0; i < p_fake.rows(); ++i) {
          const double p = clamp_prob(p_fake(i, 0));
          up(i, 0) = cfg.loss_mode == GanLossMode::non_saturating
                         ? -1.0 / (p * p_fake.rows())
                         : -1.0 / ((1.0 - p) * p_fake.rows());
        }
        BackwardResult br_d = mlp_backward(model.discriminator_spec, model.discriminator,
                                           d_cache, up);
        BackwardResult br_g = mlp_backward(model.generator_spec, model.generator, g_cache,
                                           br_d.input_grad);
        adam_step(model.generator, br_g.grads, adam_g, adam_cfg);
      }
    }
  }
  return model;
}

EnvironmentSet sample_environments(const GanModel& model, int count, SeededRng& rng,
                                   int retry_factor) {
  if (count < 0) {
    throw std::invalid_argument("sample_environments: count must be non-negative");
  }
  EnvironmentSet out;
  out.kind = SetKind::synthesized;
  if (count == 0) return out;

  const long long max_draws = static_cast<long long>(retry_factor) * count;
  long long draws = 0;
  while (static_cast<int>(out.entries.size()) < count) {
    if (draws >= max_draws) {
      const double acceptance =
          static_cast<double>(out.entries.size()) / static_cast<double>(draws);
      throw std::runtime_error(
          "sample_environments: retry cap exhausted after " + std::to_string(draws) +
          " draws (acceptance rate " + std::to_string(acceptance) + ")");
    }
    const MatrixXd z = draw_latent(1, model.latent_dim, rng);
    const MatrixXd y =
        mlp_forward(model.generator_spec, model.generator, z, Mode::eval);
    ++draws;
    std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount);
    for (int j = 0; j < OccupancyGrid::kCellCount; ++j) {
      flat[j] = y(0, j) > 0.0 ? 1 : 0;  // tanh output thresholded at 0
    }
    OccupancyGrid grid = grid_from_flat(flat);
    if (!sim::is_navigable(grid)) continue;
    EnvEntry entry;
    entry.grid = std::move(grid);
    entry.source = "gan:draw=" + std::to_string(draws - 1);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

namespace {

using nlohmann::json;

json spec_to_json(const MlpSpec& spec) {
  json j;
  j["layer_widths"] = spec.layer_widths;
  j["leaky_slope"] = spec.leaky_slope;
  j["output_activation"] =
      spec.output_activation == OutputActivation::tanh ? "tanh" : "sigmoid";
  j["batch_norm"] = spec.batch_norm;
  j["dropout_rate"] = spec.dropout_rate;
  return j;
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec spec;
  spec.layer_widths = j.at("layer_widths").get<std::vector<int>>();
  spec.leaky_slope = j.at("leaky_slope").get<double>();
  spec.output_activation = j.at("output_activation").get<std::string>() == "tanh"
                               ? OutputActivation::tanh
                               : OutputActivation::sigmoid;
  spec.batch_norm = j.at("batch_norm").get<bool>();
  spec.dropout_rate = j.at("dropout_rate").get<double>();
  spec.validate();
  return spec;
}

void write_tensor(std::ofstream& out, const MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
}

void write_tensor(std::ofstream& out, const VectorXd& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void write_params(std::ofstream& out, const MlpParams& params) {
  for (const auto& layer : params.layers) {
    write_tensor(out, layer.weight);
    write_tensor(out, layer.bias);
    write_tensor(out, layer.bn_scale);
    write_tensor(out, layer.bn_shift);
    write_tensor(out, layer.bn_running_mean);
    write_tensor(out, layer.bn_running_var);
  }
}

void read_doubles(std::ifstream& in, double* dst, std::size_t n,
                  const std::string& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) {
    throw std::runtime_error("truncated checkpoint: " + path);
  }
}

MlpParams read_params(std::ifstream& in, const MlpSpec& spec, const std::string& path) {
  MlpParams params;
  const int n_layers = static_cast<int>(spec.layer_widths.size()) - 1;
  params.layers.resize(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    auto& layer = params.layers[l];
    layer.weight.resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      std::vector<double> row(fan_out);
      read_doubles(in, row.data(), row.size(), path);
      for (int c = 0; c < fan_out; ++c) layer.weight(r, c) = row[c];
    }
    layer.bias.resize(fan_out);
    read_doubles(in, layer.bias.data(), fan_out, path);
    const bool has_bn = spec.batch_norm && l < n_layers - 1;
    if (has_bn) {
      layer.bn_scale.resize(fan_out);
      layer.bn_shift.resize(fan_out);
      layer.bn_running_mean.resize(fan_out);
      layer.bn_running_var.resize(fan_out);
      read_doubles(in, layer.bn_scale.data(), fan_out, path);
      read_doubles(in, layer.bn_shift.data(), fan_out, path);
      read_doubles(in, layer.bn_running_mean.data(), fan_out, path);
      read_doubles(in, layer.bn_running_var.data(), fan_out, path);
    }
  }
  return params;
}

constexpr const char* kGanMagic = "ENVSYNTH-GAN v1";

}  // namespace

void save_gan(const GanModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  json header;
  header["generator_spec"] = spec_to_json(model.generator_spec);
  header["discriminator_spec"] = spec_to_json(model.discriminator_spec);
  header["latent_dim"] = model.latent_dim;
  header["train_seed"] = model.train_seed;
  out << kGanMagic << "\n" << header.dump() << "\n";
  write_params(out, model.generator);
  write_params(out, model.discriminator);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

GanModel load_gan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path.string());
  }
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kGanMagic) {
    throw std::runtime_error("not a gan checkpoint (bad magic): " + path.string());
  }
  std::getline(in, header_line);
  const json header = json::parse(header_line);
  GanModel model;
  model.generator_spec = spec_from_json(header.at("generator_spec"));
  model.discriminator_spec = spec_from_json(header.at("discriminator_spec"));
  model.latent_dim = header.at("latent_dim").get<int>();
  model.train_seed = header.at("train_seed").get<std::uint64_t>();
  model.generator = read_params(in, model.generator_spec, path.string());
  model.discriminator = read_params(in, model.discriminator_spec, path.string());
  return model;
}

}  // namespace envsynth::gan
