#include "otcert/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otcert/random.hpp"

namespace otcert {

namespace {
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kBatchStream = 3;
}  // namespace

TrainConfig TrainConfig::for_task(TaskKind task, bool full_scale) {
  TrainConfig c;
  c.batch = task == TaskKind::Regression ? 8 : 16;
  if (full_scale) c.iterations = kFullIterations;
  return c;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(lr_decay > 0.0)) throw std::invalid_argument("learning-rate decay must be positive");
  if (decay_every == 0) throw std::invalid_argument("decay interval must be positive");
  if (batch == 0) throw std::invalid_argument("batch size must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be nonnegative");
  if (adv_eps < 0.0) throw std::invalid_argument("adversarial epsilon must be nonnegative");
}

double effective_lr(const TrainConfig& config, std::size_t iteration) {
  return config.lr * std::pow(config.lr_decay, static_cast<double>(iteration / config.decay_every));
}

AdamState AdamState::zeros_like(const MlpModel& model) {
  return {MlpGradients::zeros_like(model), MlpGradients::zeros_like(model)};
}

void adamw_step(MlpModel& model, const MlpGradients& grads, AdamState& state, const TrainConfig& config,
                std::size_t iteration) {
  const double lr = effective_lr(config, iteration);
  const double t = static_cast<double>(iteration + 1);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  const double b1 = config.beta1, b2 = config.beta2, eps = config.adam_eps;
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    if (config.weight_decay > 0.0) model.weights[j] *= 1.0 - lr * config.weight_decay;
    update(model.weights[j], grads.weights[j], state.m.weights[j], state.v.weights[j]);
    update(model.biases[j], grads.biases[j], state.m.biases[j], state.v.biases[j]);
  }
}

std::vector<double> adversarial_example(const MlpModel& model, const LossKind& loss, std::span<const double> x,
                                        double y, double eps, const Box& domain) {
  if (eps < 0.0) throw std::invalid_argument("adversarial epsilon must be nonnegative");
  std::vector<double> out(x.begin(), x.end());
  if (eps == 0.0) return out;
  const SampleGradient g = mlp_grad(model, loss, x, y);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * g.input[i];
  domain.clamp(out);
  return out;
}

TrainResult train(const Dataset& data, const TrainConfig& config, const LossKind& loss, const Box& input_domain,
                  std::optional<std::size_t> early_stop_at) {
  config.validate();
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("cannot train on an empty dataset");
  if (config.batch > n) throw std::invalid_argument("batch size exceeds dataset size");
  const std::size_t d = data.x.dim();
  if (input_domain.dim() != d) throw std::invalid_argument("input domain dimension does not match the data");

  std::vector<std::size_t> widths{d};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(1);

  auto init_rng = make_rng(config.seed, kInitStream);
  auto batch_rng = make_rng(config.seed, kBatchStream);
  TrainResult r{MlpModel::random(widths, init_rng), {}};
  AdamState state = AdamState::zeros_like(r.model);

  const std::size_t iterations = std::min(config.iterations, early_stop_at.value_or(config.iterations));
  r.history.reserve(iterations);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = n;  // forces a shuffle before the first batch

  const auto bsz = static_cast<Eigen::Index>(config.batch);
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(d), bsz);
  Eigen::RowVectorXd targets(bsz);

  for (std::size_t it = 0; it < iterations; ++it) {
    for (Eigen::Index b = 0; b < bsz; ++b) {
      if (cursor == n) {
        std::shuffle(order.begin(), order.end(), batch_rng);
        cursor = 0;
      }
      const std::size_t idx = order[cursor++];
      for (std::size_t k = 0; k < d; ++k) inputs(static_cast<Eigen::Index>(k), b) = data.x[idx][k];
      targets(b) = data.y[idx];
    }
    if (config.adv_eps > 0.0) {
      const BatchGradient probe = mlp_grad_batch(r.model, loss, inputs, targets, false);
      for (Eigen::Index b = 0; b < bsz; ++b) {
        std::vector<double> moved(d);
        for (std::size_t k = 0; k < d; ++k)
          moved[k] = inputs(static_cast<Eigen::Index>(k), b) + config.adv_eps * probe.inputs(static_cast<Eigen::Index>(k), b);
        input_domain.clamp(moved);
        for (std::size_t k = 0; k < d; ++k) inputs(static_cast<Eigen::Index>(k), b) = moved[k];
      }
    }
    const BatchGradient g = mlp_grad_batch(r.model, loss, inputs, targets, true);
    r.history.push_back(g.loss);
    adamw_step(r.model, g.params, state, config, it);
  }
  return r;
}

}  // namespace otcert
