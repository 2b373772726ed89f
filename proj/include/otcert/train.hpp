#pragma once

// Mini-batch AdamW training with the step-decay learning-rate schedule and
// the three regularizers: adversarial inputs, weight decay, early stopping.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "otcert/mlp.hpp"
#include "otcert/partition.hpp"
#include "otcert/tasks.hpp"

namespace otcert {

struct TrainConfig {
  double lr = 0.05;
  double lr_decay = 0.85;
  std::size_t decay_every = 1000;
  std::size_t iterations = 2000;
  std::size_t batch = 8;
  double weight_decay = 0.0;
  double adv_eps = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::vector<std::size_t> hidden{64, 64, 64};
  std::uint64_t seed = 0;

  static constexpr std::size_t kFullIterations = 20000;
  /// Task defaults: batch 8 for regression, 16 for classification.
  static TrainConfig for_task(TaskKind task, bool full_scale = false);
  void validate() const;
};

/// lr * lr_decay^floor(iteration / decay_every).
double effective_lr(const TrainConfig& config, std::size_t iteration);

struct AdamState {
  MlpGradients m;
  MlpGradients v;

  static AdamState zeros_like(const MlpModel& model);
};

/// One AdamW update at zero-based `iteration`. The decay W -= lr_t * lambda * W
/// acts on weight matrices only and is decoupled from the adaptive step.
void adamw_step(MlpModel& model, const MlpGradients& grads, AdamState& state, const TrainConfig& config,
                std::size_t iteration);

/// x + eps * grad_x loss(f(x), y), clipped to `domain`.
std::vector<double> adversarial_example(const MlpModel& model, const LossKind& loss, std::span<const double> x,
                                        double y, double eps, const Box& domain);

struct TrainResult {
  MlpModel model;
  /// Mean mini-batch loss at each iteration performed.
  std::vector<double> history;
};

/// Deterministic given (config.seed, data). Stops after `early_stop_at`
/// iterations when given.
TrainResult train(const Dataset& data, const TrainConfig& config, const LossKind& loss, const Box& input_domain,
                  std::optional<std::size_t> early_stop_at = std::nullopt);

}  // namespace otcert
