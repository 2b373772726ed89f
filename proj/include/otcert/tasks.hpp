#pragma once

// The two synthetic tasks: a noisy 1-D logistic regression curve and a 2-D
// binary classification problem with a radial logit.

#include <cstdint>
#include <string>
#include <vector>

#include "otcert/mlp.hpp"
#include "otcert/partition.hpp"
#include "otcert/points.hpp"

namespace otcert {

enum class TaskKind { Regression, Classification };

std::string to_string(TaskKind t);
TaskKind parse_task(const std::string& name);

struct Dataset {
  Points x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
};

/// f*(x) = 1 / (1 + exp(5(x + 2))).
double regression_target(double x);
/// 10 * ||x - (2,2)|| - sin(2 x1)/4 + 1.5 cos(x2).
double classification_logit(double x1, double x2);
double sigmoid(double z);

/// Random stream for training sets; held-out draws use kTestStream.
inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kTestStream = 4;

/// x ~ U(-5, 5), y = f*(x) + N(0, 0.1^2) clipped to [-1, 2].
Dataset synth_regression(std::size_t n, std::uint64_t seed, std::uint64_t stream = kTrainStream);
/// x ~ U([-5, 5]^2), y = +1 with probability sigmoid(logit(x)), else -1.
Dataset synth_classification(std::size_t n, std::uint64_t seed, std::uint64_t stream = kTrainStream);
Dataset synth_dataset(TaskKind task, std::size_t n, std::uint64_t seed, std::uint64_t stream = kTrainStream);

/// Input domain X of the task.
Box task_input_domain(TaskKind task);
/// Joint domain X x Y; for classification Y is the interval [-1, 1].
Box task_joint_domain(TaskKind task);
/// Loss used for training (Huber / cross-entropy).
LossKind training_loss(TaskKind task);
/// Loss certified by the bounds (Huber / ramp with margin gamma).
LossKind certified_loss(TaskKind task, double gamma = 5.0);

/// Mean of loss(f(x_i), y_i) over the dataset.
double empirical_risk(const MlpModel& model, const LossKind& loss, const Dataset& data);
/// Columns x0..x{d-1}, y.
void write_dataset_csv(const Dataset& data, const std::string& path);

/// Fraction of misclassified points (sign(f) != y, f = 0 counted as an error).
double zero_one_risk(const MlpModel& model, const Dataset& data);

}  // namespace otcert
