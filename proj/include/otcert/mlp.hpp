#pragma once

// Fully-connected leaky-ReLU networks with a scalar output, the losses used
// for training and certification, and the decoupled-weight-decay Adam update.

#include <Eigen/Dense>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace otcert {

struct MlpModel {
  /// weights[j] maps layer j to layer j+1 (rows = fan-out).
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  /// Slope on the negative side; 0.1 for the leaky ReLU, 0 for a plain ReLU.
  double negative_slope = 0.1;

  /// All-zero network with layer widths {input, hidden..., 1}.
  static MlpModel zeros(const std::vector<std::size_t>& widths);
  /// He-uniform weights U(+-sqrt(6/fan_in)) and biases U(+-1/sqrt(fan_in)).
  static MlpModel random(const std::vector<std::size_t>& widths, std::mt19937_64& rng);

  std::vector<std::size_t> widths() const;
  std::size_t input_dim() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights.front().cols()); }
  std::size_t parameter_count() const;
  /// Sum of squared Frobenius norms of the weight matrices.
  double weight_norm_sq() const;
  /// Product of layer operator norms; a global Lipschitz upper bound.
  double spectral_product() const;
};

/// Number of parameters of a network with the given widths.
std::size_t parameter_count(const std::vector<std::size_t>& widths);

struct LossKind {
  enum class Type { Huber, Ramp, CrossEntropy };
  Type type = Type::Huber;
  double gamma = 1.0;

  static LossKind huber() { return {Type::Huber, 1.0}; }
  static LossKind ramp(double gamma);
  static LossKind cross_entropy() { return {Type::CrossEntropy, 1.0}; }

  /// Labels restricted to {-1, +1}.
  bool discrete_labels() const { return type != Type::Huber; }
  /// Lipschitz constant of the loss in the prediction argument.
  double lipschitz() const;
};

/// Huber (delta = 1): r^2/2 for |r| < 1, |r| - 1/2 otherwise, r = target - prediction.
/// Ramp: min{1, (1 - prediction*target/gamma)_+}.
/// CrossEntropy: log(1 + exp(-prediction*target)).
double loss_eval(const LossKind& kind, double prediction, double target);
double loss_dprediction(const LossKind& kind, double prediction, double target);
double loss_dtarget(const LossKind& kind, double prediction, double target);

double mlp_forward(const MlpModel& model, std::span<const double> x);
/// Outputs for the columns of `inputs` (input_dim x batch).
Eigen::RowVectorXd mlp_forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGradients zeros_like(const MlpModel& model);
  double norm_sq() const;
};

struct SampleGradient {
  double loss = 0.0;
  MlpGradients params;
  std::vector<double> input;
};

/// Exact reverse-mode gradients of loss(f(x), y) in the parameters and in x.
SampleGradient mlp_grad(const MlpModel& model, const LossKind& loss, std::span<const double> x, double y);

struct BatchGradient {
  /// Mean loss over the batch.
  double loss = 0.0;
  /// Gradient of the mean loss in the parameters.
  MlpGradients params;
  /// Per-sample gradient of loss(f(x_b), y_b) in x_b (input_dim x batch).
  Eigen::MatrixXd inputs;
};

BatchGradient mlp_grad_batch(const MlpModel& model, const LossKind& loss, const Eigen::MatrixXd& inputs,
                             const Eigen::RowVectorXd& targets, bool want_params = true);

/// Predictions and input gradients of f itself for every column of `inputs`.
struct PredictorJet {
  Eigen::RowVectorXd values;
  Eigen::MatrixXd gradients;
};
PredictorJet mlp_jet(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// Text format: a header line "mlp <slope> <widths...>", then every weight
/// matrix row-major followed by its bias, one value per line at full precision.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace otcert
