#include "otcert/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otcert {

namespace {

void check_widths(const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) throw std::invalid_argument("network needs at least input and output widths");
  if (widths.back() != 1) throw std::invalid_argument("network output must be scalar");
  for (auto w : widths)
    if (w == 0) throw std::invalid_argument("layer width must be positive");
}

void check_target(const LossKind& kind, double target) {
  if (kind.discrete_labels() && target != 1.0 && target != -1.0)
    throw std::invalid_argument("label must be -1 or +1 for this loss");
}

double activate(double z, double slope) { return z > 0.0 ? z : slope * z; }
// Derivative taken as the negative-side slope at z = 0.
double activate_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

struct Tape {
  std::vector<Eigen::MatrixXd> pre;   // pre-activations of hidden layers
  std::vector<Eigen::MatrixXd> post;  // post[0] = inputs, post[j] = activation of layer j
  Eigen::RowVectorXd out;
};

Tape run_forward(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (model.weights.empty()) throw std::invalid_argument("empty network");
  if (static_cast<std::size_t>(inputs.rows()) != model.input_dim())
    throw std::invalid_argument("input dimension does not match the network");
  Tape t;
  t.post.push_back(inputs);
  const std::size_t layers = model.weights.size();
  for (std::size_t j = 0; j + 1 < layers; ++j) {
    Eigen::MatrixXd z = model.weights[j] * t.post.back();
    z.colwise() += model.biases[j];
    Eigen::MatrixXd a = z.unaryExpr([&](double v) { return activate(v, model.negative_slope); });
    t.pre.push_back(std::move(z));
    t.post.push_back(std::move(a));
  }
  Eigen::MatrixXd o = model.weights.back() * t.post.back();
  o.colwise() += model.biases.back();
  t.out = o.row(0);
  return t;
}

// Backpropagates per-sample output sensitivities; parameter gradients are
// scaled by `param_scale`, input gradients are left per-sample.
void run_backward(const MlpModel& model, const Tape& t, const Eigen::RowVectorXd& dout, double param_scale,
                  MlpGradients* params, Eigen::MatrixXd* inputs) {
  const std::size_t layers = model.weights.size();
  Eigen::MatrixXd g = dout;
  for (std::size_t j = layers; j-- > 0;) {
    if (params) {
      params->weights[j] = param_scale * (g * t.post[j].transpose());
      params->biases[j] = param_scale * g.rowwise().sum();
    }
    Eigen::MatrixXd back = model.weights[j].transpose() * g;
    if (j == 0) {
      if (inputs) *inputs = std::move(back);
      break;
    }
    const double slope = model.negative_slope;
    g = back.cwiseProduct(t.pre[j - 1].unaryExpr([slope](double v) { return activate_grad(v, slope); }));
  }
}

}  // namespace

std::size_t parameter_count(const std::vector<std::size_t>& widths) {
  check_widths(widths);
  std::size_t total = 0;
  for (std::size_t j = 0; j + 1 < widths.size(); ++j) total += widths[j] * widths[j + 1] + widths[j + 1];
  return total;
}

MlpModel MlpModel::zeros(const std::vector<std::size_t>& widths) {
  check_widths(widths);
  MlpModel m;
  for (std::size_t j = 0; j + 1 < widths.size(); ++j) {
    m.weights.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(widths[j + 1]),
                                              static_cast<Eigen::Index>(widths[j])));
    m.biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(widths[j + 1])));
  }
  return m;
}

MlpModel MlpModel::random(const std::vector<std::size_t>& widths, std::mt19937_64& rng) {
  MlpModel m = zeros(widths);
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    const double fan_in = static_cast<double>(widths[j]);
    std::uniform_real_distribution<double> w(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
    std::uniform_real_distribution<double> b(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (Eigen::Index c = 0; c < m.weights[j].cols(); ++c)
      for (Eigen::Index r = 0; r < m.weights[j].rows(); ++r) m.weights[j](r, c) = w(rng);
    for (Eigen::Index r = 0; r < m.biases[j].size(); ++r) m.biases[j](r) = b(rng);
  }
  return m;
}

std::vector<std::size_t> MlpModel::widths() const {
  std::vector<std::size_t> w;
  if (weights.empty()) return w;
  w.push_back(static_cast<std::size_t>(weights.front().cols()));
  for (const auto& m : weights) w.push_back(static_cast<std::size_t>(m.rows()));
  return w;
}

std::size_t MlpModel::parameter_count() const { return otcert::parameter_count(widths()); }

double MlpModel::weight_norm_sq() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  return s;
}

double MlpModel::spectral_product() const {
  double p = 1.0;
  for (const auto& w : weights) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    p *= svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  return p * std::max(1.0, negative_slope);
}

LossKind LossKind::ramp(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ramp margin must be positive");
  return {Type::Ramp, gamma};
}

double LossKind::lipschitz() const {
  switch (type) {
    case Type::Huber: return 1.0;
    case Type::Ramp: return 1.0 / gamma;
    case Type::CrossEntropy: return 1.0;
  }
  return 1.0;
}

double loss_eval(const LossKind& kind, double prediction, double target) {
  check_target(kind, target);
  switch (kind.type) {
    case LossKind::Type::Huber: {
      const double r = std::abs(target - prediction);
      return r < 1.0 ? 0.5 * r * r : r - 0.5;
    }
    case LossKind::Type::Ramp:
      return std::min(1.0, std::max(0.0, 1.0 - prediction * target / kind.gamma));
    case LossKind::Type::CrossEntropy: {
      const double m = -prediction * target;
      return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
  }
  return 0.0;
}

double loss_dprediction(const LossKind& kind, double prediction, double target) {
  check_target(kind, target);
  switch (kind.type) {
    case LossKind::Type::Huber: {
      const double r = target - prediction;
      if (std::abs(r) < 1.0) return -r;
      return r > 0.0 ? -1.0 : 1.0;
    }
    case LossKind::Type::Ramp: {
      const double m = prediction * target;
      return (m > 0.0 && m < kind.gamma) ? -target / kind.gamma : 0.0;
    }
    case LossKind::Type::CrossEntropy: {
      const double m = -prediction * target;
      const double s = m >= 0.0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
      return -target * s;
    }
  }
  return 0.0;
}

double loss_dtarget(const LossKind& kind, double prediction, double target) {
  check_target(kind, target);
  switch (kind.type) {
    case LossKind::Type::Huber: return -loss_dprediction(kind, prediction, target);
    case LossKind::Type::Ramp: {
      const double m = prediction * target;
      return (m > 0.0 && m < kind.gamma) ? -prediction / kind.gamma : 0.0;
    }
    case LossKind::Type::CrossEntropy:
      return loss_dprediction(kind, prediction, target) * prediction / target;
  }
  return 0.0;
}

double mlp_forward(const MlpModel& model, std::span<const double> x) {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return run_forward(model, Eigen::MatrixXd(v)).out(0);
}

Eigen::RowVectorXd mlp_forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  return run_forward(model, inputs).out;
}

MlpGradients MlpGradients::zeros_like(const MlpModel& model) {
  MlpGradients g;
  for (const auto& w : model.weights) g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.biases) g.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

double MlpGradients::norm_sq() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return s;
}

SampleGradient mlp_grad(const MlpModel& model, const LossKind& loss, std::span<const double> x, double y) {
  Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::RowVectorXd t(1);
  t(0) = y;
  BatchGradient b = mlp_grad_batch(model, loss, in, t, true);
  SampleGradient s;
  s.loss = b.loss;
  s.params = std::move(b.params);
  s.input.assign(b.inputs.data(), b.inputs.data() + b.inputs.size());
  return s;
}

BatchGradient mlp_grad_batch(const MlpModel& model, const LossKind& loss, const Eigen::MatrixXd& inputs,
                             const Eigen::RowVectorXd& targets, bool want_params) {
  if (targets.size() != inputs.cols()) throw std::invalid_argument("one target per input column required");
  Tape t = run_forward(model, inputs);
  const Eigen::Index batch = inputs.cols();
  Eigen::RowVectorXd dout(batch);
  BatchGradient out;
  for (Eigen::Index b = 0; b < batch; ++b) {
    out.loss += loss_eval(loss, t.out(b), targets(b));
    dout(b) = loss_dprediction(loss, t.out(b), targets(b));
  }
  out.loss /= static_cast<double>(batch);
  if (want_params) out.params = MlpGradients::zeros_like(model);
  run_backward(model, t, dout, 1.0 / static_cast<double>(batch), want_params ? &out.params : nullptr,
               &out.inputs);
  return out;
}

PredictorJet mlp_jet(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  Tape t = run_forward(model, inputs);
  PredictorJet j;
  run_backward(model, t, Eigen::RowVectorXd::Ones(inputs.cols()), 1.0, nullptr, &j.gradients);
  j.values = std::move(t.out);
  return j;
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "mlp " << model.negative_slope;
  for (auto w : model.widths()) out << ' ' << w;
  out << '\n';
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    for (Eigen::Index r = 0; r < model.weights[j].rows(); ++r)
      for (Eigen::Index c = 0; c < model.weights[j].cols(); ++c) out << model.weights[j](r, c) << '\n';
    for (Eigen::Index r = 0; r < model.biases[j].size(); ++r) out << model.biases[j](r) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line, tag;
  std::getline(in, line);
  std::istringstream header(line);
  double slope = 0.0;
  header >> tag >> slope;
  if (tag != "mlp" || !header) throw std::runtime_error(path + ": not a model file");
  std::vector<std::size_t> widths;
  for (std::size_t w; header >> w;) widths.push_back(w);
  MlpModel m = MlpModel::zeros(widths);
  m.negative_slope = slope;
  auto next = [&] {
    double v;
    if (!(in >> v)) throw std::runtime_error(path + ": truncated model file");
    return v;
  };
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    for (Eigen::Index r = 0; r < m.weights[j].rows(); ++r)
      for (Eigen::Index c = 0; c < m.weights[j].cols(); ++c) m.weights[j](r, c) = next();
    for (Eigen::Index r = 0; r < m.biases[j].size(); ++r) m.biases[j](r) = next();
  }
  return m;
}

}  // namespace otcert
