#include "otcert/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "otcert/csv.hpp"
#include "otcert/random.hpp"

namespace otcert {

namespace {
constexpr std::size_t kChunk = 8192;
}  // namespace

std::string to_string(TaskKind t) { return t == TaskKind::Regression ? "regression" : "classification"; }

TaskKind parse_task(const std::string& name) {
  if (name == "regression") return TaskKind::Regression;
  if (name == "classification") return TaskKind::Classification;
  throw std::invalid_argument("unknown task '" + name + "'");
}

double regression_target(double x) { return 1.0 / (1.0 + std::exp(5.0 * (x + 2.0))); }

double classification_logit(double x1, double x2) {
  return 10.0 * std::hypot(x1 - 2.0, x2 - 2.0) - 0.25 * std::sin(2.0 * x1) + 1.5 * std::cos(x2);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Dataset synth_regression(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw std::invalid_argument("dataset size must be positive");
  auto rng = make_rng(seed, stream);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Dataset d{Points(1), {}};
  d.x.reserve(n);
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = std::clamp(regression_target(x) + noise(rng), -1.0, 2.0);
    d.x.push_back(std::span<const double>(&x, 1));
    d.y.push_back(y);
  }
  return d;
}

Dataset synth_classification(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw std::invalid_argument("dataset size must be positive");
  auto rng = make_rng(seed, stream);
  std::uniform_real_distribution<double> ux(-5.0, 5.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Dataset d{Points(2), {}};
  d.x.reserve(n);
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p[2] = {ux(rng), ux(rng)};
    const double y = u01(rng) < sigmoid(classification_logit(p[0], p[1])) ? 1.0 : -1.0;
    d.x.push_back(p);
    d.y.push_back(y);
  }
  return d;
}

Dataset synth_dataset(TaskKind task, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  return task == TaskKind::Regression ? synth_regression(n, seed, stream) : synth_classification(n, seed, stream);
}

Box task_input_domain(TaskKind task) {
  if (task == TaskKind::Regression) return Box({-5.0}, {5.0});
  return Box({-5.0, -5.0}, {5.0, 5.0});
}

Box task_joint_domain(TaskKind task) {
  if (task == TaskKind::Regression) return Box({-5.0, -1.0}, {5.0, 2.0});
  return Box({-5.0, -5.0, -1.0}, {5.0, 5.0, 1.0});
}

LossKind training_loss(TaskKind task) {
  return task == TaskKind::Regression ? LossKind::huber() : LossKind::cross_entropy();
}

LossKind certified_loss(TaskKind task, double gamma) {
  return task == TaskKind::Regression ? LossKind::huber() : LossKind::ramp(gamma);
}

double empirical_risk(const MlpModel& model, const LossKind& loss, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const std::size_t d = data.x.dim();
  double total = 0.0;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, data.size() - start);
    Eigen::Map<const Eigen::MatrixXd> in(data.x.flat().data() + start * d, static_cast<Eigen::Index>(d),
                                         static_cast<Eigen::Index>(len));
    const Eigen::RowVectorXd out = mlp_forward_batch(model, in);
    for (std::size_t i = 0; i < len; ++i) total += loss_eval(loss, out(static_cast<Eigen::Index>(i)), data.y[start + i]);
  }
  return total / static_cast<double>(data.size());
}

double zero_one_risk(const MlpModel& model, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  const std::size_t d = data.x.dim();
  std::size_t wrong = 0;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, data.size() - start);
    Eigen::Map<const Eigen::MatrixXd> in(data.x.flat().data() + start * d, static_cast<Eigen::Index>(d),
                                         static_cast<Eigen::Index>(len));
    const Eigen::RowVectorXd out = mlp_forward_batch(model, in);
    for (std::size_t i = 0; i < len; ++i)
      if (out(static_cast<Eigen::Index>(i)) * data.y[start + i] <= 0.0) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::vector<std::string> header;
  for (std::size_t k = 0; k < data.x.dim(); ++k) header.push_back("x" + std::to_string(k));
  header.push_back("y");
  CsvTable t(header);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row;
    for (double v : data.x[i]) row.push_back(format_number(v));
    row.push_back(format_number(data.y[i]));
    t.add_row(std::move(row));
  }
  t.write(path);
}

}  // namespace otcert
