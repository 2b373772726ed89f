#include "otcert/config.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "otcert/lipschitz.hpp"

namespace otcert {

namespace {

const char* const kExperimentNames[] = {"bound", "sweep-partitions", "sweep-size", "sweep-reg",
                                        "shift", "concentration",    "divergence", "heatmap"};

void check_cells(const std::vector<std::size_t>& cells, std::size_t expected, const char* what) {
  if (cells.size() != expected) throw std::invalid_argument(fmt::format("{} needs {} entries", what, expected));
  for (auto c : cells)
    if (c == 0) throw std::invalid_argument(fmt::format("{} entries must be positive", what));
}

}  // namespace

std::string to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment parse_experiment(const std::string& name) {
  for (int i = 0; i < 8; ++i)
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::string to_string(RegKind k) {
  switch (k) {
    case RegKind::WeightDecay: return "weight_decay";
    case RegKind::Adversarial: return "adversarial";
    case RegKind::EarlyStop: return "early_stop";
  }
  return "unknown";
}

RegKind parse_reg_kind(const std::string& name) {
  if (name == "weight_decay") return RegKind::WeightDecay;
  if (name == "adversarial") return RegKind::Adversarial;
  if (name == "early_stop") return RegKind::EarlyStop;
  throw std::invalid_argument("unknown regularizer '" + name + "'");
}

std::vector<std::size_t> RunConfig::bound_cells() const {
  if (!cells.empty()) return cells;
  return task == TaskKind::Regression ? std::vector<std::size_t>{5, 5} : std::vector<std::size_t>{30, 30};
}

std::vector<std::size_t> RunConfig::size_sweep_cells() const {
  if (!size_cells.empty()) return size_cells;
  return task == TaskKind::Regression ? std::vector<std::size_t>{10, 5} : std::vector<std::size_t>{50, 50};
}

std::vector<std::size_t> RunConfig::mesh_per_dim() const {
  const std::size_t d = task == TaskKind::Regression ? 1 : 2;
  if (mesh.empty()) return default_mesh(d);
  check_cells(mesh, d, "mesh");
  return mesh;
}

void RunConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (n_list.empty()) throw std::invalid_argument("at least one sample size is required");
  for (auto n : n_list)
    if (n == 0) throw std::invalid_argument("sample sizes must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  // Regression partitions live on X x Y (two axes), classification on X.
  check_cells(bound_cells(), 2, "cells");
  check_cells(size_sweep_cells(), 2, "size_cells");
  if (granularities.empty()) throw std::invalid_argument("granularities must not be empty");
  if (label_cells.empty()) throw std::invalid_argument("label_cells must not be empty");
  if (label_mesh == 0) throw std::invalid_argument("label_mesh must be positive");
  (void)mesh_per_dim();
  if (iterations == 0 && !full_scale) throw std::invalid_argument("iterations must be positive");
  if (width == 0 || depth == 0) throw std::invalid_argument("network width and depth must be positive");
  if (trials < 2) throw std::invalid_argument("trials must be at least 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (conc_dim == 0) throw std::invalid_argument("conc_dim must be positive");
  if (shift_samples == 0) throw std::invalid_argument("shift_samples must be positive");
  if (test_samples == 0) throw std::invalid_argument("test_samples must be positive");
  train_config(0).validate();
}

TrainConfig RunConfig::train_config(std::uint64_t seed) const {
  TrainConfig c = TrainConfig::for_task(task, full_scale);
  if (!full_scale) c.iterations = iterations;
  c.lr = lr;
  if (batch) c.batch = batch;
  c.hidden.assign(depth, width);
  c.weight_decay = weight_decay;
  c.adv_eps = adv_eps;
  c.seed = seed;
  return c;
}

std::string RunConfig::canonical() const {
  std::string s;
  auto kv = [&](const char* k, const auto& v) { s += fmt::format("{}={}\n", k, v); };
  auto list = [](const auto& v) { return fmt::format("{}", fmt::join(v, " ")); };
  kv("experiment", to_string(experiment));
  kv("task", to_string(task));
  kv("seeds", list(seeds));
  kv("n", list(n_list));
  kv("delta", fmt::format("{:.17g}", delta));
  kv("gamma", fmt::format("{:.17g}", gamma));
  kv("lip_mode", to_string(lip_mode));
  kv("cells", list(bound_cells()));
  kv("granularities", list(granularities));
  kv("label_cells", list(label_cells));
  kv("mesh", list(mesh_per_dim()));
  kv("label_mesh", label_mesh);
  kv("iterations", train_config(0).iterations);
  kv("lr", fmt::format("{:.17g}", lr));
  kv("batch", train_config(0).batch);
  kv("width", width);
  kv("depth", depth);
  kv("weight_decay", fmt::format("{:.17g}", weight_decay));
  kv("adv_eps", fmt::format("{:.17g}", adv_eps));
  kv("reg_kind", to_string(reg_kind));
  kv("reg_values", list(reg_values));
  kv("sweep_widths", list(sweep_widths));
  kv("sweep_depths", list(sweep_depths));
  kv("size_cells", list(size_sweep_cells()));
  kv("shift_norms", list(shift_norms));
  kv("shift_samples", shift_samples);
  kv("conc_n", list(conc_n));
  kv("trials", trials);
  kv("alpha", fmt::format("{:.17g}", alpha));
  kv("conc_dim", conc_dim);
  kv("reference_factor", reference_factor);
  kv("divergence_n", list(divergence_n));
  kv("test_samples", test_samples);
  return s;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace otcert
