#pragma once

// Experiment pipelines: train a network per seed, probe its gradients on a
// mesh, assemble certificates and tabulate them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcert/bounds.hpp"
#include "otcert/config.hpp"
#include "otcert/csv.hpp"
#include "otcert/lipschitz.hpp"
#include "otcert/mlp.hpp"
#include "otcert/tasks.hpp"

namespace otcert {

struct TrainedInstance {
  TaskKind task = TaskKind::Regression;
  std::uint64_t seed = 0;
  Dataset data;
  MlpModel model;
};

TrainedInstance train_instance(TaskKind task, std::size_t n, std::uint64_t seed, const TrainConfig& train,
                               std::optional<std::size_t> early_stop_at = std::nullopt);

/// Mesh probes of a trained model, computed once and shared by every partition.
struct InstanceProbe {
  GradField composed;
  GradField predictor;
  double composed_lip = 0.0;
  double predictor_lip = 0.0;
  double prediction_min = 0.0;
  double prediction_max = 0.0;
  /// Sup of the certified loss over the prediction range and Y.
  double loss_sup = 1.0;
};

InstanceProbe probe_instance(const RunConfig& config, const TrainedInstance& inst);

struct Certificate {
  BoundReport local;
  BoundReport global;
  BoundReport rademacher;
  /// Certified-loss risk on the training set (Huber or ramp).
  double train_risk = 0.0;
  /// Held-out risk (Huber, or 0-1 error for classification); NaN if skipped.
  double test_risk = 0.0;
  std::size_t partition_size = 0;
  Partition partition;
};

/// Partition over X x Y for regression (cells = {M_X, M_Y}) or the paired
/// partition of a cells[0] x cells[1] input grid for classification.
Partition task_partition(TaskKind task, std::span<const std::size_t> cells);

/// Training points as they enter the partition: (x, y).
Points joint_samples(const Dataset& data);

Certificate certify(const RunConfig& config, const TrainedInstance& inst, const InstanceProbe& probe,
                    std::span<const std::size_t> cells);

/// Certified-loss test risk on config.test_samples fresh draws.
double held_out_risk(const RunConfig& config, const TrainedInstance& inst);

CsvTable run_bound(const RunConfig& config);
CsvTable run_partition_sweep(const RunConfig& config);
CsvTable run_size_sweep(const RunConfig& config);
CsvTable run_reg_sweep(const RunConfig& config);
CsvTable run_shift(const RunConfig& config);
CsvTable run_concentration(const RunConfig& config);
CsvTable run_divergence(const RunConfig& config);
CsvTable run_heatmap(const RunConfig& config);
CsvTable run_experiment(const RunConfig& config);

/// Mean and standard error of `value_column` grouped by `keys`.
CsvTable summarize(const CsvTable& table, const std::vector<std::string>& keys,
                   const std::vector<std::string>& value_columns);

/// One-neuron ReLU network x -> scale * relu(x - 1 + 1/N), scale = sqrt(N)/log2(log2 N).
MlpModel divergence_network(std::uint64_t n);

}  // namespace otcert
