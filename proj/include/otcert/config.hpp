#pragma once

// Run configuration shared by every experiment. Defaults follow the
// reference training setup at desk scale; `full_scale` restores the full
// iteration count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "otcert/bounds.hpp"
#include "otcert/tasks.hpp"
#include "otcert/train.hpp"

namespace otcert {

enum class Experiment { Bound, PartitionSweep, SizeSweep, RegSweep, Shift, Concentration, Divergence, Heatmap };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

enum class RegKind { WeightDecay, Adversarial, EarlyStop };

std::string to_string(RegKind k);
RegKind parse_reg_kind(const std::string& name);

struct RunConfig {
  Experiment experiment = Experiment::Bound;
  TaskKind task = TaskKind::Regression;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::size_t> n_list{512};
  double delta = 0.05;
  double gamma = 5.0;
  LipMode lip_mode = LipMode::Composed;

  // Partition of the bound experiment and of the regularization sweep.
  // Regression: cells along X and Y; classification: cells per input axis.
  // Empty: 5 x 5 for regression, 30 x 30 for classification.
  std::vector<std::size_t> cells;
  // Partition sweep: cells per input axis, and for regression the Y counts.
  std::vector<std::size_t> granularities{1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 40, 50};
  std::vector<std::size_t> label_cells{1, 3, 5, 10};

  // Mesh per input axis (empty: 512 for d = 1, 256 per axis otherwise) and
  // label mesh for continuous labels.
  std::vector<std::size_t> mesh;
  std::size_t label_mesh = 128;

  std::size_t iterations = 2000;
  bool full_scale = false;
  double lr = 0.05;
  std::size_t batch = 0;  // 0: task default
  std::size_t width = 64;
  std::size_t depth = 3;
  double weight_decay = 0.0;
  double adv_eps = 0.0;

  RegKind reg_kind = RegKind::WeightDecay;
  std::vector<double> reg_values{0.0, 1e-4, 1e-3, 1e-2};

  std::vector<std::size_t> sweep_widths{32, 64, 128, 256};
  std::vector<std::size_t> sweep_depths{1, 2, 3, 4};
  // Empty: 10 x 5 for regression, 50 x 50 for classification.
  std::vector<std::size_t> size_cells;

  std::vector<double> shift_norms{0.0, 0.5, 1.0};
  std::size_t shift_samples = 256;

  std::vector<std::size_t> conc_n{16, 64, 256, 1024};
  std::size_t trials = 200;
  double alpha = 1.0;
  std::size_t conc_dim = 2;
  std::size_t reference_factor = 50;

  std::vector<std::uint64_t> divergence_n{1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072, 262144, 524288, 1048576};

  std::size_t test_samples = 100000;
  std::string out_dir = "results";

  void validate() const;
  std::vector<std::size_t> bound_cells() const;
  std::vector<std::size_t> size_sweep_cells() const;
  TrainConfig train_config(std::uint64_t seed) const;
  std::vector<std::size_t> mesh_per_dim() const;
  /// Canonical key=value listing of every field that affects results.
  std::string canonical() const;
  /// 16-hex-digit FNV-1a hash of canonical().
  std::string hash() const;
};

}  // namespace otcert
