#pragma once

// Mesh-based estimates of local and global Lipschitz constants: gradient
// norms are evaluated on a uniform mesh and maximized per partition cell.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcert/mlp.hpp"
#include "otcert/partition.hpp"
#include "otcert/points.hpp"

namespace otcert {

enum class Probed { LossComposed, PredictorOnly };

/// Label values paired with every input mesh point of a loss-composed field.
struct LabelGrid {
  std::vector<double> values;

  /// m equispaced values over [lo, hi] (both ends included).
  static LabelGrid linspace(double lo, double hi, std::size_t m);
  /// The two classification labels {-1, +1}.
  static LabelGrid signs();
};

struct GradField {
  /// Input points (PredictorOnly) or (input, label) points (LossComposed).
  Points mesh_points{1};
  std::vector<double> grad_norms;
  Probed probed = Probed::PredictorOnly;
  std::vector<std::size_t> mesh_per_dim;

  std::size_t size() const { return grad_norms.size(); }
};

/// 512 points for one input dimension, 256 per axis otherwise.
std::vector<std::size_t> default_mesh(std::size_t input_dim);

/// Equispaced mesh over the box, endpoints included; last axis fastest.
Points uniform_mesh(const Box& domain, std::span<const std::size_t> mesh_per_dim);

/// Without a loss: ||grad f(x)||. With a loss: the norm of the gradient of
/// (x, y) -> loss(f(x), y), where y ranges over `labels`; for losses on
/// discrete labels only the x-gradient is probed.
GradField grad_norm_field(const MlpModel& model, const std::optional<LossKind>& loss, const Box& domain,
                          std::span<const std::size_t> mesh_per_dim,
                          const std::optional<LabelGrid>& labels = std::nullopt);

/// Field of an arbitrary scalar function given its gradient norm on the mesh.
GradField field_from_function(const Box& domain, std::span<const std::size_t> mesh_per_dim,
                              const std::function<double(std::span<const double>)>& grad_norm);

/// Per-cell maximum of the field. A field over the input space applied to a
/// partition with a label coordinate is treated as constant in the label.
/// Cells without mesh points take the maximum of their face neighbours.
Partition local_lipschitz(const GradField& field, Partition partition);

double global_lipschitz(const GradField& field);

/// CSV with coordinate columns x0.. and a grad_norm column.
void write_field_csv(const GradField& field, const std::string& path);

}  // namespace otcert
