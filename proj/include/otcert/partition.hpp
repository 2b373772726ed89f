#pragma once

// Data-independent rectangular partitions of a box domain. Membership is
// half-open on interior boundaries ([a, b)) and closed on the domain's upper
// face, so every domain point belongs to exactly one cell.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "otcert/points.hpp"

namespace otcert {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  /// Euclidean diagonal.
  double diameter() const;
  /// Diagonal of the projection onto the first `k` coordinates.
  double diameter_of_first(std::size_t k) const;
  bool contains(std::span<const double> p) const;
  /// Closed-box projection of p onto the box.
  void clamp(std::span<double> p) const;
};

enum class LabelSlice { Minus, Plus };

struct Cell {
  Box box;
  double diameter = 0.0;
  std::size_t count = 0;
  double input_projection_diameter = 0.0;
  std::optional<double> local_lip;
  std::optional<double> local_smooth_norm;
  std::optional<LabelSlice> label_slice;
};

class Partition {
 public:
  Partition() = default;

  const std::vector<Cell>& cells() const { return cells_; }
  std::vector<Cell>& cells() { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const Box& domain() const { return domain_; }
  /// Number of leading coordinates that belong to the input space X.
  std::size_t input_dim() const { return input_dim_; }
  /// True for the paired construction over X x {-1, +1}.
  bool paired() const { return paired_; }
  /// Dimension of the points this partition accepts (d + 1 when paired).
  std::size_t point_dim() const { return paired_ ? domain_.dim() + 1 : domain_.dim(); }

  /// Index of the unique cell containing `p`, or nullopt outside the domain
  /// (or, for paired partitions, when the label is not +/-1).
  std::optional<std::size_t> locate(std::span<const double> p) const;

  /// Cells sharing a face with cell `i` (same label slice for paired partitions).
  std::vector<std::size_t> face_neighbors(std::size_t i) const;

  double max_diameter() const;
  std::size_t total_count() const;

  bool member(const Box& box, std::span<const double> x) const;

 private:
  friend Partition build_grid_partition(const Box&, std::span<const std::size_t>, std::optional<std::size_t>);
  friend Partition build_paired_partition(const Partition&);
  friend Partition build_divergence_partition(std::uint64_t);

  std::optional<std::size_t> locate_in_input(std::span<const double> x) const;

  std::vector<Cell> cells_;
  Box domain_;
  std::size_t input_dim_ = 0;
  bool paired_ = false;
  // Per-axis boundaries when the partition is a regular grid; empty otherwise.
  std::vector<std::vector<double>> grid_edges_;
  std::size_t base_cells_ = 0;  // cells per label slice
};

/// Uniform grid with cells_per_dim[i] intervals along axis i. `input_dim`
/// defaults to the full dimension (no label coordinate).
Partition build_grid_partition(const Box& domain, std::span<const std::size_t> cells_per_dim,
                               std::optional<std::size_t> input_dim = std::nullopt);

/// P_+- = {P x {-1}} u {P x {+1}}: cells [0, k) carry Minus, [k, 2k) carry Plus.
Partition build_paired_partition(const Partition& input_partition);

/// Strips B_n x [0,1] for n < D_N plus the column B_{D_N} x B_m, m = 1..D_N,
/// with D_N = ceil(N^0.6).
Partition build_divergence_partition(std::uint64_t n);

/// ceil(N^{3/5}) computed exactly in integers.
std::uint64_t divergence_strip_count(std::uint64_t n);

/// Cell index for every sample. Throws std::out_of_range naming the first
/// sample outside the domain.
std::vector<std::size_t> assign_cells(const Partition& partition, const Points& samples);

/// Copy of `partition` with cell counts filled from `samples`.
Partition assign_counts(Partition partition, const Points& samples);

}  // namespace otcert
