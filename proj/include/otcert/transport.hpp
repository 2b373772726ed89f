#pragma once

// Exact optimal transport between finite weighted point clouds with the
// snowflaked ground cost |x - y|^alpha, 0 < alpha <= 1.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "otcert/points.hpp"

namespace otcert {

class EmpiricalMeasure {
 public:
  /// Uniform weights 1/n over the given atoms (duplicates allowed).
  static EmpiricalMeasure uniform(Points points);
  /// Explicit positive weights summing to 1 within 1e-12.
  static EmpiricalMeasure weighted(Points points, std::vector<double> weights);

  const Points& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.dim(); }
  bool is_uniform() const { return uniform_; }

  /// Integer masses units[i] / denominator == weights[i], when known exactly.
  const std::vector<std::uint64_t>& units() const { return units_; }
  std::uint64_t denominator() const { return denominator_; }

  /// Equal atoms collapsed into one with summed weight; `origin[k]` lists the
  /// original atom indices of merged atom k.
  EmpiricalMeasure merged(std::vector<std::vector<std::size_t>>* origin = nullptr) const;

 private:
  Points points_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> units_;
  std::uint64_t denominator_ = 0;
  bool uniform_ = false;
};

struct Flow {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<Flow> flows;
  double cost = 0.0;
};

/// Optimal coupling of a and b for cost |x - y|^alpha. Flow indices refer to
/// the atoms of the measures as passed in.
TransportPlan optimal_plan(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double alpha);

/// W_alpha(a, b); alpha = 1 gives W_1. Values below 1e-12 are reported as 0.
double w_alpha(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double alpha);

/// W_1 in one dimension: sorted-quantile matching for equal-size uniform
/// measures, the exact LP otherwise.
double w1_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Draws one i.i.d. point of mu.
using PointSampler = std::function<std::vector<double>(std::mt19937_64&)>;

struct McEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::vector<double> trial_values;
};

struct McOptions {
  /// Reference sample size as a multiple of N.
  std::size_t reference_factor = 50;
  /// 0 uses std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

/// Monte-Carlo estimate of E[W_alpha(mu, mu^N)] with mu replaced by a fresh
/// reference sample of reference_factor * N atoms in every trial. Trial t uses
/// the RNG stream seeded by (seed, t), so results do not depend on `workers`.
McEstimate mc_wasserstein_mean(const PointSampler& sampler, std::size_t n, std::size_t trials, double alpha,
                               std::uint64_t seed, McOptions options = {});

/// Loads a measure from CSV: one point per row; with `weight_column` the last
/// column holds weights, otherwise weights are uniform. A non-numeric first
/// row is treated as a header.
EmpiricalMeasure load_measure_csv(const std::string& path, bool weight_column);

}  // namespace otcert
