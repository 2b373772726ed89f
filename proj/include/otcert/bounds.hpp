#pragma once

// Generalization certificates assembled from partition statistics, local
// regularity estimates and empirical-measure convergence rates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otcert/partition.hpp"

namespace otcert {

enum class BoundKind {
  Partitioned,
  Global,
  Classification,
  Manifold,
  Shift,
  Rademacher,
  DivergenceLocal,
  DivergenceGlobal,
};

std::string to_string(BoundKind k);

/// Composed: cell regularity is Lip(loss o f | P) over X x Y.
/// Split: cell regularity is L_loss * max{1, Lip(f | P_X)}.
enum class LipMode { Composed, Split };

std::string to_string(LipMode m);

struct BoundInputs {
  std::size_t n = 0;
  double delta = 0.05;
  double loss_lip = 1.0;
  double predictor_lip = 0.0;
  double loss_sup = 1.0;
  std::size_t input_dim = 1;
  std::optional<double> gamma;
  std::optional<std::size_t> intrinsic_dim;
  std::optional<double> manifold_constant;
  std::optional<double> shift_w1;

  void validate() const;
};

struct Provenance {
  std::size_t partition_size = 0;
  std::vector<std::size_t> mesh_per_dim;
  std::vector<std::pair<std::string, double>> constants;
  bool smooth_constant_defaulted = false;
  bool constant_user_supplied = false;
  std::optional<bool> shift_empirical;
  bool vacuous = false;
  LipMode lip_mode = LipMode::Composed;
  std::vector<std::string> notes;
};

struct BoundReport {
  BoundKind kind = BoundKind::Partitioned;
  double cost_transport = 0.0;
  double err_transport = 0.0;
  double cost_partition = 0.0;
  double shift_term = 0.0;
  /// Empirical risk added by the classification certificate.
  double train_error = 0.0;
  double total = 0.0;
  Provenance provenance;
};

/// Deterministic pairwise-tree sum.
double pairwise_sum(const std::vector<double>& values);

/// Partitioned certificate over X x Y (d_Z = d + 1); `partition` needs
/// counts summing to N and local_lip on every nonempty cell.
BoundReport partitioned_bound(const BoundInputs& in, const Partition& partition, LipMode mode = LipMode::Composed);

/// The partitioned certificate for the single cell X x Y.
BoundReport global_bound(const BoundInputs& in, double global_lip, double domain_diam,
                         LipMode mode = LipMode::Composed);

/// Ramp-loss classification certificate on a paired partition over
/// X x {-1, +1} (d_Z = d). Composed mode expects Lip(ramp o f | P+-) per
/// paired cell; split mode expects Lip(f | P).
BoundReport classification_bound(const BoundInputs& in, const Partition& paired, double ramp_train_error,
                                 LipMode mode = LipMode::Split);

/// Structured-data variant: cost_transport = (C/N) sum N_P^{1-1/d~} K_P diam(P)
/// with a user-supplied constant C(d~).
BoundReport manifold_bound(const BoundInputs& in, const Partition& partition, LipMode mode = LipMode::Composed);

/// Global certificate plus L_loss * max{1, L_f} * W1(mu, mu_shifted).
BoundReport shift_bound(const BoundInputs& in, double global_lip, double domain_diam, bool shift_empirical,
                        LipMode mode = LipMode::Composed);

struct RademacherInputs {
  std::size_t d = 1;
  /// Sup-norm bound of the hypothesis class.
  double sup_bound = 1.0;
  /// X is contained in [0, B]^d.
  double domain_scale = 1.0;
  /// Lipschitz constant of the class.
  double class_lip = 1.0;
  double loss_lip = 1.0;
  double loss_sup = 1.0;
  std::size_t n = 1;
  double delta = 0.05;
};

struct RademacherTerms {
  double complexity_main = 0.0;
  double complexity_discretization = 0.0;
  double concentration = 0.0;
  double total = 0.0;
};

RademacherTerms rademacher_terms(const RademacherInputs& in);
double rademacher_bound(const RademacherInputs& in);
BoundReport rademacher_report(const RademacherInputs& in);

/// Closed forms for the one-neuron ReLU construction whose global certificate
/// diverges while the partitioned one converges.
struct DivergenceForms {
  std::uint64_t strips = 0;
  double local_cost_transport = 0.0;
  double local_err_transport = 0.0;
  double local_cost_partition = 0.0;
  double local_total = 0.0;
  double global_cost_transport = 0.0;
};

/// Requires N >= 16.
DivergenceForms divergence_closed_forms(std::uint64_t n, double loss_lip, double delta = 0.05,
                                        double loss_sup = 1.0);

/// CSV header shared by every experiment output.
std::string report_csv_header();
struct ReportRow {
  std::string experiment;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double delta = 0.0;
  std::size_t k = 0;
  std::vector<std::size_t> mesh_per_dim;
};
std::string report_csv_row(const BoundReport& r, const ReportRow& meta);

}  // namespace otcert
