#include "otcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "otcert/rates.hpp"

namespace otcert {

namespace {

struct CellTerm {
  std::size_t count;
  double diameter;
  double lip;
};

double regularity(const BoundInputs& in, double lip, LipMode mode) {
  return mode == LipMode::Composed ? std::max(in.loss_lip, lip) : in.loss_lip * std::max(1.0, lip);
}

double err_term(const BoundInputs& in, double max_diam) {
  return std::sqrt(std::log(4.0 / in.delta) / static_cast<double>(in.n)) * in.loss_lip *
         std::max(1.0, in.predictor_lip) * max_diam;
}

double partition_term(const BoundInputs& in, std::size_t k) {
  if (k == 1) return 0.0;
  const double n = static_cast<double>(in.n);
  return in.loss_sup * std::max(std::sqrt(2.0 * std::log(4.0 / in.delta) / n), std::sqrt(static_cast<double>(k) / n));
}

std::vector<CellTerm> cell_terms(const BoundInputs& in, const Partition& partition) {
  if (partition.total_count() != in.n)
    throw std::invalid_argument(fmt::format("cell counts sum to {} but N = {}", partition.total_count(), in.n));
  std::vector<CellTerm> out;
  out.reserve(partition.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const Cell& c = partition.cells()[i];
    if (c.count > 0 && !c.local_lip) throw std::invalid_argument(fmt::format("cell {} has samples but no local Lipschitz estimate", i));
    out.push_back({c.count, c.diameter, c.local_lip.value_or(0.0)});
  }
  return out;
}

void finish(BoundReport& r, double loss_sup) {
  r.total = r.train_error + r.cost_transport + r.err_transport + r.cost_partition + r.shift_term;
  r.provenance.vacuous = r.total > loss_sup;
}

// Sum over cells of (N_P / N) * C * rate(N_P) * diam(P) * K_P.
BoundReport assemble_partitioned(const BoundInputs& in, const std::vector<CellTerm>& cells, LipMode mode) {
  in.validate();
  const auto reg = RegularityClass::holder(1.0, static_cast<int>(in.input_dim + 1));
  const double c = holder_constant(reg);
  const double n = static_cast<double>(in.n);
  std::vector<double> terms;
  terms.reserve(cells.size());
  double max_diam = 0.0;
  for (const auto& cell : cells) {
    max_diam = std::max(max_diam, cell.diameter);
    if (cell.count == 0) continue;
    terms.push_back(static_cast<double>(cell.count) / n * c * holder_rate(reg, cell.count) * cell.diameter *
                    regularity(in, cell.lip, mode));
  }
  BoundReport r;
  r.cost_transport = pairwise_sum(terms);
  r.err_transport = err_term(in, max_diam);
  r.cost_partition = partition_term(in, cells.size());
  r.provenance.partition_size = cells.size();
  r.provenance.lip_mode = mode;
  r.provenance.constants = {{"C", c}, {"d_Z", static_cast<double>(in.input_dim + 1)}};
  r.provenance.notes.push_back(fmt::format("rate regime {}", to_string(reg.regime())));
  finish(r, in.loss_sup);
  return r;
}

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Partitioned: return "partitioned";
    case BoundKind::Global: return "global";
    case BoundKind::Classification: return "classification";
    case BoundKind::Manifold: return "manifold";
    case BoundKind::Shift: return "shift";
    case BoundKind::Rademacher: return "rademacher";
    case BoundKind::DivergenceLocal: return "divergence_local";
    case BoundKind::DivergenceGlobal: return "divergence_global";
  }
  return "unknown";
}

std::string to_string(LipMode m) { return m == LipMode::Composed ? "composed" : "split"; }

void BoundInputs::validate() const {
  if (n == 0) throw std::invalid_argument("N must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(loss_lip > 0.0) || !std::isfinite(loss_lip)) throw std::invalid_argument("loss Lipschitz constant must be positive");
  if (!(predictor_lip >= 0.0) || !std::isfinite(predictor_lip))
    throw std::invalid_argument("predictor Lipschitz constant must be finite and nonnegative");
  if (!(loss_sup > 0.0) || !std::isfinite(loss_sup)) throw std::invalid_argument("loss bound must be positive");
  if (input_dim == 0) throw std::invalid_argument("input dimension must be positive");
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("ramp margin must be positive");
  if (shift_w1 && !(*shift_w1 >= 0.0)) throw std::invalid_argument("shift distance must be nonnegative");
}

double pairwise_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level = values;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 2 * i + 1 < level.size() ? level[2 * i] + level[2 * i + 1] : level[2 * i];
    level.swap(next);
  }
  return level[0];
}

BoundReport partitioned_bound(const BoundInputs& in, const Partition& partition, LipMode mode) {
  BoundReport r = assemble_partitioned(in, cell_terms(in, partition), mode);
  r.kind = BoundKind::Partitioned;
  return r;
}

BoundReport global_bound(const BoundInputs& in, double global_lip, double domain_diam, LipMode mode) {
  if (!(domain_diam > 0.0)) throw std::invalid_argument("domain diameter must be positive");
  if (!(global_lip >= 0.0)) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  BoundReport r = assemble_partitioned(in, {{in.n, domain_diam, global_lip}}, mode);
  r.kind = BoundKind::Global;
  return r;
}

BoundReport classification_bound(const BoundInputs& in, const Partition& paired, double ramp_train_error,
                                 LipMode mode) {
  in.validate();
  if (!in.gamma) throw std::invalid_argument("classification bound needs the ramp margin gamma");
  if (!paired.paired()) throw std::invalid_argument("classification bound needs a paired partition");
  if (!(ramp_train_error >= 0.0)) throw std::invalid_argument("ramp training error must be nonnegative");
  const auto cells = cell_terms(in, paired);
  const std::size_t k = paired.size() / 2;
  const double gamma = *in.gamma;
  const auto d = static_cast<int>(in.input_dim);
  const auto reg = RegularityClass::holder(1.0, d);
  const double c = holder_constant(reg);
  const double n = static_cast<double>(in.n);

  std::vector<double> terms;
  double max_diam = 0.0;
  for (const auto& cell : cells) max_diam = std::max(max_diam, cell.diameter);
  BoundReport r;
  if (mode == LipMode::Composed) {
    for (const auto& cell : cells)
      if (cell.count > 0)
        terms.push_back(static_cast<double>(cell.count) / n * c * holder_rate(reg, cell.count) * cell.diameter * cell.lip);
    r.cost_transport = pairwise_sum(terms);
  } else {
    const double factor = std::pow(2.0, 1.0 / d) * c / gamma;
    for (std::size_t i = 0; i < k; ++i) {
      const CellTerm& minus = cells[i];
      const CellTerm& plus = cells[k + i];
      const std::size_t np = minus.count + plus.count;
      if (np == 0) continue;
      const double lip = std::max(minus.count ? minus.lip : 0.0, plus.count ? plus.lip : 0.0);
      terms.push_back(static_cast<double>(np) / n * holder_rate(reg, np) * lip * minus.diameter);
    }
    r.cost_transport = factor * pairwise_sum(terms);
  }
  r.train_error = ramp_train_error;
  r.err_transport = std::sqrt(std::log(4.0 / in.delta) / n) * (in.predictor_lip / gamma) * max_diam;
  r.cost_partition =
      std::sqrt(2.0 / n) * std::max(std::sqrt(std::log(4.0 / in.delta)), std::sqrt(static_cast<double>(k)));
  r.kind = BoundKind::Classification;
  r.provenance.partition_size = paired.size();
  r.provenance.lip_mode = mode;
  r.provenance.constants = {{"C", c}, {"d_Z", static_cast<double>(d)}, {"gamma", gamma}};
  r.provenance.notes.push_back(fmt::format("rate regime {}", to_string(reg.regime())));
  r.provenance.notes.push_back("partition term uses sqrt(k); the derivation through the paired partition carries sqrt(2k)");
  finish(r, in.loss_sup);
  return r;
}

BoundReport manifold_bound(const BoundInputs& in, const Partition& partition, LipMode mode) {
  in.validate();
  if (!in.intrinsic_dim || *in.intrinsic_dim == 0) throw std::invalid_argument("manifold bound needs an intrinsic dimension");
  if (!in.manifold_constant || !(*in.manifold_constant > 0.0))
    throw std::invalid_argument("manifold bound needs a positive constant C(d~)");
  const auto cells = cell_terms(in, partition);
  const double exponent = 1.0 - 1.0 / static_cast<double>(*in.intrinsic_dim);
  const double n = static_cast<double>(in.n);
  std::vector<double> terms;
  double max_diam = 0.0;
  for (const auto& cell : cells) {
    max_diam = std::max(max_diam, cell.diameter);
    if (cell.count == 0) continue;
    terms.push_back(std::pow(static_cast<double>(cell.count), exponent) * regularity(in, cell.lip, mode) * cell.diameter);
  }
  BoundReport r;
  r.kind = BoundKind::Manifold;
  r.cost_transport = *in.manifold_constant / n * pairwise_sum(terms);
  r.err_transport = err_term(in, max_diam);
  r.cost_partition = partition_term(in, cells.size());
  r.provenance.partition_size = cells.size();
  r.provenance.lip_mode = mode;
  r.provenance.constant_user_supplied = true;
  r.provenance.constants = {{"C", *in.manifold_constant}, {"d_tilde", static_cast<double>(*in.intrinsic_dim)}};
  finish(r, in.loss_sup);
  return r;
}

BoundReport shift_bound(const BoundInputs& in, double global_lip, double domain_diam, bool shift_empirical,
                        LipMode mode) {
  if (!in.shift_w1) throw std::invalid_argument("shift bound needs W1(mu, mu_shifted)");
  BoundReport r = global_bound(in, global_lip, domain_diam, mode);
  r.kind = BoundKind::Shift;
  r.shift_term = in.loss_lip * std::max(1.0, in.predictor_lip) * *in.shift_w1;
  r.provenance.shift_empirical = shift_empirical;
  finish(r, in.loss_sup);
  return r;
}

RademacherTerms rademacher_terms(const RademacherInputs& in) {
  if (in.d == 0 || in.n == 0) throw std::invalid_argument("dimension and N must be positive");
  for (double v : {in.sup_bound, in.domain_scale, in.class_lip, in.loss_lip, in.loss_sup})
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("Rademacher inputs must be positive and finite");
  if (!(in.delta > 0.0 && in.delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double d = static_cast<double>(in.d);
  const double n = static_cast<double>(in.n);
  const double big_d = in.sup_bound;
  const double cover = std::pow(16.0 * in.domain_scale * in.class_lip, d);
  const double p = 1.0 / (d + 3.0);
  RademacherTerms t;
  t.complexity_main = 4.0 * in.loss_lip * std::pow(8.0 * (d + 1.0) * (d + 1.0) * big_d * big_d * cover / n, p);
  t.complexity_discretization = 16.0 * in.loss_lip * std::sqrt(2.0) * big_d *
                                std::pow(cover / n / std::pow(8.0 * (d + 1.0) * big_d, d + 1.0), p);
  t.concentration = in.loss_sup * std::sqrt(8.0 * std::log(2.0 / in.delta) / n);
  t.total = t.complexity_main + t.complexity_discretization + t.concentration;
  return t;
}

double rademacher_bound(const RademacherInputs& in) { return rademacher_terms(in).total; }

BoundReport rademacher_report(const RademacherInputs& in) {
  const RademacherTerms t = rademacher_terms(in);
  BoundReport r;
  r.kind = BoundKind::Rademacher;
  r.cost_transport = t.complexity_main + t.complexity_discretization;
  r.cost_partition = t.concentration;
  r.total = t.total;
  r.provenance.partition_size = 1;
  r.provenance.vacuous = r.total > in.loss_sup;
  r.provenance.constants = {{"D", in.sup_bound}, {"B", in.domain_scale}, {"L", in.class_lip}};
  r.provenance.notes.push_back("complexity terms reported under cost_transport, concentration under cost_partition");
  return r;
}

DivergenceForms divergence_closed_forms(std::uint64_t n, double loss_lip, double delta, double loss_sup) {
  if (n < 16) throw std::invalid_argument("closed forms need N >= 16");
  if (!(loss_lip > 0.0)) throw std::invalid_argument("loss Lipschitz constant must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double nn = static_cast<double>(n);
  const double c21 = holder_constant(RegularityClass::holder(1.0, 2));
  const double loglog = std::log2(std::log2(nn));
  const double l4 = std::log(4.0 / delta);
  DivergenceForms f;
  f.strips = divergence_strip_count(n);
  f.local_cost_transport = 8.0 * std::sqrt(2.0) * c21 * loss_lip / (loglog * std::pow(nn, 0.1));
  f.local_err_transport = std::sqrt(2.0) * loss_lip * std::sqrt(l4) / loglog;
  f.local_cost_partition =
      loss_sup / std::sqrt(nn) * std::max(std::sqrt(2.0 * l4), std::sqrt(2.0 * static_cast<double>(f.strips) - 1.0));
  f.local_total = f.local_cost_transport + f.local_err_transport + f.local_cost_partition;
  f.global_cost_transport = std::sqrt(2.0) * c21 * loss_lip * (8.0 + std::log2(nn));
  return f;
}

std::string report_csv_header() {
  return "experiment,config_hash,theorem,N,delta,k,cost_transport,err_transport,cost_partition,shift_term,total,"
         "vacuous,mesh_per_dim,seed";
}

std::string report_csv_row(const BoundReport& r, const ReportRow& meta) {
  std::string mesh;
  for (std::size_t i = 0; i < meta.mesh_per_dim.size(); ++i) mesh += (i ? "x" : "") + std::to_string(meta.mesh_per_dim[i]);
  if (mesh.empty()) mesh = "-";
  return fmt::format("{},{},{},{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{}", meta.experiment,
                     meta.config_hash, to_string(r.kind), meta.n, meta.delta, meta.k, r.cost_transport, r.err_transport,
                     r.cost_partition, r.shift_term, r.total, r.provenance.vacuous ? 1 : 0, mesh, meta.seed);
}

}  // namespace otcert
