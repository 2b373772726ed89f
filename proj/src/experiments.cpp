#include "otcert/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "otcert/partition.hpp"
#include "otcert/random.hpp"
#include "otcert/rates.hpp"
#include "otcert/train.hpp"
#include "otcert/transport.hpp"

namespace otcert {

namespace {

constexpr std::uint64_t kShiftStream = 5;
constexpr double kTiny = 1e-12;

// Runs fn(i) for i in [0, count) on a small pool; callers write results into
// per-index slots so output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Job {
  std::size_t n;
  std::uint64_t seed;
};

std::vector<Job> jobs_of(const RunConfig& c) {
  std::vector<Job> jobs;
  for (auto n : c.n_list)
    for (auto s : c.seeds) jobs.push_back({n, s});
  return jobs;
}

std::size_t input_dim_of(TaskKind t) { return t == TaskKind::Regression ? 1 : 2; }

std::string cells_label(std::span<const std::size_t> cells) { return fmt::format("{}x{}", cells[0], cells[1]); }

BoundInputs base_inputs(const RunConfig& c, const TrainedInstance& inst, const InstanceProbe& probe) {
  BoundInputs in;
  in.n = inst.data.size();
  in.delta = c.delta;
  in.predictor_lip = probe.predictor_lip;
  in.loss_sup = probe.loss_sup;
  in.input_dim = input_dim_of(inst.task);
  if (inst.task == TaskKind::Regression) {
    in.loss_lip = 1.0;
  } else {
    in.loss_lip = 1.0 / c.gamma;
    in.gamma = c.gamma;
  }
  return in;
}

double joint_diameter(TaskKind t) { return task_joint_domain(t).diameter(); }

std::vector<std::string> base_header() {
  std::vector<std::string> h;
  const std::string s = report_csv_header();
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    h.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return h;
}

std::vector<std::string> base_row(const RunConfig& c, const BoundReport& r, std::size_t n, std::uint64_t seed,
                                  std::size_t k) {
  ReportRow meta{to_string(c.experiment), c.hash(), seed, n, c.delta, k, c.mesh_per_dim()};
  const std::string s = report_csv_row(r, meta);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

RunConfig for_experiment(const RunConfig& config, Experiment e) {
  RunConfig c = config;
  c.experiment = e;
  c.validate();
  return c;
}

BoundReport with_train_error(BoundReport r, double e) {
  r.train_error = e;
  r.total = r.train_error + r.cost_transport + r.err_transport + r.cost_partition + r.shift_term;
  return r;
}

}  // namespace

TrainedInstance train_instance(TaskKind task, std::size_t n, std::uint64_t seed, const TrainConfig& train,
                               std::optional<std::size_t> early_stop_at) {
  TrainedInstance inst;
  inst.task = task;
  inst.seed = seed;
  inst.data = synth_dataset(task, n, seed);
  TrainConfig tc = train;
  tc.seed = seed;
  inst.model = otcert::train(inst.data, tc, training_loss(task), task_input_domain(task), early_stop_at).model;
  return inst;
}

InstanceProbe probe_instance(const RunConfig& c, const TrainedInstance& inst) {
  const Box domain = task_input_domain(inst.task);
  const auto mesh = c.mesh_per_dim();
  InstanceProbe p;
  p.predictor = grad_norm_field(inst.model, std::nullopt, domain, mesh);
  p.predictor_lip = global_lipschitz(p.predictor);

  const Points pts = uniform_mesh(domain, mesh);
  Eigen::Map<const Eigen::MatrixXd> in(pts.flat().data(), static_cast<Eigen::Index>(domain.dim()),
                                       static_cast<Eigen::Index>(pts.size()));
  const Eigen::RowVectorXd values = mlp_forward_batch(inst.model, in);
  p.prediction_min = values.minCoeff();
  p.prediction_max = values.maxCoeff();

  if (inst.task == TaskKind::Regression) {
    const Box joint = task_joint_domain(inst.task);
    p.composed = grad_norm_field(inst.model, LossKind::huber(), domain, mesh,
                                 LabelGrid::linspace(joint.lower[1], joint.upper[1], c.label_mesh));
    const double worst = std::max(p.prediction_max - joint.lower[1], joint.upper[1] - p.prediction_min);
    p.loss_sup = std::max(loss_eval(LossKind::huber(), 0.0, std::max(worst, 0.0)), kTiny);
  } else {
    p.composed = grad_norm_field(inst.model, LossKind::ramp(c.gamma), domain, mesh, LabelGrid::signs());
    p.loss_sup = 1.0;
  }
  p.composed_lip = global_lipschitz(p.composed);
  return p;
}

Partition task_partition(TaskKind task, std::span<const std::size_t> cells) {
  if (task == TaskKind::Regression) return build_grid_partition(task_joint_domain(task), cells, 1);
  return build_paired_partition(build_grid_partition(task_input_domain(task), cells));
}

Points joint_samples(const Dataset& data) {
  const std::size_t d = data.x.dim();
  Points out(d + 1);
  out.reserve(data.size());
  std::vector<double> p(d + 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::copy_n(data.x[i].begin(), d, p.begin());
    p[d] = data.y[i];
    out.push_back(p);
  }
  return out;
}

Certificate certify(const RunConfig& c, const TrainedInstance& inst, const InstanceProbe& probe,
                    std::span<const std::size_t> cells) {
  Certificate cert;
  const BoundInputs in = base_inputs(c, inst, probe);
  const GradField& field = c.lip_mode == LipMode::Composed ? probe.composed : probe.predictor;
  Partition part = assign_counts(task_partition(inst.task, cells), joint_samples(inst.data));
  part = local_lipschitz(field, std::move(part));
  const double global_lip = c.lip_mode == LipMode::Composed ? probe.composed_lip : probe.predictor_lip;

  RademacherInputs rin;
  rin.d = in.input_dim;
  rin.sup_bound = std::max({std::abs(probe.prediction_min), std::abs(probe.prediction_max), kTiny});
  rin.domain_scale = task_input_domain(inst.task).upper[0] - task_input_domain(inst.task).lower[0];
  rin.class_lip = std::max(probe.predictor_lip, kTiny);
  rin.loss_lip = in.loss_lip;
  rin.loss_sup = in.loss_sup;
  rin.n = in.n;
  rin.delta = in.delta;

  if (inst.task == TaskKind::Regression) {
    cert.train_risk = empirical_risk(inst.model, LossKind::huber(), inst.data);
    cert.local = partitioned_bound(in, part, c.lip_mode);
    cert.global = global_bound(in, global_lip, joint_diameter(inst.task), c.lip_mode);
    cert.rademacher = rademacher_report(rin);
  } else {
    cert.train_risk = empirical_risk(inst.model, LossKind::ramp(c.gamma), inst.data);
    cert.local = classification_bound(in, part, cert.train_risk, c.lip_mode);
    cert.global = with_train_error(global_bound(in, global_lip, joint_diameter(inst.task), c.lip_mode), cert.train_risk);
    cert.rademacher = with_train_error(rademacher_report(rin), cert.train_risk);
  }
  for (BoundReport* r : {&cert.local, &cert.global, &cert.rademacher}) {
    r->provenance.mesh_per_dim = c.mesh_per_dim();
    r->provenance.vacuous = r->total > in.loss_sup;
  }
  cert.partition_size = inst.task == TaskKind::Regression ? part.size() : part.size() / 2;
  cert.test_risk = std::numeric_limits<double>::quiet_NaN();
  cert.partition = std::move(part);
  return cert;
}

double held_out_risk(const RunConfig& c, const TrainedInstance& inst) {
  const Dataset test = synth_dataset(inst.task, c.test_samples, inst.seed, kTestStream);
  if (inst.task == TaskKind::Regression) return empirical_risk(inst.model, LossKind::huber(), test);
  return zero_one_risk(inst.model, test);
}

CsvTable run_bound(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::Bound);
  const auto cells = c.bound_cells();
  CsvTable t(concat(base_header(), {"task", "cells", "train_risk", "test_risk", "gap", "predictor_lip",
                                    "composed_lip", "loss_sup"}));
  const auto jobs = jobs_of(c);
  std::vector<std::vector<std::vector<std::string>>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto inst = train_instance(c.task, jobs[j].n, jobs[j].seed, c.train_config(jobs[j].seed));
    const auto probe = probe_instance(c, inst);
    Certificate cert = certify(c, inst, probe, cells);
    const double test = held_out_risk(c, inst);
    const std::vector<std::string> extra{to_string(c.task),
                                         cells_label(cells),
                                         format_number(cert.train_risk),
                                         format_number(test),
                                         format_number(test - cert.train_risk),
                                         format_number(probe.predictor_lip),
                                         format_number(probe.composed_lip),
                                         format_number(probe.loss_sup)};
    for (const BoundReport* r : {&cert.local, &cert.global, &cert.rademacher}) {
      const std::size_t k = r == &cert.local ? cert.partition_size : 1;
      rows[j].push_back(concat(base_row(c, *r, jobs[j].n, jobs[j].seed, k), extra));
    }
  });
  for (auto& group : rows)
    for (auto& r : group) t.add_row(std::move(r));
  return t;
}

CsvTable run_partition_sweep(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::PartitionSweep);
  CsvTable t(concat(base_header(), {"task", "cells_x", "cells_y", "global_total", "rademacher_total", "train_risk"}));
  const auto jobs = jobs_of(c);
  std::vector<std::vector<std::vector<std::string>>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto inst = train_instance(c.task, jobs[j].n, jobs[j].seed, c.train_config(jobs[j].seed));
    const auto probe = probe_instance(c, inst);
    const std::vector<std::size_t> ys =
        c.task == TaskKind::Regression ? c.label_cells : std::vector<std::size_t>{0};
    for (auto my : ys) {
      for (auto g : c.granularities) {
        const std::vector<std::size_t> cells{g, my == 0 ? g : my};
        const Certificate cert = certify(c, inst, probe, cells);
        rows[j].push_back(concat(base_row(c, cert.local, jobs[j].n, jobs[j].seed, cert.partition_size),
                                 {to_string(c.task), std::to_string(cells[0]), std::to_string(cells[1]),
                                  format_number(cert.global.total), format_number(cert.rademacher.total),
                                  format_number(cert.train_risk)}));
      }
    }
  });
  for (auto& group : rows)
    for (auto& r : group) t.add_row(std::move(r));
  return t;
}

CsvTable run_size_sweep(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::SizeSweep);
  const auto cells = c.size_sweep_cells();
  CsvTable t(concat(base_header(), {"task", "cells", "width", "depth", "params", "global_total", "train_risk",
                                    "test_risk"}));
  struct SizeJob {
    Job job;
    std::size_t width, depth;
  };
  std::vector<SizeJob> jobs;
  for (const auto& j : jobs_of(c))
    for (auto d : c.sweep_depths)
      for (auto w : c.sweep_widths) jobs.push_back({j, w, d});
  std::vector<std::vector<std::string>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& sj = jobs[i];
    TrainConfig tc = c.train_config(sj.job.seed);
    tc.hidden.assign(sj.depth, sj.width);
    const auto inst = train_instance(c.task, sj.job.n, sj.job.seed, tc);
    const auto probe = probe_instance(c, inst);
    const Certificate cert = certify(c, inst, probe, cells);
    const double test = held_out_risk(c, inst);
    rows[i] = concat(base_row(c, cert.local, sj.job.n, sj.job.seed, cert.partition_size),
                     {to_string(c.task), cells_label(cells), std::to_string(sj.width), std::to_string(sj.depth),
                      std::to_string(inst.model.parameter_count()), format_number(cert.global.total),
                      format_number(cert.train_risk), format_number(test)});
  });
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

CsvTable run_reg_sweep(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::RegSweep);
  const auto cells = c.bound_cells();
  CsvTable t(concat(base_header(), {"task", "cells", "reg_kind", "reg_value", "global_total", "train_risk",
                                    "test_risk"}));
  struct RegJob {
    Job job;
    double value;
  };
  std::vector<RegJob> jobs;
  for (const auto& j : jobs_of(c))
    for (double v : c.reg_values) jobs.push_back({j, v});
  std::vector<std::vector<std::string>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& rj = jobs[i];
    TrainConfig tc = c.train_config(rj.job.seed);
    std::optional<std::size_t> stop;
    switch (c.reg_kind) {
      case RegKind::WeightDecay: tc.weight_decay = rj.value; break;
      case RegKind::Adversarial: tc.adv_eps = rj.value; break;
      case RegKind::EarlyStop:
        if (!(rj.value >= 1.0)) throw std::invalid_argument("early-stop iterations must be at least 1");
        stop = static_cast<std::size_t>(rj.value);
        break;
    }
    const auto inst = train_instance(c.task, rj.job.n, rj.job.seed, tc, stop);
    const auto probe = probe_instance(c, inst);
    const Certificate cert = certify(c, inst, probe, cells);
    const double test = held_out_risk(c, inst);
    rows[i] = concat(base_row(c, cert.local, rj.job.n, rj.job.seed, cert.partition_size),
                     {to_string(c.task), cells_label(cells), to_string(c.reg_kind), format_number(rj.value),
                      format_number(cert.global.total), format_number(cert.train_risk), format_number(test)});
  });
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

CsvTable run_shift(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::Shift);
  CsvTable t(concat(base_header(), {"task", "shift_norm", "w1", "lip_factor", "shift_ratio"}));
  const auto jobs = jobs_of(c);
  std::vector<std::vector<std::vector<std::string>>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto inst = train_instance(c.task, jobs[j].n, jobs[j].seed, c.train_config(jobs[j].seed));
    const auto probe = probe_instance(c, inst);
    BoundInputs in = base_inputs(c, inst, probe);
    const double global_lip = c.lip_mode == LipMode::Composed ? probe.composed_lip : probe.predictor_lip;
    const double factor = in.loss_lip * std::max(1.0, in.predictor_lip);
    const std::size_t d = in.input_dim;
    for (double norm : c.shift_norms) {
      // Paired draws x_i and x_i + v with v along the diagonal.
      const Dataset base = synth_dataset(c.task, c.shift_samples, jobs[j].seed, kShiftStream);
      Points moved(d);
      moved.reserve(base.size());
      std::vector<double> p(d);
      for (std::size_t i = 0; i < base.size(); ++i) {
        for (std::size_t a = 0; a < d; ++a) p[a] = base.x[i][a] + norm / std::sqrt(static_cast<double>(d));
        moved.push_back(p);
      }
      const double w1 = w_alpha(EmpiricalMeasure::uniform(base.x), EmpiricalMeasure::uniform(moved), 1.0);
      in.shift_w1 = w1;
      const BoundReport r = shift_bound(in, global_lip, joint_diameter(c.task), true, c.lip_mode);
      rows[j].push_back(concat(base_row(c, r, jobs[j].n, jobs[j].seed, 1),
                               {to_string(c.task), format_number(norm), format_number(w1), format_number(factor),
                                format_number(norm > 0.0 ? r.shift_term / (factor * norm) : 0.0)}));
    }
  });
  for (auto& group : rows)
    for (auto& r : group) t.add_row(std::move(r));
  return t;
}

CsvTable run_concentration(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::Concentration);
  CsvTable t({"experiment", "config_hash", "seed", "N", "dim", "alpha", "trials", "reference_factor", "mean",
              "stderr", "envelope", "constant", "rate", "regime", "within_envelope"});
  const std::size_t dim = c.conc_dim;
  const PointSampler sampler = [dim](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(dim);
    for (auto& v : p) v = u(rng);
    return p;
  };
  const auto reg = RegularityClass::holder(c.alpha, static_cast<int>(dim));
  const double constant = holder_constant(reg);
  const double diam = std::sqrt(static_cast<double>(dim));
  for (auto seed : c.seeds) {
    for (auto n : c.conc_n) {
      const McEstimate est = mc_wasserstein_mean(sampler, n, c.trials, c.alpha, seed, {c.reference_factor, 0});
      const double rate = holder_rate(reg, n);
      const double envelope = constant * diam * rate;
      t.add_row({to_string(c.experiment), c.hash(), std::to_string(seed), std::to_string(n), std::to_string(dim),
                 format_number(c.alpha), std::to_string(c.trials), std::to_string(c.reference_factor),
                 format_number(est.mean), format_number(est.stderr_of_mean), format_number(envelope),
                 format_number(constant), format_number(rate), to_string(reg.regime()),
                 est.mean <= envelope ? "1" : "0"});
    }
  }
  return t;
}

MlpModel divergence_network(std::uint64_t n) {
  if (n < 16) throw std::invalid_argument("the one-neuron construction needs N >= 16");
  const double nn = static_cast<double>(n);
  MlpModel m = MlpModel::zeros({1, 1, 1});
  m.negative_slope = 0.0;
  m.weights[0](0, 0) = 1.0;
  m.biases[0](0) = -1.0 + 1.0 / nn;
  m.weights[1](0, 0) = std::sqrt(nn) / std::log2(std::log2(nn));
  return m;
}

CsvTable run_divergence(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::Divergence);
  CsvTable t({"experiment", "config_hash", "seed", "N", "delta", "strips", "k", "local_cost_transport",
              "local_err_transport", "local_cost_partition", "local_total", "global_cost_transport",
              "lip_strip_max", "lip_column_min", "lip_expected"});
  const std::uint64_t seed = c.seeds.front();
  for (auto n : c.divergence_n) {
    const DivergenceForms f = divergence_closed_forms(n, 1.0, c.delta, 1.0);
    // Empirical local slopes of f_N on its partition; the mesh resolves every strip.
    const MlpModel net = divergence_network(n);
    const std::size_t mesh = std::max<std::size_t>(512, 4 * f.strips);
    const std::vector<std::size_t> mesh_dims{mesh};
    const GradField field = grad_norm_field(net, std::nullopt, Box({0.0}, {1.0}), mesh_dims);
    const Partition part = local_lipschitz(field, build_divergence_partition(n));
    double strip_max = 0.0, column_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < part.size(); ++i) {
      const double v = *part.cells()[i].local_lip;
      if (i + 1 < f.strips) {
        strip_max = std::max(strip_max, v);
      } else {
        column_min = std::min(column_min, v);
      }
    }
    t.add_row({to_string(c.experiment), c.hash(), std::to_string(seed), std::to_string(n), format_number(c.delta),
               std::to_string(f.strips), std::to_string(part.size()), format_number(f.local_cost_transport),
               format_number(f.local_err_transport), format_number(f.local_cost_partition),
               format_number(f.local_total), format_number(f.global_cost_transport), format_number(strip_max),
               format_number(column_min), format_number(net.weights[1](0, 0))});
  }
  return t;
}

CsvTable run_heatmap(const RunConfig& config) {
  const RunConfig c = for_experiment(config, Experiment::Heatmap);
  const auto cells = c.bound_cells();
  CsvTable t({"experiment", "config_hash", "seed", "N", "task", "cell_x", "cell_y", "x_center", "y_center", "count",
              "local_lip", "value", "transport_contribution"});
  const auto jobs = jobs_of(c);
  std::vector<std::vector<std::vector<std::string>>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto inst = train_instance(c.task, jobs[j].n, jobs[j].seed, c.train_config(jobs[j].seed));
    const auto probe = probe_instance(c, inst);
    const Certificate cert = certify(c, inst, probe, cells);
    const double n = static_cast<double>(inst.data.size());
    const bool cls = inst.task == TaskKind::Classification;
    // d_Z = 2 for both tasks: X x Y for regression, X for classification.
    const auto reg = RegularityClass::holder(1.0, 2);
    const double cst = holder_constant(reg);
    const BoundInputs in = base_inputs(c, inst, probe);
    const std::size_t base = cls ? cert.partition.size() / 2 : cert.partition.size();
    for (std::size_t i = 0; i < base; ++i) {
      // Classification cells aggregate the two label slices of an input cell.
      std::vector<std::size_t> members{i};
      if (cls) members.push_back(base + i);
      double value = 0.0, contribution = 0.0, lip = 0.0, occupied_lip = 0.0;
      std::size_t count = 0;
      for (auto m : members) {
        const Cell& cell = cert.partition.cells()[m];
        const double l = cell.local_lip.value_or(0.0);
        lip = std::max(lip, l);
        if (cell.count > 0) occupied_lip = std::max(occupied_lip, l);
        count += cell.count;
        value += l * cell.diameter * std::sqrt(static_cast<double>(cell.count)) / n;
        if (cls && c.lip_mode == LipMode::Split) continue;
        const double k = cls ? l : (c.lip_mode == LipMode::Composed ? std::max(in.loss_lip, l)
                                                                     : in.loss_lip * std::max(1.0, l));
        contribution += static_cast<double>(cell.count) / n * cst * holder_rate(reg, cell.count) * cell.diameter * k;
      }
      if (cls && c.lip_mode == LipMode::Split) {
        const Cell& cell = cert.partition.cells()[i];
        contribution = std::pow(2.0, 0.5) * cst / c.gamma * static_cast<double>(count) / n *
                       holder_rate(reg, count) * occupied_lip * cell.diameter;
      }
      const Box& b = cert.partition.cells()[i].box;
      const std::size_t cy = cells[1];
      rows[j].push_back({to_string(c.experiment), c.hash(), std::to_string(jobs[j].seed), std::to_string(jobs[j].n),
                         to_string(c.task), std::to_string(i / cy), std::to_string(i % cy),
                         format_number(0.5 * (b.lower[0] + b.upper[0])), format_number(0.5 * (b.lower[1] + b.upper[1])),
                         std::to_string(count), format_number(lip), format_number(value),
                         format_number(contribution)});
    }
  });
  for (auto& group : rows)
    for (auto& r : group) t.add_row(std::move(r));
  return t;
}

CsvTable run_experiment(const RunConfig& c) {
  switch (c.experiment) {
    case Experiment::Bound: return run_bound(c);
    case Experiment::PartitionSweep: return run_partition_sweep(c);
    case Experiment::SizeSweep: return run_size_sweep(c);
    case Experiment::RegSweep: return run_reg_sweep(c);
    case Experiment::Shift: return run_shift(c);
    case Experiment::Concentration: return run_concentration(c);
    case Experiment::Divergence: return run_divergence(c);
    case Experiment::Heatmap: return run_heatmap(c);
  }
  throw std::invalid_argument("unknown experiment");
}

CsvTable summarize(const CsvTable& table, const std::vector<std::string>& keys,
                   const std::vector<std::string>& value_columns) {
  std::vector<std::string> header = keys;
  header.push_back("seeds");
  for (const auto& v : value_columns) {
    header.push_back(v + "_mean");
    header.push_back(v + "_stderr");
  }
  CsvTable out(header);
  // Groups keep first-appearance order.
  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> key;
    for (const auto& k : keys) key.push_back(table.at(r, k));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r);
  }
  for (const auto& key : order) {
    const auto& members = groups[key];
    std::vector<std::string> row = key;
    row.push_back(std::to_string(members.size()));
    for (const auto& v : value_columns) {
      double sum = 0.0;
      for (auto r : members) sum += table.number(r, v);
      const double mean = sum / static_cast<double>(members.size());
      double ss = 0.0;
      for (auto r : members) ss += (table.number(r, v) - mean) * (table.number(r, v) - mean);
      const double se = members.size() > 1
                            ? std::sqrt(ss / static_cast<double>(members.size() - 1) / static_cast<double>(members.size()))
                            : 0.0;
      row.push_back(format_number(mean));
      row.push_back(format_number(se));
    }
    out.add_row(std::move(row));
  }
  return out;
}

}  // namespace otcert
