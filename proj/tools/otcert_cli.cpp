#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "otcert/config.hpp"
#include "otcert/csv.hpp"
#include "otcert/experiments.hpp"
#include "otcert/plot.hpp"

namespace fs = std::filesystem;
using namespace otcert;

namespace {

struct Outputs {
  std::vector<std::string> keys;
  std::vector<std::string> values;
  PlotSpec plot;
};

// Summary grouping and default chart per experiment.
std::optional<Outputs> outputs_for(Experiment e) {
  switch (e) {
    case Experiment::Bound:
      return Outputs{{"theorem", "N"}, {"total", "train_risk", "test_risk", "gap"},
                     {"N", "total_mean", "theorem", "total_stderr", true, true, "certificate vs N"}};
    case Experiment::PartitionSweep:
      return Outputs{{"N", "cells_y", "cells_x"}, {"total", "global_total", "rademacher_total"},
                     {"cells_x", "total_mean", "N", "total_stderr", true, true, "partitioned certificate vs cells"}};
    case Experiment::SizeSweep:
      return Outputs{{"N", "width", "depth", "params"}, {"total", "test_risk"},
                     {"params", "total_mean", "N", "total_stderr", true, false, "certificate vs parameter count"}};
    case Experiment::RegSweep:
      return Outputs{{"N", "reg_value"}, {"total", "train_risk", "test_risk"},
                     {"reg_value", "total_mean", "N", "total_stderr", false, false, "certificate vs regularization"}};
    case Experiment::Shift:
      return Outputs{{"N", "shift_norm"}, {"shift_term", "w1", "total"},
                     {"shift_norm", "shift_term_mean", "N", "shift_term_stderr", false, false, "shift term"}};
    case Experiment::Concentration:
      return Outputs{{"N"}, {"mean", "envelope"},
                     {"N", "mean_mean", std::nullopt, "mean_stderr", true, true, "empirical W mean"}};
    case Experiment::Divergence:
      return Outputs{{"N"}, {"local_total", "global_cost_transport"},
                     {"N", "local_total_mean", std::nullopt, std::nullopt, true, true, "partitioned certificate"}};
    case Experiment::Heatmap:
      return std::nullopt;
  }
  return std::nullopt;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void run(const RunConfig& config) {
  const std::string name = to_string(config.experiment);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  write_text(dir / (name + ".config.txt"), fmt::format("config_hash={}\n{}", config.hash(), config.canonical()));
  const CsvTable table = run_experiment(config);
  table.write((dir / (name + ".csv")).string());
  std::cout << (dir / (name + ".csv")).string() << '\n';
  if (const auto o = outputs_for(config.experiment)) {
    const CsvTable summary = summarize(table, o->keys, o->values);
    summary.write((dir / (name + "_summary.csv")).string());
    write_text(dir / (name + ".svg"), render_svg(summary, o->plot));
    std::cout << (dir / (name + "_summary.csv")).string() << '\n' << (dir / (name + ".svg")).string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-transport generalization certificates for small networks"};
  app.set_config("--config", "", "key = value file with any of the options below");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string task = "regression", lip_mode = "composed", reg_kind = "weight_decay";
  app.add_option("--task", task, "regression or classification")->capture_default_str();
  app.add_option("--seeds", cfg.seeds, "seed list")->delimiter(',')->capture_default_str();
  app.add_option("--n", cfg.n_list, "training set sizes")->delimiter(',')->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_flag("--full-scale", cfg.full_scale, "20000 training iterations");
  app.add_option("--delta", cfg.delta, "confidence parameter")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "ramp margin")->capture_default_str();
  app.add_option("--lip-mode", lip_mode, "composed or split")->capture_default_str();
  app.add_option("--cells", cfg.cells, "partition cells (X,Y for regression; per input axis for classification)")
      ->delimiter(',');
  app.add_option("--granularities", cfg.granularities, "partition sweep cells per input axis")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--label-cells", cfg.label_cells, "partition sweep cells along Y (regression)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--mesh", cfg.mesh, "gradient mesh points per input axis")->delimiter(',');
  app.add_option("--label-mesh", cfg.label_mesh, "label mesh for regression")->capture_default_str();
  app.add_option("--iterations", cfg.iterations, "training iterations")->capture_default_str();
  app.add_option("--lr", cfg.lr, "initial learning rate")->capture_default_str();
  app.add_option("--batch", cfg.batch, "batch size (0: task default)")->capture_default_str();
  app.add_option("--width", cfg.width, "hidden width")->capture_default_str();
  app.add_option("--depth", cfg.depth, "hidden layers")->capture_default_str();
  app.add_option("--weight-decay", cfg.weight_decay, "AdamW decay")->capture_default_str();
  app.add_option("--adv-eps", cfg.adv_eps, "adversarial step size")->capture_default_str();
  app.add_option("--reg-kind", reg_kind, "weight_decay, adversarial or early_stop")->capture_default_str();
  app.add_option("--reg-values", cfg.reg_values, "regularization sweep values")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--widths", cfg.sweep_widths, "size sweep widths")->delimiter(',')->capture_default_str();
  app.add_option("--depths", cfg.sweep_depths, "size sweep depths")->delimiter(',')->capture_default_str();
  app.add_option("--size-cells", cfg.size_cells, "size sweep partition")->delimiter(',');
  app.add_option("--shift-norms", cfg.shift_norms, "shift magnitudes")->delimiter(',')->capture_default_str();
  app.add_option("--shift-samples", cfg.shift_samples, "samples per shifted pair")->capture_default_str();
  app.add_option("--conc-n", cfg.conc_n, "concentration sample sizes")->delimiter(',')->capture_default_str();
  app.add_option("--trials", cfg.trials, "Monte-Carlo trials")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Holder exponent")->capture_default_str();
  app.add_option("--conc-dim", cfg.conc_dim, "dimension of the uniform cube")->capture_default_str();
  app.add_option("--reference-factor", cfg.reference_factor, "reference sample multiple of N")
      ->capture_default_str();
  app.add_option("--divergence-n", cfg.divergence_n, "sample sizes for the one-neuron construction")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--test-samples", cfg.test_samples, "fresh samples for the test risk")->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> experiments{
      {"bound", "partitioned, global and Rademacher certificates per seed"},
      {"sweep-partitions", "certificate vs partition granularity"},
      {"sweep-size", "certificate vs network width and depth"},
      {"sweep-reg", "certificate under weight decay, adversarial training or early stopping"},
      {"shift", "certificate under a translated input distribution"},
      {"concentration", "Monte-Carlo W_alpha(mu, mu^N) against the envelope"},
      {"divergence", "one-neuron construction: partitioned vs global certificate"},
      {"heatmap", "per-cell transport contributions"},
  };
  for (const auto& [name, help] : experiments) app.add_subcommand(name, help);

  PlotSpec spec;
  std::string csv_in, svg_out;
  CLI::App* plot = app.add_subcommand("plot", "render an SVG chart from a CSV file");
  plot->add_option("--csv", csv_in, "input CSV")->required();
  plot->add_option("--svg", svg_out, "output SVG")->required();
  plot->add_option("--x", spec.x, "x column")->required();
  plot->add_option("--y", spec.y, "y column")->required();
  plot->add_option("--group", spec.group, "series column");
  plot->add_option("--error", spec.error, "error-bar column");
  plot->add_flag("--log-x", spec.log_x);
  plot->add_flag("--log-y", spec.log_y);
  plot->add_option("--title", spec.title);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot->parsed()) {
      write_text(svg_out, render_svg(CsvTable::read(csv_in), spec));
      return 0;
    }
    cfg.task = parse_task(task);
    cfg.lip_mode = lip_mode == "split" ? LipMode::Split
                   : lip_mode == "composed"
                       ? LipMode::Composed
                       : throw std::invalid_argument("unknown lip mode '" + lip_mode + "'");
    cfg.reg_kind = parse_reg_kind(reg_kind);
    cfg.experiment = parse_experiment(app.get_subcommands().front()->get_name());
    cfg.validate();
    run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
