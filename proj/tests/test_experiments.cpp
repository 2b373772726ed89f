#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "otcert/experiments.hpp"
#include "otcert/plot.hpp"

using namespace otcert;
namespace fs = std::filesystem;

namespace {

RunConfig small(TaskKind task) {
  RunConfig c;
  c.task = task;
  c.seeds = {0, 1};
  c.n_list = {128};
  c.iterations = 150;
  c.test_samples = 2000;
  c.mesh = task == TaskKind::Regression ? std::vector<std::size_t>{128} : std::vector<std::size_t>{48, 48};
  c.label_mesh = 32;
  c.cells = task == TaskKind::Regression ? std::vector<std::size_t>{5, 5} : std::vector<std::size_t>{6, 6};
  return c;
}

std::size_t find_row(const CsvTable& t, const std::string& col, const std::string& value, std::size_t from = 0) {
  for (std::size_t i = from; i < t.size(); ++i)
    if (t.at(i, col) == value) return i;
  FAIL("row not found: " << col << "=" << value);
  return 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bound experiment rows and reruns") {
  for (TaskKind task : {TaskKind::Regression, TaskKind::Classification}) {
    RunConfig c = small(task);
    const CsvTable a = run_bound(c);
    CHECK(a.size() == 3 * c.seeds.size());
    for (const char* col : {"theorem", "total", "train_risk", "test_risk", "gap", "predictor_lip"})
      CHECK(a.has_column(col));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::isfinite(a.number(i, "total")));
      CHECK(a.number(i, "total") > 0.0);
      CHECK(a.at(i, "config_hash") == c.hash());
    }
    CHECK(run_bound(c).str() == a.str());
  }
}

TEST_CASE("configuration validation and hashing") {
  RunConfig c = small(TaskKind::Regression);
  CHECK_NOTHROW(c.validate());
  RunConfig d = c;
  d.lr = 0.01;
  CHECK(d.hash() != c.hash());
  CHECK(c.hash().size() == 16);
  d = c;
  d.delta = 0.0;
  CHECK_THROWS(d.validate());
  d = c;
  d.seeds.clear();
  CHECK_THROWS(d.validate());
}

TEST_CASE("one-cell sweep column equals the global certificate") {
  RunConfig c = small(TaskKind::Regression);
  c.seeds = {0};
  c.granularities = {1, 2, 4};
  c.label_cells = {1, 3};
  const CsvTable t = run_partition_sweep(c);
  CHECK(t.size() == 6);
  const std::size_t r = find_row(t, "cells_x", "1");
  CHECK(t.at(r, "cells_y") == "1");
  CHECK(t.number(r, "total") == doctest::Approx(t.number(r, "global_total")).epsilon(1e-12));
  CHECK(t.number(r, "cost_partition") == 0.0);

  RunConfig k = small(TaskKind::Classification);
  k.seeds = {0};
  k.granularities = {1, 3};
  const CsvTable u = run_partition_sweep(k);
  CHECK(u.size() == 2);
}

TEST_CASE("summaries") {
  CsvTable t({"g", "seed", "v"});
  t.add_row({"a", "0", "1"});
  t.add_row({"b", "0", "10"});
  t.add_row({"a", "1", "3"});
  t.add_row({"a", "2", "5"});
  const CsvTable s = summarize(t, {"g"}, {"v"});
  REQUIRE(s.size() == 2);
  CHECK(s.at(0, "g") == "a");
  CHECK(s.number(0, "v_mean") == doctest::Approx(3.0));
  CHECK(s.number(0, "v_stderr") == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(s.number(1, "v_mean") == doctest::Approx(10.0));
  CHECK(s.number(1, "v_stderr") == 0.0);
  CHECK_THROWS(summarize(t, {"missing"}, {"v"}));
}

TEST_CASE("plots are deterministic") {
  CsvTable t({"x", "y", "g", "e"});
  t.add_row({"1", "2", "a", "0.1"});
  t.add_row({"2", "3", "a", "0.2"});
  t.add_row({"1", "1", "b", "0.1"});
  PlotSpec spec{"x", "y", std::string("g"), std::string("e"), false, true, "t"};
  const std::string a = render_svg(t, spec);
  CHECK(a == render_svg(t, spec));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("polyline") != std::string::npos);
  spec.y = "nope";
  CHECK_THROWS(render_svg(t, spec));
}

TEST_CASE("heatmap contributions add up to the transport term") {
  for (TaskKind task : {TaskKind::Regression, TaskKind::Classification}) {
    for (LipMode mode : {LipMode::Composed, LipMode::Split}) {
      RunConfig c = small(task);
      c.seeds = {3};
      c.lip_mode = mode;
      const CsvTable h = run_heatmap(c);
      const CsvTable b = run_bound(c);
      const std::size_t local = find_row(b, "theorem", task == TaskKind::Regression ? "partitioned" : "classification");
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        sum += h.number(i, "transport_contribution");
        count += static_cast<std::size_t>(h.number(i, "count"));
        CHECK(h.number(i, "value") >= 0.0);
      }
      CHECK(count == 128);
      CHECK(sum == doctest::Approx(b.number(local, "cost_transport")).epsilon(1e-10));
      CHECK(h.size() == c.cells[0] * c.cells[1]);
    }
  }
}

TEST_CASE("a constant predictor has zero slope everywhere") {
  RunConfig c = small(TaskKind::Regression);
  TrainedInstance inst = train_instance(c.task, 64, 0, c.train_config(0));
  for (auto& w : inst.model.weights) w.setZero();
  const InstanceProbe probe = probe_instance(c, inst);
  CHECK(probe.predictor_lip == 0.0);
  const Certificate cert = certify(c, inst, probe, c.bound_cells());
  c.lip_mode = LipMode::Split;
  const Certificate split = certify(c, inst, probe, c.bound_cells());
  for (const auto& cell : split.partition.cells()) CHECK(cell.local_lip.value_or(0.0) == 0.0);
  CHECK(cert.train_risk >= 0.0);
}

TEST_CASE("shift experiment") {
  RunConfig c = small(TaskKind::Regression);
  c.seeds = {0};
  c.shift_norms = {0.0, 0.5};
  const CsvTable t = run_shift(c);
  REQUIRE(t.size() == 2);
  const std::size_t zero = find_row(t, "shift_norm", "0");
  CHECK(t.number(zero, "w1") == 0.0);
  CHECK(t.number(zero, "shift_term") == 0.0);
  const std::size_t half = find_row(t, "shift_norm", "0.5");
  CHECK(t.number(half, "w1") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(t.number(half, "shift_ratio") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("concentration and divergence experiments") {
  RunConfig c;
  c.seeds = {0};
  c.conc_n = {16, 64};
  c.trials = 20;
  c.reference_factor = 4;
  const CsvTable t = run_concentration(c);
  REQUIRE(t.size() == 2);
  CHECK(t.number(0, "mean") > t.number(1, "mean"));
  CHECK(t.at(0, "regime") == "critical");

  RunConfig d;
  d.seeds = {0};
  d.divergence_n = {1024, 4096};
  const CsvTable v = run_divergence(d);
  REQUIRE(v.size() == 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v.number(i, "lip_strip_max") == 0.0);
    CHECK(v.number(i, "lip_column_min") == doctest::Approx(v.number(i, "lip_expected")).epsilon(1e-9));
  }
  CHECK(v.number(1, "local_total") < v.number(0, "local_total"));
  CHECK(v.number(1, "global_cost_transport") > v.number(0, "global_cost_transport"));
}

TEST_CASE("command line") {
  const fs::path dir = fs::temp_directory_path() / "otcert_cli_test";
  fs::remove_all(dir);
  const std::string cli = OTCERT_CLI;
  const std::string run = cli + " bound --seeds 0 --n 64 --iterations 50 --test-samples 500 --mesh 64 --label-mesh 16 --out " +
                          dir.string() + " > /dev/null";
  REQUIRE(std::system(run.c_str()) == 0);
  for (const char* f : {"bound.csv", "bound_summary.csv", "bound.svg", "bound.config.txt"}) CHECK(fs::exists(dir / f));
  const std::string first = slurp(dir / "bound.csv");
  REQUIRE(std::system(run.c_str()) == 0);
  CHECK(slurp(dir / "bound.csv") == first);
  CHECK(CsvTable::read((dir / "bound.csv").string()).size() == 3);

  const std::string plot = cli + " plot --csv " + (dir / "bound.csv").string() + " --svg " + (dir / "p.svg").string() +
                           " --x N --y total --group theorem > /dev/null";
  CHECK(std::system(plot.c_str()) == 0);
  CHECK(fs::exists(dir / "p.svg"));

  CHECK(std::system((cli + " bound --delta 2 --out " + dir.string() + " > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((cli + " nosuch > /dev/null 2>&1").c_str()) != 0);
  fs::remove_all(dir);
}
