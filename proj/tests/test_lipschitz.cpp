#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "otcert/experiments.hpp"
#include "otcert/lipschitz.hpp"

using namespace otcert;

namespace {
std::vector<std::size_t> dims(std::initializer_list<std::size_t> v) { return v; }
}  // namespace

TEST_CASE("mesh construction") {
  const Points m = uniform_mesh(Box({0.0, -1.0}, {1.0, 1.0}), dims({3, 2}));
  REQUIRE(m.size() == 6);
  CHECK(m[0][0] == 0.0);
  CHECK(m[0][1] == -1.0);
  CHECK(m[1][1] == 1.0);  // last axis fastest
  CHECK(m[5][0] == 1.0);
  CHECK(default_mesh(1) == dims({512}));
  CHECK(default_mesh(2) == dims({256, 256}));
  CHECK_THROWS(uniform_mesh(Box({0.0}, {1.0}), dims({0})));
}

TEST_CASE("predictor fields") {
  const Box dom({-1.0, -1.0}, {1.0, 1.0});
  const GradField z = grad_norm_field(MlpModel::zeros({2, 8, 1}), std::nullopt, dom, dims({9, 9}));
  CHECK(global_lipschitz(z) == 0.0);
  MlpModel lin = MlpModel::zeros({2, 1});
  lin.weights[0](0, 0) = 3.0;
  lin.weights[0](0, 1) = -4.0;
  const GradField f = grad_norm_field(lin, std::nullopt, dom, dims({5, 5}));
  for (double g : f.grad_norms) CHECK(g == doctest::Approx(5.0));
  CHECK(global_lipschitz(f) == doctest::Approx(5.0));
  CHECK(f.probed == Probed::PredictorOnly);
  CHECK_THROWS(grad_norm_field(lin, std::nullopt, Box({0.0}, {1.0}), dims({5})));
  CHECK_THROWS(grad_norm_field(lin, LossKind::huber(), dom, dims({5, 5})));
}

TEST_CASE("field norms match finite differences") {
  std::mt19937_64 rng(17);
  const Box dom({-2.0}, {2.0});
  const MlpModel m = MlpModel::random({1, 6, 6, 1}, rng);
  const GradField f = grad_norm_field(m, std::nullopt, dom, dims({37}));
  int ok = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::vector<double> x{f.mesh_points[i][0]};
    const double fd = oracle::central_diff([&](std::vector<double> p) { return mlp_forward(m, p); }, x, 0);
    ok += std::abs(std::abs(fd) - f.grad_norms[i]) <= 1e-4 * std::max(1.0, f.grad_norms[i]);
  }
  CHECK(ok >= static_cast<int>(f.size()) - 2);  // a probe may straddle a kink

  const GradField h = grad_norm_field(m, LossKind::huber(), dom, dims({11}), LabelGrid::linspace(-1.0, 2.0, 4));
  CHECK(h.size() == 44);
  CHECK(h.mesh_points.dim() == 2);
  CHECK(h.probed == Probed::LossComposed);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const std::vector<double> z{h.mesh_points[i][0], h.mesh_points[i][1]};
    auto g = [&](std::vector<double> p) { return loss_eval(LossKind::huber(), mlp_forward(m, std::vector<double>{p[0]}), p[1]); };
    const double gx = oracle::central_diff(g, z, 0), gy = oracle::central_diff(g, z, 1);
    CHECK(std::hypot(gx, gy) == doctest::Approx(h.grad_norms[i]).epsilon(1e-4));
  }
}

TEST_CASE("local maxima per cell") {
  const Box dom({0.0}, {1.0});
  const GradField c = field_from_function(dom, dims({101}), [](std::span<const double>) { return 2.5; });
  const Partition p = local_lipschitz(c, build_grid_partition(dom, dims({7})));
  for (const auto& cell : p.cells()) CHECK(*cell.local_lip == 2.5);

  const GradField step = field_from_function(dom, dims({10}), [](std::span<const double> x) { return x[0] < 0.5 ? 1.0 : 5.0; });
  const Partition two = local_lipschitz(step, build_grid_partition(dom, dims({2})));
  CHECK(*two.cells()[0].local_lip == 1.0);
  CHECK(*two.cells()[1].local_lip == 5.0);
  CHECK(global_lipschitz(step) == 5.0);

  // Cells without mesh points inherit from their face neighbours.
  const GradField coarse = field_from_function(dom, dims({2}), [](std::span<const double> x) { return 1.0 + x[0]; });
  const Partition fine = local_lipschitz(coarse, build_grid_partition(dom, dims({5})));
  for (const auto& cell : fine.cells()) CHECK(cell.local_lip.has_value());
  CHECK(*fine.cells()[1].local_lip == 1.0);
  CHECK(*fine.cells()[3].local_lip == 2.0);
  CHECK_THROWS(local_lipschitz(GradField{}, build_grid_partition(dom, dims({2}))));
}

TEST_CASE("local values never exceed the global value and refine monotonically") {
  std::mt19937_64 rng(19);
  const Box dom({-1.0, -1.0}, {1.0, 1.0});
  for (int t = 0; t < 5; ++t) {
    const MlpModel m = MlpModel::random({2, 8, 8, 1}, rng);
    const GradField f = grad_norm_field(m, std::nullopt, dom, dims({40, 40}));
    const double g = global_lipschitz(f);
    const Partition coarse = local_lipschitz(f, build_grid_partition(dom, dims({4, 4})));
    const Partition fine = local_lipschitz(f, build_grid_partition(dom, dims({8, 8})));
    double max_local = 0.0;
    for (const auto& c : fine.cells()) {
      CHECK(*c.local_lip <= g);
      max_local = std::max(max_local, *c.local_lip);
      std::vector<double> centre{0.5 * (c.box.lower[0] + c.box.upper[0]), 0.5 * (c.box.lower[1] + c.box.upper[1])};
      CHECK(*c.local_lip <= *coarse.cells()[*coarse.locate(centre)].local_lip);
    }
    CHECK(max_local == g);
  }
}

TEST_CASE("finer meshes rarely lower the estimate") {
  std::mt19937_64 rng(23);
  const Box dom({-1.0, -1.0}, {1.0, 1.0});
  int nondecreasing = 0;
  for (int t = 0; t < 100; ++t) {
    const MlpModel m = MlpModel::random({2, 6, 6, 1}, rng);
    // 2n-1 points per axis contain the n-point mesh.
    const double a = global_lipschitz(grad_norm_field(m, std::nullopt, dom, dims({17, 17})));
    const double b = global_lipschitz(grad_norm_field(m, std::nullopt, dom, dims({33, 33})));
    nondecreasing += b >= a;
  }
  CHECK(nondecreasing >= 95);
}

TEST_CASE("one-neuron network on its partition") {
  const std::uint64_t n = 1024;
  const MlpModel net = divergence_network(n);
  const std::size_t strips = divergence_strip_count(n);
  const GradField f = grad_norm_field(net, std::nullopt, Box({0.0}, {1.0}), dims({4 * strips}));
  const Partition p = local_lipschitz(f, build_divergence_partition(n));
  const double slope = std::sqrt(1024.0) / std::log2(std::log2(1024.0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i + 1 < strips) {
      CHECK(*p.cells()[i].local_lip == 0.0);
    } else {
      CHECK(*p.cells()[i].local_lip == doctest::Approx(slope));
    }
  }
}

TEST_CASE("input fields on label-augmented partitions") {
  const Box dom({0.0, 0.0}, {1.0, 1.0});
  const GradField f = field_from_function(dom, dims({11, 11}), [](std::span<const double> x) { return x[0] + x[1]; });
  const Partition paired = local_lipschitz(f, build_paired_partition(build_grid_partition(dom, dims({2, 2}))));
  for (std::size_t i = 0; i < 4; ++i) CHECK(*paired.cells()[i].local_lip == *paired.cells()[i + 4].local_lip);
  const Partition joint = local_lipschitz(f, build_grid_partition(Box({0.0, 0.0, -1.0}, {1.0, 1.0, 1.0}), dims({2, 2, 3}), 2));
  for (const auto& c : joint.cells()) CHECK(c.local_lip.has_value());
}

TEST_CASE("field CSV export") {
  const auto dir = std::filesystem::temp_directory_path() / "otcert_field_test";
  std::filesystem::create_directories(dir);
  const GradField f = field_from_function(Box({0.0}, {1.0}), dims({4}), [](std::span<const double>) { return 1.0; });
  write_field_csv(f, (dir / "f.csv").string());
  const CsvTable t = CsvTable::read((dir / "f.csv").string());
  CHECK(t.size() == 4);
  CHECK(t.has_column("x0"));
  CHECK(t.number(3, "grad_norm") == 1.0);
}
