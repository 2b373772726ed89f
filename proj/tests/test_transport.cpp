#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "otcert/transport.hpp"

using namespace otcert;

namespace {

std::vector<std::vector<double>> rows(const Points& p) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(p[i].begin(), p[i].end());
  return out;
}

Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Points p(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = u(rng);
    p.push_back(x);
  }
  return p;
}

}  // namespace

TEST_CASE("basic distances") {
  const auto zero = EmpiricalMeasure::uniform(Points{{0.0}});
  const auto four = EmpiricalMeasure::uniform(Points{{4.0}});
  CHECK(w_alpha(zero, zero, 1.0) == 0.0);
  CHECK(w_alpha(zero, four, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  const auto a = EmpiricalMeasure::uniform(Points{{0.0, 0.0}, {1.0, 0.0}});
  const auto b = EmpiricalMeasure::uniform(Points{{0.0, 1.0}, {1.0, 1.0}});
  CHECK(w_alpha(a, b, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(w_alpha(a, four, 1.0));
  CHECK_THROWS(w_alpha(a, b, 0.0));
  CHECK_THROWS(EmpiricalMeasure::uniform(Points(2)));
  CHECK_THROWS(EmpiricalMeasure::weighted(Points{{0.0}, {1.0}}, {0.3, 0.3}));
  CHECK_THROWS(EmpiricalMeasure::weighted(Points{{0.0}, {1.0}}, {1.0, 0.0}));
}

TEST_CASE("one-dimensional fast path") {
  const auto a = EmpiricalMeasure::uniform(Points{{0.0}, {1.0}});
  const auto b = EmpiricalMeasure::uniform(Points{{1.0}, {2.0}});
  CHECK(w1_1d(a, b) == doctest::Approx(1.0));
  CHECK(w1_1d(a, a) == 0.0);
  const auto c = EmpiricalMeasure::uniform(Points{{0.0}, {0.5}, {1.0}});
  const auto d = EmpiricalMeasure::uniform(Points{{0.25}, {0.5}, {0.75}});
  CHECK(w1_1d(c, d) == doctest::Approx(oracle::permutation_ot(rows(c.points()), rows(d.points()), 1.0)));
  CHECK(w1_1d(c, d) == doctest::Approx(0.5 / 3));
  CHECK_THROWS(w1_1d(EmpiricalMeasure::uniform(Points{{0.0, 0.0}}), EmpiricalMeasure::uniform(Points{{0.0, 0.0}})));
  // Unequal sizes go through the LP.
  const auto e = EmpiricalMeasure::uniform(Points{{0.0}, {1.0}, {2.0}});
  CHECK(w1_1d(a, e) == doctest::Approx(w_alpha(a, e, 1.0)).epsilon(1e-12));
}

TEST_CASE("permutation oracle agreement") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 1 + rng() % 6, d = 1 + rng() % 3;
    const double alpha = t % 2 ? 0.5 : 1.0;
    const Points pa = random_points(rng, n, d), pb = random_points(rng, n, d);
    const double got = w_alpha(EmpiricalMeasure::uniform(pa), EmpiricalMeasure::uniform(pb), alpha);
    CHECK(got == doctest::Approx(oracle::permutation_ot(rows(pa), rows(pb), alpha)).epsilon(1e-9));
  }
}

TEST_CASE("plan feasibility and metric axioms") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 60; ++t) {
    const std::size_t na = 1 + rng() % 7, nb = 1 + rng() % 9, d = 1 + rng() % 3;
    const double alpha = t % 3 == 0 ? 0.3 : 1.0;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> wa(na), wb(nb);
    for (auto& w : wa) w = u(rng);
    for (auto& w : wb) w = u(rng);
    const double sa = std::accumulate(wa.begin(), wa.end(), 0.0), sb = std::accumulate(wb.begin(), wb.end(), 0.0);
    for (auto& w : wa) w /= sa;
    for (auto& w : wb) w /= sb;
    const auto a = EmpiricalMeasure::weighted(random_points(rng, na, d), wa);
    const auto b = EmpiricalMeasure::weighted(random_points(rng, nb, d), wb);
    const TransportPlan plan = optimal_plan(a, b, alpha);
    std::vector<double> ra(na, 0.0), rb(nb, 0.0);
    double cost = 0.0;
    for (const auto& f : plan.flows) {
      CHECK(f.mass >= 0.0);
      ra[f.source] += f.mass;
      rb[f.target] += f.mass;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += std::pow(a.points()[f.source][k] - b.points()[f.target][k], 2);
      cost += f.mass * std::pow(std::sqrt(s), alpha);
    }
    for (std::size_t i = 0; i < na; ++i) CHECK(ra[i] == doctest::Approx(wa[i]).epsilon(1e-10));
    for (std::size_t j = 0; j < nb; ++j) CHECK(rb[j] == doctest::Approx(wb[j]).epsilon(1e-10));
    CHECK(plan.cost == doctest::Approx(cost).epsilon(1e-10));
    CHECK(w_alpha(b, a, alpha) == doctest::Approx(plan.cost).epsilon(1e-10));
    CHECK(w_alpha(a, a, alpha) == 0.0);
    // Support diameter bound (points live in [-1,1]^d).
    CHECK(plan.cost <= std::pow(2.0 * std::sqrt(static_cast<double>(d)), alpha) + 1e-12);
  }
  for (int t = 0; t < 60; ++t) {
    const std::size_t d = 1 + rng() % 3;
    const double alpha = t % 2 ? 0.5 : 1.0;
    const auto a = EmpiricalMeasure::uniform(random_points(rng, 1 + rng() % 6, d));
    const auto b = EmpiricalMeasure::uniform(random_points(rng, 1 + rng() % 6, d));
    const auto c = EmpiricalMeasure::uniform(random_points(rng, 1 + rng() % 6, d));
    CHECK(w_alpha(a, c, alpha) <= w_alpha(a, b, alpha) + w_alpha(b, c, alpha) + 1e-10);
  }
}

TEST_CASE("duplicate atoms merge") {
  const auto a = EmpiricalMeasure::uniform(Points{{1.0}, {0.0}, {1.0}, {1.0}});
  std::vector<std::vector<std::size_t>> origin;
  const auto m = a.merged(&origin);
  REQUIRE(m.size() == 2);
  CHECK(m.points()[0][0] == 1.0);
  CHECK(m.weights()[0] == doctest::Approx(0.75));
  CHECK(origin[0] == std::vector<std::size_t>{0, 2, 3});
  const auto b = EmpiricalMeasure::uniform(Points{{0.0}, {0.0}, {2.0}, {2.0}});
  CHECK(w_alpha(a, b, 1.0) == doctest::Approx(w1_1d(a, b)).epsilon(1e-12));
  const auto plan = optimal_plan(a, b, 1.0);
  for (const auto& f : plan.flows) {
    CHECK(f.source < 4);
    CHECK(f.target < 4);
  }
}

TEST_CASE("1-D LP agrees with the quantile formula") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 40;
    const auto a = EmpiricalMeasure::uniform(random_points(rng, n, 1));
    const auto b = EmpiricalMeasure::uniform(random_points(rng, n, 1));
    CHECK(w1_1d(a, b) == doctest::Approx(w_alpha(a, b, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("Monte-Carlo mean") {
  const PointSampler dirac = [](std::mt19937_64&) { return std::vector<double>{0.3, 0.3}; };
  const McEstimate zero = mc_wasserstein_mean(dirac, 5, 4, 1.0, 1);
  CHECK(zero.mean == 0.0);

  const PointSampler unif = [](std::mt19937_64& r) { return std::vector<double>{std::uniform_real_distribution<double>(0, 1)(r)}; };
  const McEstimate one = mc_wasserstein_mean(unif, 1, 400, 1.0, 2, {200, 1});
  CHECK(std::abs(one.mean - 1.0 / 3.0) <= 3.0 * one.stderr_of_mean);
  // Independent of the worker count.
  const McEstimate w1 = mc_wasserstein_mean(unif, 4, 12, 1.0, 7, {50, 1});
  const McEstimate w3 = mc_wasserstein_mean(unif, 4, 12, 1.0, 7, {50, 3});
  CHECK(w1.trial_values == w3.trial_values);
  CHECK_THROWS(mc_wasserstein_mean(unif, 4, 1, 1.0, 7));
  std::size_t calls = 0;
  const PointSampler ragged = [&calls](std::mt19937_64&) { return std::vector<double>(1 + (calls++ % 2), 0.0); };
  CHECK_THROWS(mc_wasserstein_mean(ragged, 4, 2, 1.0, 7, {50, 1}));
}

TEST_CASE("measure CSV loading") {
  const auto dir = std::filesystem::temp_directory_path() / "otcert_measure_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "w.csv");
    f << "x,y,w\n0,0,0.25\n1,1,0.75\n";
  }
  const auto m = load_measure_csv((dir / "w.csv").string(), true);
  CHECK(m.size() == 2);
  CHECK(m.dim() == 2);
  CHECK(m.weights()[1] == doctest::Approx(0.75));
  {
    std::ofstream f(dir / "u.csv");
    f << "0.5\n1.5\n";
  }
  const auto u = load_measure_csv((dir / "u.csv").string(), false);
  CHECK(u.size() == 2);
  CHECK(u.is_uniform());
  CHECK_THROWS(load_measure_csv((dir / "missing.csv").string(), false));
}
