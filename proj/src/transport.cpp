#include "otcert/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "network_simplex.hpp"

namespace otcert {

namespace {

constexpr double kZeroDistance = 1e-12;

void check_weights(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("measure weights must be positive and finite");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("measure weights must sum to 1");
}

double snowflake_cost(std::span<const double> x, std::span<const double> y, double alpha) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  const double dist = std::sqrt(s);
  return alpha == 1.0 ? dist : std::pow(dist, alpha);
}

std::uint64_t lcm_capped(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::uint64_t g = std::gcd(a, b);
  const unsigned __int128 l = static_cast<unsigned __int128>(a / g) * b;
  if (l > (static_cast<unsigned __int128>(1) << 52)) return 0;
  return static_cast<std::uint64_t>(l);
}

template <class F>
std::vector<std::vector<double>> solve_dense(const std::vector<F>& supply, const std::vector<F>& demand,
                                             const std::vector<double>& cost, double scale) {
  detail::TransportSimplex<F> simplex(supply, demand, cost);
  simplex.run();
  std::vector<std::vector<double>> flows(supply.size(), std::vector<double>(demand.size(), 0.0));
  for (std::size_t i = 0; i < supply.size(); ++i) {
    for (std::size_t j = 0; j < demand.size(); ++j) {
      const double f = static_cast<double>(simplex.flow(i, j)) / scale;
      flows[i][j] = f > 0.0 ? f : 0.0;
    }
  }
  return flows;
}

}  // namespace

EmpiricalMeasure EmpiricalMeasure::uniform(Points points) {
  if (points.empty()) throw std::invalid_argument("empty measure");
  EmpiricalMeasure m;
  const std::size_t n = points.size();
  m.points_ = std::move(points);
  m.weights_.assign(n, 1.0 / static_cast<double>(n));
  m.units_.assign(n, 1);
  m.denominator_ = n;
  m.uniform_ = true;
  return m;
}

EmpiricalMeasure EmpiricalMeasure::weighted(Points points, std::vector<double> weights) {
  if (points.empty()) throw std::invalid_argument("empty measure");
  if (weights.size() != points.size()) throw std::invalid_argument("one weight per atom is required");
  check_weights(weights);
  EmpiricalMeasure m;
  m.points_ = std::move(points);
  m.weights_ = std::move(weights);
  m.uniform_ = std::all_of(m.weights_.begin(), m.weights_.end(),
                           [&](double w) { return w == m.weights_.front(); });
  // Exact integer masses when every weight is k / K for K = round(1 / min weight).
  const double wmin = *std::min_element(m.weights_.begin(), m.weights_.end());
  const double k_guess = std::round(1.0 / wmin);
  if (k_guess >= 1.0 && k_guess < 1e9) {
    const auto denom = static_cast<std::uint64_t>(k_guess);
    std::vector<std::uint64_t> units;
    std::uint64_t total = 0;
    bool exact = true;
    for (double w : m.weights_) {
      const double u = w * k_guess;
      const double r = std::round(u);
      if (std::abs(u - r) > 1e-9 || r < 1.0) {
        exact = false;
        break;
      }
      units.push_back(static_cast<std::uint64_t>(r));
      total += units.back();
    }
    if (exact && total == denom) {
      m.units_ = std::move(units);
      m.denominator_ = denom;
    }
  }
  return m;
}

EmpiricalMeasure EmpiricalMeasure::merged(std::vector<std::vector<std::size_t>>* origin) const {
  const std::size_t n = size();
  const std::size_t d = dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto pa = points_[a], pb = points_[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::stable_sort(order.begin(), order.end(), less);

  // Each atom points at the first occurrence of its location; merged atoms
  // keep the original order, which keeps the solver's arc scan unbiased.
  std::vector<std::size_t> rep(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const bool same = k > 0 && std::equal(points_[i].begin(), points_[i].end(), points_[order[k - 1]].begin());
    rep[i] = same ? rep[order[k - 1]] : i;
  }

  EmpiricalMeasure m;
  m.points_ = Points(d);
  m.denominator_ = denominator_;
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rep[i] == i) {
      slot[i] = groups.size();
      m.points_.push_back(points_[i]);
      m.weights_.push_back(0.0);
      if (denominator_) m.units_.push_back(0);
      groups.emplace_back();
    }
    const std::size_t g = slot[rep[i]];
    m.weights_[g] += weights_[i];
    if (denominator_) m.units_[g] += units_[i];
    groups[g].push_back(i);
  }
  if (denominator_) {
    for (std::size_t k = 0; k < m.units_.size(); ++k)
      m.weights_[k] = static_cast<double>(m.units_[k]) / static_cast<double>(denominator_);
  }
  m.uniform_ = std::all_of(m.weights_.begin(), m.weights_.end(), [&](double w) { return w == m.weights_.front(); });
  if (origin) *origin = std::move(groups);
  return m;
}

TransportPlan optimal_plan(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double alpha) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("empty measure");
  if (a.dim() != b.dim()) throw std::invalid_argument("measures live in different dimensions");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");

  std::vector<std::vector<std::size_t>> origin_a, origin_b;
  const EmpiricalMeasure ma = a.merged(&origin_a);
  const EmpiricalMeasure mb = b.merged(&origin_b);
  const std::size_t n1 = ma.size(), n2 = mb.size();

  std::vector<double> cost(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) cost[i * n2 + j] = snowflake_cost(ma.points()[i], mb.points()[j], alpha);
  }

  std::vector<std::vector<double>> flows;
  const std::uint64_t common = lcm_capped(ma.denominator(), mb.denominator());
  if (common != 0) {
    std::vector<std::int64_t> supply(n1), demand(n2);
    for (std::size_t i = 0; i < n1; ++i)
      supply[i] = static_cast<std::int64_t>(ma.units()[i] * (common / ma.denominator()));
    for (std::size_t j = 0; j < n2; ++j)
      demand[j] = static_cast<std::int64_t>(mb.units()[j] * (common / mb.denominator()));
    flows = solve_dense(supply, demand, cost, static_cast<double>(common));
  } else {
    flows = solve_dense(ma.weights(), mb.weights(), cost, 1.0);
  }

  TransportPlan plan;
  double total = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double f = flows[i][j];
      if (f <= 0.0) continue;
      total += f * cost[i * n2 + j];
      // Split merged mass back over the original atoms in proportion to weight.
      for (std::size_t oa : origin_a[i]) {
        const double sa = a.weights()[oa] / ma.weights()[i];
        for (std::size_t ob : origin_b[j]) {
          const double sb = b.weights()[ob] / mb.weights()[j];
          plan.flows.push_back({oa, ob, f * sa * sb});
        }
      }
    }
  }
  plan.cost = total < kZeroDistance ? 0.0 : total;
  return plan;
}

double w_alpha(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double alpha) {
  return optimal_plan(a, b, alpha).cost;
}

double w1_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.dim() != 1 || b.dim() != 1) throw std::invalid_argument("w1_1d needs one-dimensional measures");
  if (!(a.is_uniform() && b.is_uniform() && a.size() == b.size())) return w_alpha(a, b, 1.0);
  std::vector<double> xa(a.points().flat()), xb(b.points().flat());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  double s = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) s += std::abs(xa[i] - xb[i]);
  const double w = s / static_cast<double>(xa.size());
  return w < kZeroDistance ? 0.0 : w;
}

McEstimate mc_wasserstein_mean(const PointSampler& sampler, std::size_t n, std::size_t trials, double alpha,
                               std::uint64_t seed, McOptions options) {
  if (trials < 2) throw std::invalid_argument("at least two trials are required");
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  if (options.reference_factor < 1) throw std::invalid_argument("reference factor must be >= 1");

  auto draw = [&](std::mt19937_64& rng, std::size_t count) {
    Points pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const auto p = sampler(rng);
      if (p.empty() || (!pts.empty() && p.size() != pts.dim()))
        throw std::invalid_argument("sampler returned points of inconsistent dimension");
      pts.push_back(p);
    }
    return pts;
  };

  McEstimate est;
  est.trial_values.assign(trials, 0.0);
  std::size_t workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, trials);

  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t t = w; t < trials; t += workers) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(t), std::uint64_t{0x5eed}};
        std::mt19937_64 rng(seq);
        Points sample = draw(rng, n);
        Points reference = draw(rng, n * options.reference_factor);
        if (sample.dim() != reference.dim()) throw std::invalid_argument("sampler returned points of inconsistent dimension");
        est.trial_values[t] = w_alpha(EmpiricalMeasure::uniform(std::move(sample)),
                                      EmpiricalMeasure::uniform(std::move(reference)), alpha);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0.0;
  for (double v : est.trial_values) sum += v;
  est.mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : est.trial_values) ss += (v - est.mean) * (v - est.mean);
  const double var = ss / static_cast<double>(trials - 1);
  est.stderr_of_mean = std::sqrt(var / static_cast<double>(trials));
  return est;
}

EmpiricalMeasure load_measure_csv(const std::string& path, bool weight_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file " + path);
  Points pts;
  std::vector<double> weights;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("non-numeric row in " + path);
    }
    first = false;
    if (weight_column) {
      if (row.size() < 2) throw std::runtime_error("weighted rows need a point and a weight in " + path);
      weights.push_back(row.back());
      row.pop_back();
    }
    pts.push_back(row);
  }
  if (weight_column) return EmpiricalMeasure::weighted(std::move(pts), std::move(weights));
  return EmpiricalMeasure::uniform(std::move(pts));
}

}  // namespace otcert
