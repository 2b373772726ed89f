#pragma once

// Convergence rates and constants of the empirical-measure concentration
// envelope E[W(mu, mu^n)] <= C * diam * rate(n), for Holder and smooth classes.

#include <cstdint>
#include <functional>
#include <optional>

namespace otcert {

/// Exact rational p/q with q > 0.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

enum class RegularityKind { Holder, Smooth };

/// Position of the ambient dimension relative to the critical value 2*alpha
/// (or 2*s). BelowCritical means d_Z < 2*alpha.
enum class Regime { BelowCritical, Critical, AboveCritical };

const char* to_string(Regime r);

class RegularityClass {
 public:
  static RegularityClass holder(double alpha, int ambient_dim);
  static RegularityClass holder(Rational alpha, int ambient_dim);
  static RegularityClass smooth(double order, int ambient_dim);

  RegularityKind kind() const { return kind_; }
  /// alpha for Holder classes, s for smooth classes.
  double exponent() const { return exponent_; }
  int ambient_dim() const { return dim_; }
  const std::optional<Rational>& exact_exponent() const { return exact_; }

  /// Compares d_Z against 2*exponent without floating tolerance.
  Regime regime() const;

 private:
  RegularityClass(RegularityKind kind, double exponent, std::optional<Rational> exact, int dim)
      : kind_(kind), exponent_(exponent), exact_(exact), dim_(dim) {}

  RegularityKind kind_;
  double exponent_;
  std::optional<Rational> exact_;
  int dim_;
};

/// Explicit C_{d_Z,alpha}. Throws std::invalid_argument for smooth classes,
/// whose constants are existence-only.
double holder_constant(const RegularityClass& reg);

/// rate_{d_Z,alpha}(n); rate(0) = 0.
double holder_rate(const RegularityClass& reg, std::uint64_t n);

/// rate_{d_Z,s}(n); rate(0) = 0. The critical row uses the natural log.
double smooth_rate(const RegularityClass& reg, std::uint64_t n);

struct RateEntry {
  double constant = 1.0;
  Regime regime = Regime::AboveCritical;
  /// True when the constant is a placeholder for an existence-only value.
  bool constant_defaulted = false;
  std::function<double(std::uint64_t)> rate_fn;
};

/// Bundles constant, regime and rate function. For smooth classes the
/// constant is `smooth_constant` (default 1) and flagged as defaulted when
/// not supplied.
RateEntry rate_entry(const RegularityClass& reg, std::optional<double> smooth_constant = std::nullopt);

}  // namespace otcert
