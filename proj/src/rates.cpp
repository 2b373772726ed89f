#include "otcert/rates.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace otcert {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::BelowCritical: return "below_critical";
    case Regime::Critical: return "critical";
    case Regime::AboveCritical: return "above_critical";
  }
  return "?";
}

RegularityClass RegularityClass::holder(double alpha, int ambient_dim) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder exponent must lie in (0, 1]");
  if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be >= 1");
  return RegularityClass(RegularityKind::Holder, alpha, std::nullopt, ambient_dim);
}

RegularityClass RegularityClass::holder(Rational alpha, int ambient_dim) {
  if (alpha.den <= 0) throw std::invalid_argument("rational exponent needs a positive denominator");
  if (alpha.num <= 0 || alpha.num > alpha.den) throw std::invalid_argument("holder exponent must lie in (0, 1]");
  if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be >= 1");
  const auto g = std::gcd(alpha.num, alpha.den);
  Rational reduced{alpha.num / g, alpha.den / g};
  return RegularityClass(RegularityKind::Holder,
                         static_cast<double>(reduced.num) / static_cast<double>(reduced.den), reduced,
                         ambient_dim);
}

RegularityClass RegularityClass::smooth(double order, int ambient_dim) {
  if (!(order >= 1.0) || !std::isfinite(order)) throw std::invalid_argument("smoothness order must be >= 1");
  if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be >= 1");
  return RegularityClass(RegularityKind::Smooth, order, std::nullopt, ambient_dim);
}

Regime RegularityClass::regime() const {
  int cmp = 0;
  if (exact_) {
    // d_Z * q  vs  2 * p
    const std::int64_t lhs = static_cast<std::int64_t>(dim_) * exact_->den;
    const std::int64_t rhs = 2 * exact_->num;
    cmp = (lhs < rhs) ? -1 : (lhs > rhs ? 1 : 0);
  } else {
    // 2*x is exact in binary floating point, and d_Z is an exactly representable integer.
    const double twice = 2.0 * exponent_;
    const double d = static_cast<double>(dim_);
    cmp = (d < twice) ? -1 : (d > twice ? 1 : 0);
  }
  if (cmp < 0) return Regime::BelowCritical;
  if (cmp == 0) return Regime::Critical;
  return Regime::AboveCritical;
}

double holder_constant(const RegularityClass& reg) {
  if (reg.kind() != RegularityKind::Holder)
    throw std::invalid_argument("smooth constants are not explicit; supply C_{d,s} to the bound");
  const double a = reg.exponent();
  const double d = reg.ambient_dim();
  const double dim_factor = std::pow(d, a / 2.0);
  switch (reg.regime()) {
    case Regime::BelowCritical:
      return dim_factor * std::exp2(d / 2.0 - 2.0 * a) / (1.0 - std::exp2(d / 2.0 - a));
    case Regime::Critical:
      return dim_factor / (a * std::exp2(a + 1.0));
    case Regime::AboveCritical: {
      const double gap = d / 2.0 - a;
      const double base = gap / (2.0 * a * (1.0 - std::exp2(a - d / 2.0)));
      return 2.0 * std::pow(base, 2.0 * a / d) * (1.0 + a / (std::exp2(a) * gap)) * dim_factor;
    }
  }
  return 0.0;
}

double holder_rate(const RegularityClass& reg, std::uint64_t n) {
  if (reg.kind() != RegularityKind::Holder) throw std::invalid_argument("holder_rate needs a Holder class");
  if (n == 0) return 0.0;
  const double a = reg.exponent();
  const double nn = static_cast<double>(n);
  switch (reg.regime()) {
    case Regime::BelowCritical: return 1.0 / std::sqrt(nn);
    case Regime::Critical: return (a * std::exp2(a + 2.0) + std::log2(nn)) / std::sqrt(nn);
    case Regime::AboveCritical: return std::pow(nn, -a / reg.ambient_dim());
  }
  return 0.0;
}

double smooth_rate(const RegularityClass& reg, std::uint64_t n) {
  if (reg.kind() != RegularityKind::Smooth) throw std::invalid_argument("smooth_rate needs a smooth class");
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  switch (reg.regime()) {
    case Regime::BelowCritical: return 1.0 / std::sqrt(nn);
    case Regime::Critical: return (std::log(nn) + 1.0) / std::sqrt(nn);
    case Regime::AboveCritical: return std::pow(nn, -reg.exponent() / reg.ambient_dim());
  }
  return 0.0;
}

RateEntry rate_entry(const RegularityClass& reg, std::optional<double> smooth_constant) {
  RateEntry entry;
  entry.regime = reg.regime();
  if (reg.kind() == RegularityKind::Holder) {
    entry.constant = holder_constant(reg);
    entry.rate_fn = [reg](std::uint64_t n) { return holder_rate(reg, n); };
  } else {
    if (smooth_constant && !(*smooth_constant > 0.0))
      throw std::invalid_argument("smooth constant must be positive");
    entry.constant = smooth_constant.value_or(1.0);
    entry.constant_defaulted = !smooth_constant.has_value();
    entry.rate_fn = [reg](std::uint64_t n) { return smooth_rate(reg, n); };
  }
  return entry;
}

}  // namespace otcert
