#include "ghost/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "ghost/error.hpp"

namespace ghost {
namespace {

// Newton iteration on P_n from the Tricomi initial guess; only the
// non-negative half is computed and mirrored.
QuadratureRule compute_gauss_legendre(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    const double theta = std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5);
    double z = std::cos(theta) * (1.0 - (dn - 1.0) / (8.0 * dn * dn * dn));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * z * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double dk = static_cast<double>(k);
      const double p2 = ((2.0 * dk - 1.0) * z * p1 - (dk - 1.0) * p0) / dk;
      p0 = p1;
      p1 = p2;
    }
    dp = dn * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);

    const bool middle = (n % 2 == 1) && (i == half - 1);
    if (middle) z = 0.0;
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
  if (n == 0) throw ParameterError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureRule>(compute_gauss_legendre(n));
  return *slot;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  return composite_gauss_legendre(1, n, a, b);
}

QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t order, double a, double b) {
  if (panels == 0) throw ParameterError("composite rule needs at least one panel");
  const auto& base = gauss_legendre(order);
  QuadratureRule out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    // Panel centres are placed symmetrically about (a+b)/2 so that symmetric
    // intervals give exactly antisymmetric nodes.
    const double offset = (static_cast<double>(p) + 0.5) - 0.5 * static_cast<double>(panels);
    const double mid = 0.5 * (a + b) + offset * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < order; ++i) {
      out.nodes.push_back(mid + half * base.nodes[i]);
      out.weights.push_back(half * base.weights[i]);
    }
  }
  return out;
}

}  // namespace ghost
