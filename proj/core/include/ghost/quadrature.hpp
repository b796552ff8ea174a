#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ghost {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule of order n on [-1, 1]. Nodes are exactly antisymmetric
/// (x[n-1-i] == -x[i]) and weights exactly symmetric. Results are cached.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Gauss-Legendre rule of order n mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Composite rule: `panels` equal panels on [a, b], each with a Gauss-Legendre
/// rule of order `order`.
QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t order, double a, double b);

/// Quadrature controls shared by the source-integral oracle, the
/// lens-aperture integral and the pattern sum.
struct QuadSettings {
  // Source integral over x' and y' (Gauss-Legendre on [-h*sigma, h*sigma]).
  std::size_t nodes = 2048;
  double half_width_sigmas = 4.0;

  // Lens-plane integral: composite Gauss-Legendre with at most this mean node
  // spacing in metres. 0 selects the Fresnel-zone rule rho / (8 N_F).
  double aperture_node_spacing = 0.0;
  std::size_t panel_order = 8;

  // Gauss-Legendre nodes per pattern pixel and axis; verify_supersample
  // recomputes maps with twice as many and compares.
  std::size_t pattern_supersample = 6;
  bool verify_supersample = false;

  // Node doubling is accepted when the change is below `tolerance`.
  double tolerance = 1e-8;
  bool check_convergence = true;
};

}  // namespace ghost
