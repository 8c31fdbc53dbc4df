#pragma once

// Composite Gauss-Legendre quadrature with panel doubling, plus prefix
// (running) integrals evaluated at the quadrature nodes themselves so that
// nested integrals cost O(N) integrand evaluations.

#include <functional>
#include <span>
#include <vector>

#include "chiprobe/core_model.hpp"

namespace chiprobe {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  int max_refinements = 14;  // panel doublings before giving up
  int min_panels = 4;
};

/// Nodes and weights of a composite rule on [a, b].
struct QuadratureGrid {
  double a = 0.0;
  double b = 0.0;
  int panels = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kPanelOrder = 10;  // Gauss-Legendre points per panel

QuadratureGrid make_grid(double a, double b, int panels);

/// Running integrals from grid.a to every node, given integrand samples at
/// the nodes. Exact for polynomials of degree < kPanelOrder on each panel.
std::vector<cplx> prefix_integrals(const QuadratureGrid& grid, std::span<const cplx> samples);

cplx integrate_samples(const QuadratureGrid& grid, std::span<const cplx> samples);

struct QuadratureResult {
  cplx value;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Doubles the panel count until successive results agree to rel_tol,
/// measured against max(|I|, integral of |h|). Throws kNonConvergence.
QuadratureResult integrate(const std::function<cplx(double)>& h, double a, double b,
                           const QuadratureOptions& options = {}, int initial_panels = 0);

/// Panels per drive period used as the starting resolution for oscillatory
/// integrands on [0, t].
int oscillation_panels(double t, double omega, const QuadratureOptions& options);

}  // namespace chiprobe
