#include "chiprobe/quadrature.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

struct ReferenceRule {
  std::array<double, kPanelOrder> x{};
  std::array<double, kPanelOrder> w{};
  // prefix[j][l] = integral over [-1, x_j] of the l-th Lagrange basis polynomial.
  std::array<std::array<double, kPanelOrder>, kPanelOrder> prefix{};

  ReferenceRule() {
    using Gauss = boost::math::quadrature::gauss<double, kPanelOrder>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    // Boost stores the non-negative half; kPanelOrder is even.
    const int half = kPanelOrder / 2;
    for (int i = 0; i < half; ++i) {
      x[half - 1 - i] = -abscissa[i];
      w[half - 1 - i] = weights[i];
      x[half + i] = abscissa[i];
      w[half + i] = weights[i];
    }
    for (int j = 0; j < kPanelOrder; ++j) {
      const double lo = -1.0;
      const double hi = x[j];
      const double half_width = 0.5 * (hi - lo);
      const double mid = 0.5 * (hi + lo);
      for (int l = 0; l < kPanelOrder; ++l) {
        double sum = 0.0;
        for (int q = 0; q < kPanelOrder; ++q) {
          const double y = mid + half_width * x[q];
          sum += w[q] * lagrange(l, y);
        }
        prefix[j][l] = half_width * sum;
      }
    }
  }

  double lagrange(int l, double y) const {
    double value = 1.0;
    for (int m = 0; m < kPanelOrder; ++m) {
      if (m != l) value *= (y - x[m]) / (x[l] - x[m]);
    }
    return value;
  }
};

const ReferenceRule& reference_rule() {
  static const ReferenceRule rule;
  return rule;
}

}  // namespace

QuadratureGrid make_grid(double a, double b, int panels) {
  require(std::isfinite(a) && std::isfinite(b) && b >= a, "quadrature interval must be finite with b >= a");
  require(panels >= 1, "quadrature needs at least one panel");
  const auto& rule = reference_rule();
  QuadratureGrid grid;
  grid.a = a;
  grid.b = b;
  grid.panels = panels;
  grid.nodes.reserve(static_cast<std::size_t>(panels) * kPanelOrder);
  grid.weights.reserve(grid.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    for (int q = 0; q < kPanelOrder; ++q) {
      grid.nodes.push_back(lo + half * (1.0 + rule.x[q]));
      grid.weights.push_back(half * rule.w[q]);
    }
  }
  return grid;
}

std::vector<cplx> prefix_integrals(const QuadratureGrid& grid, std::span<const cplx> samples) {
  require(samples.size() == grid.nodes.size(), "prefix_integrals: sample count does not match grid");
  const auto& rule = reference_rule();
  std::vector<cplx> out(samples.size());
  const double half = 0.5 * (grid.b - grid.a) / grid.panels;
  cplx carried{0.0, 0.0};
  for (int p = 0; p < grid.panels; ++p) {
    const std::size_t base = static_cast<std::size_t>(p) * kPanelOrder;
    cplx panel_total{0.0, 0.0};
    for (int j = 0; j < kPanelOrder; ++j) {
      cplx partial{0.0, 0.0};
      for (int l = 0; l < kPanelOrder; ++l) partial += rule.prefix[j][l] * samples[base + l];
      out[base + j] = carried + half * partial;
      panel_total += rule.w[j] * samples[base + j];
    }
    carried += half * panel_total;
  }
  return out;
}

cplx integrate_samples(const QuadratureGrid& grid, std::span<const cplx> samples) {
  require(samples.size() == grid.weights.size(), "integrate_samples: sample count does not match grid");
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weights[i] * samples[i];
  return sum;
}

int oscillation_panels(double t, double omega, const QuadratureOptions& options) {
  const double periods = omega > 0.0 ? t * omega / kTwoPi : 0.0;
  const double wanted = 4.0 * std::ceil(periods);
  return std::max(options.min_panels, static_cast<int>(std::min(wanted, 1.0e6)));
}

QuadratureResult integrate(const std::function<cplx(double)>& h, double a, double b,
                           const QuadratureOptions& options, int initial_panels) {
  require(options.rel_tol > 0.0, "quadrature tolerance must be positive");
  if (b == a) return {cplx{0.0, 0.0}, 0.0, 0};

  auto evaluate = [&](int panels, double& l1) {
    const QuadratureGrid grid = make_grid(a, b, panels);
    cplx sum{0.0, 0.0};
    l1 = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      const cplx v = h(grid.nodes[i]);
      sum += grid.weights[i] * v;
      l1 += grid.weights[i] * std::abs(v);
    }
    return sum;
  };

  int panels = std::max(initial_panels, options.min_panels);
  double l1 = 0.0;
  cplx coarse = evaluate(panels, l1);
  for (int level = 0; level < options.max_refinements; ++level) {
    panels *= 2;
    const cplx fine = evaluate(panels, l1);
    const double err = std::abs(fine - coarse);
    const double scale = std::max(std::abs(fine), l1);
    if (!std::isfinite(err)) fail(ErrorCode::kNonConvergence, "quadrature produced a non-finite value");
    if (err <= options.rel_tol * scale || scale == 0.0) return {fine, err, panels};
    coarse = fine;
  }
  fail(ErrorCode::kNonConvergence, "quadrature did not reach rel_tol=" + std::to_string(options.rel_tol) +
                                       " after " + std::to_string(options.max_refinements) + " refinements");
}

}  // namespace chiprobe
