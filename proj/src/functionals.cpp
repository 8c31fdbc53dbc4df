#include "chiprobe/functionals.hpp"

#include <cmath>
#include <string>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

void check_inputs(double t, double kappa, double omega) {
  require(std::isfinite(t) && t >= 0.0, "functional evaluated at negative or non-finite time");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
  require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
}

bool use_limit_branch(double kappa, double s, const FunctionalOptions& options) {
  switch (options.mu_branch) {
    case MuBranch::kGeneric: return false;
    case MuBranch::kSmallKappaLimit: return true;
    case MuBranch::kAuto: break;
  }
  return 0.5 * kappa * s < options.small_kappa_threshold;
}

// Raw node samples of every integrand the functionals need.
struct Samples {
  std::vector<cplx> xi;       // g e^{i w s - k s/2}
  std::vector<cplx> sinh_w;   // g e^{i w s} sinh(k s/2)
  std::vector<cplx> linear;   // s g e^{i w s}
  std::vector<cplx> growing;  // g e^{i w s + k s/2}
};

Samples sample(const CouplingProfile& g, const QuadratureGrid& grid, double kappa, double omega) {
  Samples out;
  const std::size_t n = grid.nodes.size();
  out.xi.resize(n);
  out.sinh_w.resize(n);
  out.linear.resize(n);
  out.growing.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.nodes[i];
    const double gs = g(s);
    const cplx phase = std::polar(1.0, omega * s);
    const double half = 0.5 * kappa * s;
    out.xi[i] = gs * std::exp(-half) * phase;
    out.sinh_w[i] = gs * std::sinh(half) * phase;
    out.linear[i] = s * gs * phase;
    out.growing[i] = gs * std::exp(half) * phase;
  }
  return out;
}

cplx mu_from_prefix(double kappa, double s, cplx sinh_prefix, cplx linear_prefix, const FunctionalOptions& options) {
  if (s <= 0.0) return {0.0, 0.0};
  if (use_limit_branch(kappa, s, options)) return 2.0 * kI * linear_prefix / s;
  return 2.0 * kI * sinh_prefix / std::sinh(0.5 * kappa * s);
}

struct GridEvaluation {
  FunctionalResult result;
  double mu_sq_integral = 0.0;
};

GridEvaluation evaluate_on_grid(const CouplingProfile& g, double t, double kappa, double omega, double gamma,
                                double delta, int panels, const FunctionalOptions& options) {
  const QuadratureGrid grid = make_grid(0.0, t, panels);
  const Samples s = sample(g, grid, kappa, omega);
  const auto sinh_prefix = prefix_integrals(grid, s.sinh_w);
  const auto linear_prefix = prefix_integrals(grid, s.linear);

  double mu_sq = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const cplx m = mu_from_prefix(kappa, grid.nodes[i], sinh_prefix[i], linear_prefix[i], options);
    mu_sq += grid.weights[i] * std::norm(m);
  }

  GridEvaluation out;
  FunctionalResult& r = out.result;
  r.xi = 2.0 * kI * integrate_samples(grid, s.xi);
  r.mu = mu_from_prefix(kappa, t, integrate_samples(grid, s.sinh_w), integrate_samples(grid, s.linear), options);
  r.lambda = kI * std::exp(-0.5 * kappa * t) * integrate_samples(grid, s.growing);
  r.nu = gamma * t + kappa * delta * mu_sq;
  r.f = std::max(0.0, r.nu + delta * (-std::expm1(-kappa * t)) * std::norm(r.mu));
  out.mu_sq_integral = mu_sq;
  return out;
}

double distance(const FunctionalResult& a, const FunctionalResult& b) {
  double d = std::abs(a.xi - b.xi);
  d = std::max(d, std::abs(a.mu - b.mu));
  d = std::max(d, std::abs(a.lambda - b.lambda));
  d = std::max(d, std::abs(a.f - b.f));
  d = std::max(d, std::abs(a.nu - b.nu));
  return d;
}

double magnitude(const FunctionalResult& r) {
  return std::max({std::abs(r.xi), std::abs(r.mu), std::abs(r.lambda), r.f, r.nu});
}

// Scale used for the convergence test: the integrated |g| sets the size of
// xi, mu and lambda even when cancellations make the results small.
double coupling_scale(const CouplingProfile& g, double t, double kappa, int panels) {
  const QuadratureGrid grid = make_grid(0.0, t, panels);
  double l1 = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    l1 += grid.weights[i] * std::abs(g(grid.nodes[i])) * std::exp(0.5 * kappa * grid.nodes[i]);
  }
  return l1;
}

}  // namespace

FunctionalResult evaluate_functionals(const CouplingProfile& g, double t, const DecoherenceParams& params,
                                      double omega, const FunctionalOptions& options) {
  const double kappa = params.kappa();
  check_inputs(t, kappa, omega);
  const auto [gamma, delta] = derive_rates(params);
  if (t == 0.0) return {};

  int panels = oscillation_panels(t, omega, options.quadrature);
  const double scale_g = coupling_scale(g, t, kappa, panels);
  GridEvaluation coarse = evaluate_on_grid(g, t, kappa, omega, gamma, delta, panels, options);
  for (int level = 0; level < options.quadrature.max_refinements; ++level) {
    panels *= 2;
    GridEvaluation fine = evaluate_on_grid(g, t, kappa, omega, gamma, delta, panels, options);
    const double err = distance(fine.result, coarse.result);
    if (!std::isfinite(err)) fail(ErrorCode::kNonConvergence, "functional quadrature produced a non-finite value");
    const double scale = std::max(magnitude(fine.result), 2.0 * scale_g);
    if (err <= options.quadrature.rel_tol * scale || scale == 0.0) {
      fine.result.quadrature_error_estimate = err;
      return fine.result;
    }
    coarse = std::move(fine);
  }
  fail(ErrorCode::kNonConvergence, "functionals did not converge to rel_tol=" +
                                       std::to_string(options.quadrature.rel_tol) + " at t=" + std::to_string(t));
}

cplx xi(const CouplingProfile& g, double t, double kappa, double omega, const FunctionalOptions& options) {
  check_inputs(t, kappa, omega);
  const auto r = integrate([&](double s) { return g(s) * std::exp(-0.5 * kappa * s) * std::polar(1.0, omega * s); },
                           0.0, t, options.quadrature, oscillation_panels(t, omega, options.quadrature));
  return 2.0 * kI * r.value;
}

cplx mu(const CouplingProfile& g, double t, double kappa, double omega, const FunctionalOptions& options) {
  check_inputs(t, kappa, omega);
  if (t == 0.0) return {0.0, 0.0};
  const int panels = oscillation_panels(t, omega, options.quadrature);
  if (use_limit_branch(kappa, t, options)) {
    const auto r =
        integrate([&](double s) { return s * g(s) * std::polar(1.0, omega * s); }, 0.0, t, options.quadrature, panels);
    return 2.0 * kI * r.value / t;
  }
  const auto r = integrate([&](double s) { return g(s) * std::sinh(0.5 * kappa * s) * std::polar(1.0, omega * s); },
                           0.0, t, options.quadrature, panels);
  return 2.0 * kI * r.value / std::sinh(0.5 * kappa * t);
}

double damping_f(const CouplingProfile& g, double t, const DecoherenceParams& params, double omega,
                 const FunctionalOptions& options) {
  return evaluate_functionals(g, t, params, omega, options).f;
}

cplx lambda_functional(const CouplingProfile& g, double t, double kappa, double omega,
                       const FunctionalOptions& options) {
  check_inputs(t, kappa, omega);
  const auto r = integrate([&](double s) { return g(s) * std::exp(0.5 * kappa * s) * std::polar(1.0, omega * s); },
                           0.0, t, options.quadrature, oscillation_panels(t, omega, options.quadrature));
  return kI * std::exp(-0.5 * kappa * t) * r.value;
}

NodeFunctionals sample_functionals(const CouplingProfile& g, double t, double kappa, double omega, int panels,
                                   const FunctionalOptions& options) {
  check_inputs(t, kappa, omega);
  require(t > 0.0, "sample_functionals needs t > 0");
  NodeFunctionals out;
  out.grid = make_grid(0.0, t, panels);
  const Samples s = sample(g, out.grid, kappa, omega);
  const auto xi_prefix = prefix_integrals(out.grid, s.xi);
  const auto sinh_prefix = prefix_integrals(out.grid, s.sinh_w);
  const auto linear_prefix = prefix_integrals(out.grid, s.linear);
  const auto growing_prefix = prefix_integrals(out.grid, s.growing);
  const std::size_t n = out.grid.nodes.size();
  out.xi.resize(n);
  out.mu.resize(n);
  out.lambda.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double node = out.grid.nodes[i];
    out.xi[i] = 2.0 * kI * xi_prefix[i];
    out.mu[i] = mu_from_prefix(kappa, node, sinh_prefix[i], linear_prefix[i], options);
    out.lambda[i] = kI * std::exp(-0.5 * kappa * node) * growing_prefix[i];
  }
  return out;
}

cplx xi_harmonic_closed(double r, double phi, int n) {
  require(n >= 1, "xi_harmonic_closed: n must be >= 1");
  require(std::isfinite(r) && r >= 0.0, "xi_harmonic_closed: r must be >= 0");
  return std::polar(static_cast<double>(n) * r, phi);
}

double f_harmonic_approx(double r0, double r, double phi, int n, const DecoherenceParams& params, double omega) {
  require(n >= 1, "f_harmonic_approx: n must be >= 1");
  require(std::isfinite(omega) && omega > 0.0, "f_harmonic_approx: omega must be > 0");
  const auto [gamma, delta] = derive_rates(params);
  const double tn = kTwoPi * n / omega;
  const double pi2 = kPi * kPi;
  const double nn = static_cast<double>(n);
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double bracket = 2.0 * r0 * r0 / pi2 - r0 * r * (s - 2.0 * nn * kPi * c) / (2.0 * pi2) +
                         r * r * (nn * nn / 3.0 + c * (c + 2.0 * nn * kPi * s) / (4.0 * pi2));
  return gamma * tn + params.kappa() * delta * tn * bracket;
}

std::uint64_t run_budget(double f, double target_rel_error) {
  require(std::isfinite(f) && f >= 0.0, "run_budget: f must be >= 0");
  require(target_rel_error > 0.0 && target_rel_error < 1.0 + 1e-15,
          "run_budget: target_rel_error must lie in (0, 1]");
  // log10 of e^{2f}/eps^2; compare before exponentiating.
  const double log_m = 2.0 * f / std::log(10.0) - 2.0 * std::log10(target_rel_error);
  if (log_m > 15.0) return kBudgetSaturated;
  const double m = std::exp(2.0 * f) / (target_rel_error * target_rel_error);
  // Guard against ceil() overshooting an exact integer through rounding.
  const double nearest = std::round(m);
  const double count = std::abs(m - nearest) <= 1e-9 * nearest ? nearest : std::ceil(m);
  if (count > 1e15) return kBudgetSaturated;
  return static_cast<std::uint64_t>(count);
}

}  // namespace chiprobe
