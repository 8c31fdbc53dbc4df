#include "chiprobe/catprep.hpp"

#include <cmath>
#include <ostream>

#include "chiprobe/error.hpp"
#include "chiprobe/quadrature.hpp"
#include "chiprobe/reconstruction.hpp"

namespace chiprobe {

MatricialInitial MatricialInitial::product(const OscillatorState& rho0, cplx c_e, cplx c_g) {
  const double ne = std::norm(c_e);
  const double ng = std::norm(c_g);
  require(std::abs(ne + ng - 1.0) < 1e-12, "qubit amplitudes must be normalized");
  const cplx eg = c_e * std::conj(c_g);
  auto chi = [rho0](cplx beta) { return characteristic(rho0, beta); };
  return {[chi, ne](cplx b) { return ne * chi(b); }, [chi, ng](cplx b) { return ng * chi(b); },
          [chi, eg](cplx b) { return eg * chi(b); }, [chi, eg](cplx b) { return std::conj(eg) * chi(b); }};
}

MatricialInitial MatricialInitial::plus_state(const OscillatorState& rho0) {
  const double h = 1.0 / std::sqrt(2.0);
  return product(rho0, h, h);
}

MatricialEvolution::MatricialEvolution(const CouplingProfile& g, double t, const DecoherenceParams& params,
                                       double omega, const FunctionalOptions& options)
    : t_(t), params_(params), rates_(derive_rates(params)) {
  require(std::isfinite(t) && t >= 0.0, "evolution time must be finite and >= 0");
  functionals_ = evaluate_functionals(g, t, params, omega, options);
  if (t > 0.0) {
    // The ratio integrand of the ground block inherits the drive oscillation
    // through lambda(u); twice the functional panel count resolves it.
    const int panels = 2 * oscillation_panels(t, omega, options.quadrature);
    NodeFunctionals nodes = sample_functionals(g, t, params.kappa(), omega, panels, options);
    grid_ = std::move(nodes.grid);
    lambda_nodes_ = std::move(nodes.lambda);
  }
}

void MatricialEvolution::require_cold_qubit() const {
  if (params_.n_q() != 0.0) {
    fail(ErrorCode::kInvalidArgument, "excited/ground block evolution assumes n_q = 0");
  }
}

cplx MatricialEvolution::chi_pm(const ChiFunction& chi0, int sign, cplx beta) const {
  require(sign == 1 || sign == -1, "sign must be +1 or -1");
  const double kappa = params_.kappa();
  const double s = static_cast<double>(sign);
  const double shrink = std::exp(-0.5 * kappa * t_);
  const double spread = rates_.delta * -std::expm1(-kappa * t_);
  const auto& fn = functionals_;
  return chi0(beta * shrink - s * fn.xi) * std::exp(-spread * std::norm(beta - s * fn.mu) - fn.nu);
}

cplx MatricialEvolution::chi_e(const ChiFunction& chi_e0, cplx beta) const {
  require_cold_qubit();
  const double kappa = params_.kappa();
  const double spread = rates_.delta * -std::expm1(-kappa * t_);
  const cplx lam = functionals_.lambda;
  const cplx exponent = -params_.gamma1() * t_ - spread * std::norm(beta) + lam * std::conj(beta) -
                        std::conj(lam) * beta;
  return std::exp(exponent) * chi_e0(beta * std::exp(-0.5 * kappa * t_));
}

cplx MatricialEvolution::chi_g_homogeneous(const ChiFunction& chi_g0, cplx beta) const {
  const double kappa = params_.kappa();
  const double spread = rates_.delta * -std::expm1(-kappa * t_);
  const cplx lam = functionals_.lambda;
  const cplx exponent = -spread * std::norm(beta) + std::conj(lam) * beta - lam * std::conj(beta);
  return std::exp(exponent) * chi_g0(beta * std::exp(-0.5 * kappa * t_));
}

cplx MatricialEvolution::chi_g(const ChiFunction& chi_g0, const ChiFunction& chi_e0, cplx beta) const {
  require_cold_qubit();
  const cplx homogeneous = chi_g_homogeneous(chi_g0, beta);
  const double gamma1 = params_.gamma1();
  if (gamma1 == 0.0 || t_ == 0.0) return homogeneous;

  // Along the characteristic beta_u = beta e^{k(u-t)/2} both blocks sample
  // their initial functions at the same foot point, and the Delta factors
  // cancel in the ratio chi_e(beta_u, u) / chi_g_homogeneous(beta_u, u).
  const double kappa = params_.kappa();
  const cplx foot = beta * std::exp(-0.5 * kappa * t_);
  const cplx ce0 = chi_e0(foot);
  const cplx cg0 = chi_g0(foot);
  if (!(std::abs(cg0) > 1e-250) || !std::isfinite(std::abs(ce0 / cg0))) {
    fail(ErrorCode::kComputation, "ground block: homogeneous part vanishes at beta = " + format_real(beta.real()) +
                                      (beta.imag() < 0 ? "" : "+") + format_real(beta.imag()) + "i");
  }
  const cplx initial_ratio = ce0 / cg0;
  std::vector<cplx> samples(grid_.nodes.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double u = grid_.nodes[i];
    const cplx beta_u = beta * std::exp(0.5 * kappa * (u - t_));
    const cplx lam = lambda_nodes_[i];
    samples[i] = std::exp(-gamma1 * u + 2.0 * (lam * std::conj(beta_u) - std::conj(lam) * beta_u)) * initial_ratio;
  }
  const cplx correction = integrate_samples(grid_, samples);
  return homogeneous * (1.0 + gamma1 * correction);
}

cplx evolve_chi_pm(const ChiFunction& chi0, int sign, cplx beta, double t, const CouplingProfile& g,
                   const DecoherenceParams& params, double omega) {
  return MatricialEvolution(g, t, params, omega).chi_pm(chi0, sign, beta);
}

cplx evolve_chi_e(const ChiFunction& chi_e0, cplx beta, double t, const CouplingProfile& g,
                  const DecoherenceParams& params, double omega) {
  return MatricialEvolution(g, t, params, omega).chi_e(chi_e0, beta);
}

cplx evolve_chi_g(const ChiFunction& chi_g0, const ChiFunction& chi_e0, cplx beta, double t,
                  const CouplingProfile& g, const DecoherenceParams& params, double omega) {
  return MatricialEvolution(g, t, params, omega).chi_g(chi_g0, chi_e0, beta);
}

PreparedCat::PreparedCat(std::shared_ptr<const MatricialEvolution> evolution, double varphi, int sign)
    : evolution_(std::move(evolution)),
      initial_(MatricialInitial::plus_state(OscillatorState::vacuum())),
      varphi_(varphi),
      sign_(sign) {
  require(evolution_ != nullptr, "prepared cat needs an evolution");
  require(sign == 1 || sign == -1, "sign must be +1 or -1");
  require(std::isfinite(varphi), "varphi must be finite");
  if (evolution_->params().n_q() != 0.0) {
    fail(ErrorCode::kInvalidArgument, "cat preparation assumes n_q = 0");
  }
  normalization_ = combination(0.0);
  if (!(normalization_.real() > 2e-10)) {
    fail(ErrorCode::kNullOutcome, "post-selection probability " + format_real(0.5 * normalization_.real()) +
                                      " is numerically zero");
  }
}

cplx PreparedCat::combination(cplx beta) const {
  const auto& ev = *evolution_;
  const double s = static_cast<double>(sign_);
  return ev.chi_e(initial_.e, beta) + ev.chi_g(initial_.g, initial_.e, beta) +
         s * std::polar(1.0, -varphi_) * ev.chi_pm(initial_.plus, 1, beta) +
         s * std::polar(1.0, varphi_) * ev.chi_pm(initial_.minus, -1, beta);
}

cplx PreparedCat::operator()(cplx beta) const { return combination(beta) / normalization_; }

OscillatorState PreparedCat::ideal() const {
  return OscillatorState::cat(0.5 * evolution_->functionals().xi, varphi_, sign_);
}

PreparedCat chi_prepared_cat(double t, const CouplingProfile& g, const DecoherenceParams& params, double omega,
                             double varphi, int sign, const FunctionalOptions& options) {
  if (params.n_q() != 0.0) fail(ErrorCode::kInvalidArgument, "cat preparation assumes n_q = 0");
  auto evolution = std::make_shared<const MatricialEvolution>(g, t, params, omega, options);
  return PreparedCat(std::move(evolution), varphi, sign);
}

void write_cat_csv(std::ostream& out, const std::vector<cplx>& grid, const PreparedCat& cat) {
  const OscillatorState ideal = cat.ideal();
  out << "beta_re,beta_im,chi_ideal_re,chi_ideal_im,chi_prepared_re,chi_prepared_im\n";
  for (const cplx beta : grid) {
    const cplx a = characteristic(ideal, beta);
    const cplx p = cat(beta);
    out << format_real(beta.real()) << ',' << format_real(beta.imag()) << ',' << format_real(a.real()) << ','
        << format_real(a.imag()) << ',' << format_real(p.real()) << ',' << format_real(p.imag()) << '\n';
  }
}

}  // namespace chiprobe
