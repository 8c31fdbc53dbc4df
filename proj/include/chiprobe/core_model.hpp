#pragma once

// Shared domain types.
//
// Units: every frequency and rate is angular (radians per unit time) and times
// are in the reciprocal unit, so any rate*time product is dimensionless. The
// oscillator frequency omega is passed explicitly everywhere; the harmonic
// protocol interacts for t_n = n * 2pi / omega.

#include <complex>
#include <numbers>
#include <variant>
#include <vector>

namespace chiprobe {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Markovian environment of the qubit-oscillator pair.
///
/// kappa: oscillator damping, gamma1: qubit damping, gamma2: qubit dephasing,
/// n_m / n_q: thermal occupations of the oscillator and qubit baths.
class DecoherenceParams {
 public:
  DecoherenceParams() = default;
  DecoherenceParams(double kappa, double gamma1, double gamma2, double n_m, double n_q);

  static DecoherenceParams none() { return {}; }

  double kappa() const { return kappa_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  double n_m() const { return n_m_; }
  double n_q() const { return n_q_; }

 private:
  double kappa_ = 0.0;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  double n_m_ = 0.0;
  double n_q_ = 0.0;
};

struct DerivedRates {
  double gamma;  // gamma1 (n_q + 1/2) + 2 gamma2
  double delta;  // n_m + 1/2
};

DerivedRates derive_rates(const DecoherenceParams& params);

/// g(t) = (omega / 2pi) e^{kappa t / 2} [r0 + r sin(phi - omega t)].
struct HarmonicCoupling {
  double r0 = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double omega = kTwoPi;
  double kappa = 0.0;
};

struct ConstantCoupling {
  double g0 = 0.0;
};

/// Piecewise-linear coupling through strictly increasing knots.
struct SampledCoupling {
  std::vector<double> times;
  std::vector<double> values;
};

class CouplingProfile {
 public:
  using Variant = std::variant<HarmonicCoupling, ConstantCoupling, SampledCoupling>;

  static CouplingProfile harmonic(double r0, double r, double phi, double omega, double kappa);
  static CouplingProfile constant(double g0);
  static CouplingProfile sampled(std::vector<double> times, std::vector<double> values);
  static CouplingProfile zero() { return constant(0.0); }

  double operator()(double t) const;

  /// Same profile with every value multiplied by c.
  CouplingProfile scaled(double c) const;

  const Variant& form() const { return form_; }

 private:
  explicit CouplingProfile(Variant form) : form_(std::move(form)) {}

  Variant form_;
};

double eval_coupling(const CouplingProfile& g, double t);

/// Validated phase-space coordinate (finite real and imaginary parts).
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(cplx beta);

  cplx beta() const { return beta_; }

 private:
  cplx beta_{0.0, 0.0};
};

}  // namespace chiprobe
