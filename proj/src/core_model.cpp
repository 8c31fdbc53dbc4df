#include "chiprobe/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chiprobe/error.hpp"

namespace chiprobe {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kTruncation: return "truncation";
    case ErrorCode::kNullOutcome: return "null outcome";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kComputation: return "computation";
  }
  return "unknown";
}

namespace {

void require_nonnegative(double value, const char* name) {
  require(std::isfinite(value) && value >= 0.0,
          std::string(name) + " must be finite and non-negative, got " + std::to_string(value));
}

}  // namespace

DecoherenceParams::DecoherenceParams(double kappa, double gamma1, double gamma2, double n_m, double n_q)
    : kappa_(kappa), gamma1_(gamma1), gamma2_(gamma2), n_m_(n_m), n_q_(n_q) {
  require_nonnegative(kappa, "kappa");
  require_nonnegative(gamma1, "gamma1");
  require_nonnegative(gamma2, "gamma2");
  require_nonnegative(n_m, "n_m");
  require_nonnegative(n_q, "n_q");
}

DerivedRates derive_rates(const DecoherenceParams& params) {
  return {params.gamma1() * (params.n_q() + 0.5) + 2.0 * params.gamma2(), params.n_m() + 0.5};
}

CouplingProfile CouplingProfile::harmonic(double r0, double r, double phi, double omega, double kappa) {
  require(std::isfinite(r0) && std::isfinite(phi), "harmonic coupling: r0 and phi must be finite");
  require(std::isfinite(r) && r >= 0.0, "harmonic coupling: r must be >= 0");
  require(std::isfinite(omega) && omega > 0.0, "harmonic coupling: omega must be > 0");
  require(std::isfinite(kappa) && kappa >= 0.0, "harmonic coupling: kappa must be >= 0");
  return CouplingProfile(HarmonicCoupling{r0, r, phi, omega, kappa});
}

CouplingProfile CouplingProfile::constant(double g0) {
  require(std::isfinite(g0), "constant coupling must be finite");
  return CouplingProfile(ConstantCoupling{g0});
}

CouplingProfile CouplingProfile::sampled(std::vector<double> times, std::vector<double> values) {
  require(times.size() >= 2, "sampled coupling needs at least two knots");
  require(times.size() == values.size(), "sampled coupling: times and values differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && std::isfinite(values[i]), "sampled coupling: non-finite knot");
    if (i > 0) require(times[i] > times[i - 1], "sampled coupling: times must be strictly increasing");
  }
  return CouplingProfile(SampledCoupling{std::move(times), std::move(values)});
}

namespace {

struct Evaluator {
  double t;

  double operator()(const HarmonicCoupling& h) const {
    return h.omega / kTwoPi * std::exp(0.5 * h.kappa * t) * (h.r0 + h.r * std::sin(h.phi - h.omega * t));
  }

  double operator()(const ConstantCoupling& c) const { return c.g0; }

  double operator()(const SampledCoupling& s) const {
    if (t < s.times.front() || t > s.times.back()) {
      fail(ErrorCode::kOutOfRange, "sampled coupling evaluated outside [" + std::to_string(s.times.front()) +
                                       ", " + std::to_string(s.times.back()) + "] at t=" + std::to_string(t));
    }
    auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
    if (it == s.times.end()) return s.values.back();
    const auto hi = static_cast<std::size_t>(it - s.times.begin());
    const auto lo = hi - 1;
    if (t == s.times[lo]) return s.values[lo];
    const double w = (t - s.times[lo]) / (s.times[hi] - s.times[lo]);
    return (1.0 - w) * s.values[lo] + w * s.values[hi];
  }
};

}  // namespace

double CouplingProfile::operator()(double t) const { return std::visit(Evaluator{t}, form_); }

CouplingProfile CouplingProfile::scaled(double c) const {
  require(std::isfinite(c), "coupling scale must be finite");
  return std::visit(
      [c](const auto& form) -> CouplingProfile {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, HarmonicCoupling>) {
          // r stays non-negative; a sign flip moves into the phase.
          const double phi = c < 0.0 ? form.phi + kPi : form.phi;
          return CouplingProfile(HarmonicCoupling{c * form.r0, std::abs(c) * form.r, phi, form.omega, form.kappa});
        } else if constexpr (std::is_same_v<T, ConstantCoupling>) {
          return CouplingProfile(ConstantCoupling{c * form.g0});
        } else {
          SampledCoupling s = form;
          for (double& v : s.values) v *= c;
          return CouplingProfile(std::move(s));
        }
      },
      form_);
}

double eval_coupling(const CouplingProfile& g, double t) {
  require(t >= 0.0, "coupling evaluated at negative time");
  return g(t);
}

PhasePoint::PhasePoint(cplx beta) : beta_(beta) {
  require(std::isfinite(beta.real()) && std::isfinite(beta.imag()), "phase point must be finite");
}

}  // namespace chiprobe
