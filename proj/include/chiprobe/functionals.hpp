#pragma once

// Decoherence functionals of a coupling profile g over [0, t]:
//
//   xi(t)     = 2i  int_0^t g(s) e^{i omega s - kappa s/2} ds
//   mu(t)     = 2i / sinh(kappa t/2) int_0^t g(s) e^{i omega s} sinh(kappa s/2) ds
//   lambda(t) = i e^{-kappa t/2} int_0^t g(s) e^{i omega s + kappa s/2} ds
//   nu(t)     = gamma t + kappa Delta int_0^t |mu(s)|^2 ds
//   f(t)      = nu(t) + Delta (1 - e^{-kappa t}) |mu(t)|^2
//
// The measured qubit signal is chi(xi) e^{-f}.

#include <cstdint>
#include <vector>

#include "chiprobe/core_model.hpp"
#include "chiprobe/quadrature.hpp"

namespace chiprobe {

enum class MuBranch {
  kAuto,             // limit branch when kappa t / 2 < small_kappa_threshold
  kGeneric,          // always the sinh-weighted integral
  kSmallKappaLimit,  // always (2i/t) int_0^t s g(s) e^{i omega s} ds
};

struct FunctionalOptions {
  QuadratureOptions quadrature{};
  double small_kappa_threshold = 1e-6;
  MuBranch mu_branch = MuBranch::kAuto;
};

struct FunctionalResult {
  cplx xi;
  cplx mu;
  double f = 0.0;
  cplx lambda;
  double nu = 0.0;
  double quadrature_error_estimate = 0.0;
};

cplx xi(const CouplingProfile& g, double t, double kappa, double omega, const FunctionalOptions& options = {});

cplx mu(const CouplingProfile& g, double t, double kappa, double omega, const FunctionalOptions& options = {});

double damping_f(const CouplingProfile& g, double t, const DecoherenceParams& params, double omega,
                 const FunctionalOptions& options = {});

cplx lambda_functional(const CouplingProfile& g, double t, double kappa, double omega,
                       const FunctionalOptions& options = {});

/// All functionals at once, sharing one refined node grid.
FunctionalResult evaluate_functionals(const CouplingProfile& g, double t, const DecoherenceParams& params,
                                      double omega, const FunctionalOptions& options = {});

/// Functionals at every node of a fixed grid over [0, t] (running upper
/// limit s = node). Used for nested integrals.
struct NodeFunctionals {
  QuadratureGrid grid;
  std::vector<cplx> xi;
  std::vector<cplx> mu;
  std::vector<cplx> lambda;
};

NodeFunctionals sample_functionals(const CouplingProfile& g, double t, double kappa, double omega, int panels,
                                   const FunctionalOptions& options = {});

/// xi of the harmonic profile after n whole periods: n r e^{i phi}.
cplx xi_harmonic_closed(double r, double phi, int n);

/// First-order expansion of f in kappa/omega for the harmonic profile at
/// t_n = 2 pi n / omega.
double f_harmonic_approx(double r0, double r, double phi, int n, const DecoherenceParams& params, double omega);

inline constexpr std::uint64_t kBudgetSaturated = 1'000'000'000'000'000ULL;  // 1e15

/// Shots per Pauli axis so that the decoherence-corrected standard error
/// e^f / sqrt(M) is at most target_rel_error: ceil(e^{2f} / eps^2).
/// Returns kBudgetSaturated when the count would exceed 1e15.
std::uint64_t run_budget(double f, double target_rel_error);

}  // namespace chiprobe
