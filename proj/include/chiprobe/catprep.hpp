#pragma once

// Semi-analytic evolution of the four blocks of the joint characteristic
// function, chi_jk(beta, t) = tr(<j| rho |k> D(beta)) with j, k in {e, g},
// and the oscillator state obtained by post-selecting the qubit.
//
//   chi_plus  = tr(rho_eg D),   chi_minus = tr(rho_ge D)
//   chi_e     = tr(rho_ee D),   chi_g     = tr(rho_gg D)

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "chiprobe/functionals.hpp"
#include "chiprobe/states.hpp"

namespace chiprobe {

using ChiFunction = std::function<cplx(cplx)>;

/// Initial block characteristic functions.
struct MatricialInitial {
  ChiFunction e;
  ChiFunction g;
  ChiFunction plus;
  ChiFunction minus;

  /// (c_e|e> + c_g|g>) (x) rho0.
  static MatricialInitial product(const OscillatorState& rho0, cplx c_e, cplx c_g);
  /// |+><+| (x) rho0: every block equals chi/2.
  static MatricialInitial plus_state(const OscillatorState& rho0);
};

/// Functionals of one coupling history, precomputed once and shared by every
/// evaluation point. Immutable after construction.
class MatricialEvolution {
 public:
  MatricialEvolution(const CouplingProfile& g, double t, const DecoherenceParams& params, double omega,
                     const FunctionalOptions& options = {});

  /// chi0(beta e^{-kt/2} -+ xi) exp(-Delta (1 - e^{-kt}) |beta -+ mu|^2 - nu).
  cplx chi_pm(const ChiFunction& chi0, int sign, cplx beta) const;
  /// Excited-state block. Requires n_q = 0.
  cplx chi_e(const ChiFunction& chi_e0, cplx beta) const;
  /// Homogeneous part of the ground-state block.
  cplx chi_g_homogeneous(const ChiFunction& chi_g0, cplx beta) const;
  /// Ground-state block including the feeding from decay of the excited
  /// block. Requires n_q = 0; throws kComputation when the homogeneous part
  /// vanishes along the integration path.
  cplx chi_g(const ChiFunction& chi_g0, const ChiFunction& chi_e0, cplx beta) const;

  const FunctionalResult& functionals() const { return functionals_; }
  double time() const { return t_; }
  const DecoherenceParams& params() const { return params_; }

 private:
  void require_cold_qubit() const;

  double t_;
  DecoherenceParams params_;
  DerivedRates rates_;
  FunctionalResult functionals_;
  QuadratureGrid grid_;
  std::vector<cplx> lambda_nodes_;
};

cplx evolve_chi_pm(const ChiFunction& chi0, int sign, cplx beta, double t, const CouplingProfile& g,
                   const DecoherenceParams& params, double omega);
cplx evolve_chi_e(const ChiFunction& chi_e0, cplx beta, double t, const CouplingProfile& g,
                  const DecoherenceParams& params, double omega);
cplx evolve_chi_g(const ChiFunction& chi_g0, const ChiFunction& chi_e0, cplx beta, double t,
                  const CouplingProfile& g, const DecoherenceParams& params, double omega);

/// Characteristic function of the oscillator after the protocol starting
/// from |+> (x) |0>, conditioned on the qubit outcome
/// (|g> + sign e^{i varphi}|e>)/sqrt(2).
class PreparedCat {
 public:
  PreparedCat(std::shared_ptr<const MatricialEvolution> evolution, double varphi, int sign);

  cplx operator()(cplx beta) const;
  /// Post-selection probability.
  double probability() const { return 0.5 * normalization_.real(); }
  /// The cat the protocol would produce without decoherence: alpha = xi/2.
  OscillatorState ideal() const;

 private:
  cplx combination(cplx beta) const;

  std::shared_ptr<const MatricialEvolution> evolution_;
  MatricialInitial initial_;
  double varphi_;
  int sign_;
  cplx normalization_;
};

/// Throws kInvalidArgument for n_q > 0 and kNullOutcome when the requested
/// outcome has vanishing probability.
PreparedCat chi_prepared_cat(double t, const CouplingProfile& g, const DecoherenceParams& params, double omega,
                             double varphi, int sign, const FunctionalOptions& options = {});

/// Cat-scan CSV: beta_re, beta_im, chi_ideal_re, chi_ideal_im, chi_prepared_re, chi_prepared_im.
void write_cat_csv(std::ostream& out, const std::vector<cplx>& grid, const PreparedCat& cat);

}  // namespace chiprobe
