#pragma once

// Brute-force integration of the qubit-oscillator master equation in the
// interaction picture,
//
//   d rho/dt = -i [g(t) sz (a e^{-i omega t} + a^dag e^{i omega t}), rho]
//              + kappa/2 (N_m+1) D[a] + kappa/2 N_m D[a^dag]
//              + gamma1/2 (N_q+1) D[s-] + gamma1/2 N_q D[s+] + gamma2/2 D[sz],
//
// with D[A]rho = 2 A rho A^dag - A^dag A rho - rho A^dag A, on a truncated Fock
// basis. Serves as ground truth for the closed-form signal and the cat
// preparation formulas.

#include "chiprobe/core_model.hpp"
#include "chiprobe/functionals.hpp"
#include "chiprobe/states.hpp"

namespace chiprobe {

enum class Qubit { kExcited = 0, kGround = 1 };

/// Joint density matrix, basis index = qubit * dim + fock with qubit 0 = |e>,
/// 1 = |g>.
class JointState {
 public:
  JointState(int dim, Matrix rho);

  /// |+><+| (x) rho0 with |+> = (|g> + |e>)/sqrt(2).
  static JointState plus_product(const DensityMatrix& rho0);
  /// (|psi><psi|) (x) rho0 for a normalized qubit vector (c_e, c_g).
  static JointState product(cplx c_e, cplx c_g, const DensityMatrix& rho0);

  int dim() const { return dim_; }
  const Matrix& matrix() const { return rho_; }

  /// Oscillator operator <row| rho |col> for qubit basis states.
  Matrix block(Qubit row, Qubit col) const;
  /// Oscillator marginal tr_qubit rho.
  Matrix oscillator_marginal() const;

 private:
  int dim_;
  Matrix rho_;
};

struct OracleConfig {
  int dim = 30;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step_fraction = 1.0 / 50.0;  // of the drive period 2pi/omega
};

struct OracleDiagnostics {
  std::size_t steps = 0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double top_population = 0.0;  // population of the three highest Fock levels
};

JointState evolve_master(const JointState& initial, const CouplingProfile& g, double t,
                         const DecoherenceParams& params, double omega, const OracleConfig& config = {},
                         OracleDiagnostics* diagnostics = nullptr);

struct PauliExpectations {
  double sx = 0.0;
  double sy = 0.0;
};

PauliExpectations pauli_expectations(const JointState& state);

/// chi(xi(g,t)) e^{-f(g,t)}: the closed-form value of <sx> + i<sy>.
cplx predicted_signal(const OscillatorState& state, const CouplingProfile& g, double t,
                      const DecoherenceParams& params, double omega, const FunctionalOptions& options = {});

struct PostSelection {
  DensityMatrix state;
  double probability;
};

/// Conditions the oscillator on the qubit outcome (|g> + sign e^{i varphi}|e>)/sqrt(2).
PostSelection postselect_qubit(const JointState& state, double varphi, int sign);

/// Oracle run of the reconstruction protocol: prepares |+><+| (x) rho0,
/// evolves, and returns <sx> + i<sy>.
cplx oracle_signal(const OscillatorState& state, const CouplingProfile& g, double t,
                   const DecoherenceParams& params, double omega, const OracleConfig& config = {});

}  // namespace chiprobe
