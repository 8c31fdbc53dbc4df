#pragma once

// Oscillator states and their characteristic functions
//
//   chi(beta) = tr{rho D(beta)},   D(beta) = exp(beta a^dag - beta^* a).
//
// This is the displacement convention under which the qubit signal of the
// parametric protocol reads <sx> + i<sy> = chi(xi) e^{-f}; the opposite sign
// convention would measure chi(-xi) instead.

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "chiprobe/core_model.hpp"

namespace chiprobe {

using Matrix = Eigen::MatrixXcd;

struct FockState {
  int n = 0;
};

struct CoherentState {
  cplx alpha;
};

struct ThermalState {
  double nbar = 0.0;
};

/// Normalized |alpha> + sign e^{-i varphi} |-alpha>.
struct CatState {
  cplx alpha;
  double varphi = 0.0;
  int sign = +1;
};

/// Truncated Fock-basis density matrix, validated on construction.
class DensityMatrix {
 public:
  /// Checks Hermiticity (1e-12), unit trace (1e-10) and eigenvalues >= -1e-10.
  explicit DensityMatrix(Matrix rho, double truncation_error = 0.0);

  /// For integrator output: symmetrizes, clips eigenvalues in [-eig_tol, 0)
  /// to zero and renormalizes. Eigenvalues below -eig_tol are an error.
  static DensityMatrix repaired(const Matrix& rho, double eig_tol);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }
  /// Population discarded when this matrix was truncated from an exact state.
  double truncation_error() const { return truncation_error_; }
  /// Total population on Fock levels >= level.
  double tail_population(int level) const;

 private:
  Matrix rho_;
  double truncation_error_ = 0.0;
};

class OscillatorState {
 public:
  using Variant = std::variant<FockState, CoherentState, ThermalState, CatState, DensityMatrix>;

  static OscillatorState fock(int n);
  static OscillatorState coherent(cplx alpha);
  static OscillatorState thermal(double nbar);
  static OscillatorState cat(cplx alpha, double varphi, int sign);
  static OscillatorState numeric(DensityMatrix rho);
  static OscillatorState vacuum() { return fock(0); }

  /// Parses `fock:5`, `coherent:0.5+0.2i`, `thermal:1.3`, `cat:1.0,pi/2,+`.
  static OscillatorState parse(const std::string& spec);

  const Variant& form() const { return form_; }
  bool is_analytic() const { return !std::holds_alternative<DensityMatrix>(form_); }
  std::string describe() const;

 private:
  explicit OscillatorState(Variant form) : form_(std::move(form)) {}

  Variant form_;
};

/// Closed-form chi for the analytic families. Throws for DensityMatrix.
cplx chi_analytic(const OscillatorState& state, cplx beta);

struct ChiNumeric {
  cplx value;
  bool truncation_warning = false;  // population above dim-5 exceeds 1e-8
};

ChiNumeric chi_numeric(const DensityMatrix& rho, cplx beta);

/// chi_analytic for analytic states, chi_numeric otherwise.
cplx characteristic(const OscillatorState& state, cplx beta);

/// exp(beta a^dag - beta^* a) on the truncated basis (scaling and squaring).
Matrix displacement_matrix(int dim, cplx beta);

/// Annihilation operator on the truncated basis.
Matrix annihilation(int dim);

/// Smallest dim accepted by to_density_matrix for this state.
int minimum_dimension(const OscillatorState& state);

DensityMatrix to_density_matrix(const OscillatorState& state, int dim);

/// L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

/// Parses reals like `0.5`, `-pi/2`, `2*pi`, `pi`.
double parse_real(const std::string& text);

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`.
cplx parse_complex(const std::string& text);

}  // namespace chiprobe
