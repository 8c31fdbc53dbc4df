#include "chiprobe/lindblad.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

using StateVector = std::vector<cplx>;

// Right-hand side of the master equation, evaluated element by element using
// the tridiagonal structure of a and a^dag.
class MasterEquation {
 public:
  MasterEquation(int dim, const CouplingProfile& g, const DecoherenceParams& params, double omega)
      : dim_(dim), g_(g), omega_(omega), kappa_(params.kappa()), n_m_(params.n_m()) {
    root_.resize(dim + 1);
    for (int n = 0; n <= dim; ++n) root_[n] = std::sqrt(static_cast<double>(n));
    const double gamma1 = params.gamma1();
    const double n_q = params.n_q();
    decay_ = gamma1 * (n_q + 1.0);
    excite_ = gamma1 * n_q;
    coherence_ = gamma1 * (n_q + 0.5) + 2.0 * params.gamma2();
  }

  void operator()(const StateVector& x, StateVector& dxdt, double t) const {
    const int d = dim_;
    const int full = 2 * d;
    auto rho = [&](int i, int j) { return x[static_cast<std::size_t>(i) * full + j]; };
    const double coupling = g_(t);
    const cplx lower = std::polar(1.0, -omega_ * t);  // multiplies a
    const cplx raise = std::conj(lower);               // multiplies a^dag
    const double up = 0.5 * kappa_ * (n_m_ + 1.0);
    const double down = 0.5 * kappa_ * n_m_;

    for (int qi = 0; qi < 2; ++qi) {
      const double si = qi == 0 ? 1.0 : -1.0;
      for (int qj = 0; qj < 2; ++qj) {
        const double sj = qj == 0 ? 1.0 : -1.0;
        const int bi = qi * d;
        const int bj = qj * d;
        for (int m = 0; m < d; ++m) {
          for (int n = 0; n < d; ++n) {
            const int i = bi + m;
            const int j = bj + n;
            // K rho and rho K with K = a e^{-i w t} + a^dag e^{i w t}.
            cplx k_rho{0.0, 0.0};
            if (m + 1 < d) k_rho += lower * root_[m + 1] * rho(i + 1, j);
            if (m > 0) k_rho += raise * root_[m] * rho(i - 1, j);
            cplx rho_k{0.0, 0.0};
            if (n > 0) rho_k += lower * root_[n] * rho(i, j - 1);
            if (n + 1 < d) rho_k += raise * root_[n + 1] * rho(i, j + 1);
            cplx value = -kI * coupling * (si * k_rho - sj * rho_k);

            const cplx here = rho(i, j);
            cplx osc = -(up * (m + n) + down * (m + n + 2)) * here;
            if (m + 1 < d && n + 1 < d) osc += 2.0 * up * root_[m + 1] * root_[n + 1] * rho(i + 1, j + 1);
            if (m > 0 && n > 0) osc += 2.0 * down * root_[m] * root_[n] * rho(i - 1, j - 1);
            value += osc;

            if (qi != qj) {
              value -= coherence_ * here;
            } else if (qi == 0) {
              value += -decay_ * here + excite_ * rho(i + d, j + d);
            } else {
              value += decay_ * rho(i - d, j - d) - excite_ * here;
            }
            dxdt[static_cast<std::size_t>(i) * full + j] = value;
          }
        }
      }
    }
  }

 private:
  int dim_;
  const CouplingProfile& g_;
  double omega_;
  double kappa_;
  double n_m_;
  double decay_ = 0.0;
  double excite_ = 0.0;
  double coherence_ = 0.0;
  std::vector<double> root_;
};

double top_levels_population(const Matrix& rho, int dim) {
  double sum = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int n = std::max(0, dim - 3); n < dim; ++n) sum += rho(q * dim + n, q * dim + n).real();
  }
  return sum;
}

}  // namespace

JointState::JointState(int dim, Matrix rho) : dim_(dim), rho_(std::move(rho)) {
  require(dim >= 1, "joint state dimension must be >= 1");
  require(rho_.rows() == 2 * dim && rho_.cols() == 2 * dim, "joint state matrix must be (2 dim) x (2 dim)");
}

JointState JointState::product(cplx c_e, cplx c_g, const DensityMatrix& rho0) {
  const double norm = std::norm(c_e) + std::norm(c_g);
  require(std::abs(norm - 1.0) < 1e-12, "qubit vector must be normalized");
  Eigen::Matrix2cd q;
  q << c_e * std::conj(c_e), c_e * std::conj(c_g), c_g * std::conj(c_e), c_g * std::conj(c_g);
  const int d = rho0.dim();
  Matrix full(2 * d, 2 * d);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) full.block(a * d, b * d, d, d) = q(a, b) * rho0.matrix();
  }
  return JointState(d, std::move(full));
}

JointState JointState::plus_product(const DensityMatrix& rho0) {
  const double h = std::sqrt(0.5);
  return product(h, h, rho0);
}

Matrix JointState::block(Qubit row, Qubit col) const {
  return rho_.block(static_cast<int>(row) * dim_, static_cast<int>(col) * dim_, dim_, dim_);
}

Matrix JointState::oscillator_marginal() const {
  return block(Qubit::kExcited, Qubit::kExcited) + block(Qubit::kGround, Qubit::kGround);
}

JointState evolve_master(const JointState& initial, const CouplingProfile& g, double t,
                         const DecoherenceParams& params, double omega, const OracleConfig& config,
                         OracleDiagnostics* diagnostics) {
  require(config.dim >= 4, "oracle dimension must be >= 4");
  require(config.rel_tol > 0.0 && config.abs_tol > 0.0, "oracle tolerances must be positive");
  require(config.max_step_fraction > 0.0, "oracle max step must be positive");
  require(initial.dim() == config.dim, "initial state dimension does not match oracle config");
  require(std::isfinite(t) && t >= 0.0, "evolution time must be >= 0");
  require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");

  const int d = initial.dim();
  const double initial_top = top_levels_population(initial.matrix(), d);
  if (initial_top > 1e-6) {
    fail(ErrorCode::kTruncation, "initial state populates the top Fock levels (" + std::to_string(initial_top) + ")");
  }

  StateVector x(static_cast<std::size_t>(4) * d * d);
  for (int i = 0; i < 2 * d; ++i) {
    for (int j = 0; j < 2 * d; ++j) x[static_cast<std::size_t>(i) * 2 * d + j] = initial.matrix()(i, j);
  }

  namespace odeint = boost::numeric::odeint;
  MasterEquation rhs(d, g, params, omega);
  const double max_dt = config.max_step_fraction * kTwoPi / omega;
  std::size_t steps = 0;
  if (t > 0.0) {
    auto stepper = odeint::make_controlled(config.abs_tol, config.rel_tol, max_dt,
                                           odeint::runge_kutta_dopri5<StateVector>());
    steps = odeint::integrate_adaptive(stepper, rhs, x, 0.0, t, std::min(max_dt, t) * 0.1);
  }

  Matrix out(2 * d, 2 * d);
  for (int i = 0; i < 2 * d; ++i) {
    for (int j = 0; j < 2 * d; ++j) out(i, j) = x[static_cast<std::size_t>(i) * 2 * d + j];
  }
  out = 0.5 * (out + out.adjoint()).eval();

  const double drift = std::abs(out.trace() - 1.0);
  const double top = top_levels_population(out, d);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(out, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (diagnostics != nullptr) *diagnostics = {steps, drift, min_eig, top};

  if (!out.allFinite()) fail(ErrorCode::kComputation, "master equation integration diverged");
  if (drift > 1e-6) fail(ErrorCode::kComputation, "trace drift " + std::to_string(drift) + " exceeds 1e-6");
  if (top > 1e-6) {
    fail(ErrorCode::kTruncation, "population " + std::to_string(top) + " leaked into the top Fock levels at dim " +
                                     std::to_string(d));
  }
  if (min_eig < -1e-6) fail(ErrorCode::kComputation, "state lost positivity (eigenvalue " + std::to_string(min_eig) + ")");
  return JointState(d, std::move(out));
}

PauliExpectations pauli_expectations(const JointState& state) {
  const cplx ge = state.block(Qubit::kGround, Qubit::kExcited).trace();
  return {2.0 * ge.real(), 2.0 * ge.imag()};
}

cplx predicted_signal(const OscillatorState& state, const CouplingProfile& g, double t,
                      const DecoherenceParams& params, double omega, const FunctionalOptions& options) {
  const FunctionalResult r = evaluate_functionals(g, t, params, omega, options);
  return characteristic(state, r.xi) * std::exp(-r.f);
}

PostSelection postselect_qubit(const JointState& state, double varphi, int sign) {
  require(sign == 1 || sign == -1, "post-selection sign must be +1 or -1");
  const double s = sign;
  const cplx phase = std::polar(1.0, varphi);
  // <phi| rho |phi> with <phi| = (<g| + sign e^{-i varphi} <e|)/sqrt(2).
  const Matrix projected = 0.5 * (state.block(Qubit::kGround, Qubit::kGround) +
                                  state.block(Qubit::kExcited, Qubit::kExcited) +
                                  s * phase * state.block(Qubit::kGround, Qubit::kExcited) +
                                  s * std::conj(phase) * state.block(Qubit::kExcited, Qubit::kGround));
  const double p = projected.trace().real();
  if (!(p >= 1e-10)) {
    fail(ErrorCode::kNullOutcome, "post-selection outcome has probability " + std::to_string(p));
  }
  return {DensityMatrix::repaired(projected / p, 1e-6), std::min(1.0, p)};
}

cplx oracle_signal(const OscillatorState& state, const CouplingProfile& g, double t,
                   const DecoherenceParams& params, double omega, const OracleConfig& config) {
  const JointState initial = JointState::plus_product(to_density_matrix(state, config.dim));
  const JointState final_state = evolve_master(initial, g, t, params, omega, config);
  const PauliExpectations e = pauli_expectations(final_state);
  return {e.sx, e.sy};
}

}  // namespace chiprobe
