#include <cmath>

#include <gtest/gtest.h>

#include "chiprobe/lindblad.hpp"
#include "support.hpp"

using namespace chiprobe;

namespace {

const double kOmega = kTwoPi;

double period() { return kTwoPi / kOmega; }

JointState plus_vacuum(int dim) {
  return JointState::plus_product(to_density_matrix(OscillatorState::vacuum(), dim));
}

}  // namespace

TEST(EvolveMaster, IdentityWithoutCouplingOrRates) {
  const auto initial =
      JointState::product(cplx{0.6, 0.0}, cplx{0.0, 0.8}, to_density_matrix(OscillatorState::coherent(0.7), 20));
  const auto out = evolve_master(initial, CouplingProfile::zero(), 3.7, DecoherenceParams::none(), kOmega, {20});
  EXPECT_LT((out.matrix() - initial.matrix()).norm(), 1e-9);
}

TEST(EvolveMaster, PureDephasingDecay) {
  const DecoherenceParams p(0.0, 0.0, 0.15, 0.0, 0.0);
  for (double t : {0.5, 2.0, 5.0}) {
    const auto out = evolve_master(plus_vacuum(6), CouplingProfile::zero(), t, p, kOmega, {6});
    const auto e = pauli_expectations(out);
    EXPECT_NEAR(e.sx, std::exp(-2 * 0.15 * t), 1e-8);
    EXPECT_NEAR(e.sy, 0.0, 1e-12);
  }
}

TEST(EvolveMaster, HarmonicDriveMatchesClosedFormSignal) {
  const DecoherenceParams p(0.01 * kOmega, 0.01 * kOmega, 0.005 * kOmega, 0.3, 0.1);
  const auto state = OscillatorState::fock(1);
  for (int n : {1, 2}) {
    const auto g = CouplingProfile::harmonic(0.1, 0.45, 0.8, kOmega, p.kappa());
    const double t = n * period();
    const cplx oracle = oracle_signal(state, g, t, p, kOmega);
    EXPECT_LT(std::abs(oracle - predicted_signal(state, g, t, p, kOmega)), 1e-4);
  }
}

TEST(EvolveMaster, DiagnosticsReportTraceAndPositivity) {
  const DecoherenceParams p(0.05, 0.03, 0.02, 0.4, 0.2);
  OracleDiagnostics diag;
  const auto g = CouplingProfile::harmonic(0.0, 0.4, 0.2, kOmega, p.kappa());
  (void)evolve_master(plus_vacuum(25), g, 2 * period(), p, kOmega, {25}, &diag);
  EXPECT_GT(diag.steps, 0u);
  EXPECT_LT(diag.trace_drift, 1e-8);
  EXPECT_GT(diag.min_eigenvalue, -1e-6);
  EXPECT_LT(diag.top_population, 1e-6);
}

TEST(EvolveMaster, TruncationLeakageIsAnError) {
  const auto g = CouplingProfile::harmonic(0.0, 1.5, 0.0, kOmega, 0.0);
  EXPECT_CHIPROBE_ERROR(evolve_master(plus_vacuum(8), g, 2 * period(), DecoherenceParams::none(), kOmega, {8}),
                        ErrorCode::kTruncation);
}

TEST(EvolveMaster, ThermalizesWithoutQubitCoupling) {
  const DecoherenceParams p(1.0, 0.0, 0.0, 0.5, 0.0);
  const double t = 30.0;
  OracleConfig cfg{20};
  cfg.max_step_fraction = 1.0;
  const auto initial =
      JointState::plus_product(to_density_matrix(OscillatorState::coherent({0.8, 0.3}), 20));
  const auto out = evolve_master(initial, CouplingProfile::zero(), t, p, kOmega, cfg);
  const DensityMatrix marginal = DensityMatrix::repaired(out.oscillator_marginal(), 1e-8);
  for (const cplx beta : {cplx{0.5, 0.0}, cplx{-0.3, 0.9}, cplx{1.2, -0.4}}) {
    EXPECT_LT(std::abs(chi_numeric(marginal, beta).value - std::exp(-(0.5 + 0.5) * std::norm(beta))), 1e-6);
  }
}

TEST(PauliExpectations, PlusStateIsAlongX) {
  const auto e = pauli_expectations(JointState::plus_product(to_density_matrix(OscillatorState::fock(2), 5)));
  EXPECT_NEAR(e.sx, 1.0, 1e-15);
  EXPECT_NEAR(e.sy, 0.0, 1e-15);
}

TEST(PauliExpectations, ExcitedStateHasNoTransverseComponent) {
  const auto e = pauli_expectations(JointState::product(1.0, 0.0, to_density_matrix(OscillatorState::vacuum(), 4)));
  EXPECT_EQ(e.sx, 0.0);
  EXPECT_EQ(e.sy, 0.0);
}

TEST(PauliExpectations, EquatorialPhase) {
  // sigma_y = -i(|e><g| - |g><e|) gives <sigma_y> = -sin(phi) for (|g> + e^{i phi}|e>)/sqrt(2).
  const double h = 1.0 / std::sqrt(2.0);
  for (double phi : {0.0, 0.4, 2.0, 4.5}) {
    const auto e = pauli_expectations(
        JointState::product(h * std::polar(1.0, phi), h, to_density_matrix(OscillatorState::vacuum(), 3)));
    EXPECT_NEAR(e.sx, std::cos(phi), 1e-15);
    EXPECT_NEAR(e.sy, -std::sin(phi), 1e-15);
  }
}

TEST(PredictedSignal, UnityAtTimeZero) {
  const auto g = CouplingProfile::harmonic(0.0, 0.5, 0.3, kOmega, 0.1);
  EXPECT_NEAR(std::abs(predicted_signal(OscillatorState::fock(4), g, 0.0, {0.1, 0.1, 0.1, 1, 0}, kOmega) - 1.0), 0.0,
              1e-15);
}

TEST(PredictedSignal, VacuumIsGaussianAndMatchesOracle) {
  const DecoherenceParams p(0.02, 0.03, 0.01, 0.5, 0.0);
  const auto g = CouplingProfile::harmonic(0.2, 0.5, 1.2, kOmega, p.kappa());
  const double t = 2 * period();
  const auto r = evaluate_functionals(g, t, p, kOmega);
  const cplx expected = std::exp(-0.5 * std::norm(r.xi) - r.f);
  const cplx predicted = predicted_signal(OscillatorState::vacuum(), g, t, p, kOmega);
  EXPECT_LT(std::abs(predicted - expected), 1e-14);
  EXPECT_LT(std::abs(oracle_signal(OscillatorState::vacuum(), g, t, p, kOmega) - predicted), 1e-4);
}

TEST(PredictedSignal, FockFiveGridAgainstOracle) {
  // Reduced-temperature version of the laboratory scan: |xi| <= 2.
  const DecoherenceParams p(0.005 * kOmega, 0.004 * kOmega, 0.004 * kOmega, 0.5, 0.0);
  const auto state = OscillatorState::fock(5);
  const auto initial = JointState::plus_product(to_density_matrix(state, 30));
  const int side = 20;
  double worst = 0.0;
  int sign_changes = 0;
  double previous = 0.0;
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      const cplx beta{-2.0 + 4.0 * ix / (side - 1), -2.0 + 4.0 * iy / (side - 1)};
      if (std::abs(beta) > 2.0) continue;
      const int n = static_cast<int>(std::floor(std::abs(beta) / 0.5)) + 1;
      const auto g = CouplingProfile::harmonic(0.0, std::abs(beta) / n, std::arg(beta), kOmega, p.kappa());
      const double t = n * period();
      const cplx predicted = predicted_signal(state, g, t, p, kOmega);
      const auto e = pauli_expectations(evolve_master(initial, g, t, p, kOmega));
      worst = std::max(worst, std::abs(cplx{e.sx, e.sy} - predicted));
      if (iy == side / 2) {
        if (ix > 0 && (predicted.real() > 0) != (previous > 0)) ++sign_changes;
        previous = predicted.real();
      }
    }
  }
  EXPECT_LT(worst, 1e-4);
  EXPECT_GE(sign_changes, 4);  // Laguerre rings cross the real axis
}

TEST(PostSelect, MatchingOutcomeReturnsOscillatorState) {
  const auto rho0 = to_density_matrix(OscillatorState::coherent({0.3, 0.2}), 12);
  const auto out = postselect_qubit(JointState::plus_product(rho0), 0.0, 1);
  EXPECT_NEAR(out.probability, 1.0, 1e-14);
  EXPECT_LT((out.state.matrix() - rho0.matrix()).norm(), 1e-12);
}

TEST(PostSelect, OrthogonalOutcomeIsNull) {
  const auto rho0 = to_density_matrix(OscillatorState::vacuum(), 6);
  EXPECT_CHIPROBE_ERROR(postselect_qubit(JointState::plus_product(rho0), 0.0, -1), ErrorCode::kNullOutcome);
}

TEST(PostSelect, DecoherenceFreeEvolutionPreparesTheIdealCat) {
  const auto g = CouplingProfile::harmonic(0.0, 0.4, 0.9, kOmega, 0.0);
  const double t = 3 * period();
  const auto out = evolve_master(plus_vacuum(30), g, t, DecoherenceParams::none(), kOmega);
  const cplx alpha = 0.5 * xi(g, t, 0.0, kOmega);
  for (int sign : {1, -1}) {
    for (double varphi : {0.0, 1.0}) {
      const auto ps = postselect_qubit(out, varphi, sign);
      const auto ideal = OscillatorState::cat(alpha, varphi, sign);
      for (const cplx beta : {cplx{0.3, 0.1}, cplx{-1.0, 0.7}, 2.0 * alpha, cplx{0.0, -1.5}}) {
        EXPECT_LT(std::abs(chi_numeric(ps.state, beta).value - chi_analytic(ideal, beta)), 1e-6);
      }
    }
  }
}

TEST(JointState, BlocksAndMarginal) {
  const auto rho0 = to_density_matrix(OscillatorState::fock(1), 4);
  const auto js = JointState::product(cplx{0.6, 0.0}, cplx{0.0, 0.8}, rho0);
  EXPECT_NEAR(js.block(Qubit::kExcited, Qubit::kExcited).trace().real(), 0.36, 1e-15);
  EXPECT_NEAR(js.block(Qubit::kGround, Qubit::kGround).trace().real(), 0.64, 1e-15);
  EXPECT_LT(std::abs(js.block(Qubit::kExcited, Qubit::kGround).trace() - cplx(0.0, -0.48)), 1e-15);
  EXPECT_LT((js.oscillator_marginal() - rho0.matrix()).norm(), 1e-15);
}
