#include <cmath>

#include <gtest/gtest.h>

#include "chiprobe/states.hpp"
#include "support.hpp"

using namespace chiprobe;

namespace {

// Explicit sum L_n(x) = sum_k C(n,k) (-x)^k / k!.
double laguerre_sum(int n, double x) {
  double sum = 0.0, binom = 1.0, term = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      binom *= static_cast<double>(n - k + 1) / k;
      term *= -x / k;
    }
    sum += binom * term;
  }
  return sum;
}

Eigen::VectorXcd coherent_vector(int dim, cplx alpha) {
  Eigen::VectorXcd v(dim);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

std::vector<OscillatorState> analytic_family() {
  return {OscillatorState::vacuum(),
          OscillatorState::fock(3),
          OscillatorState::fock(5),
          OscillatorState::coherent({0.6, -0.4}),
          OscillatorState::thermal(0.7),
          OscillatorState::cat({0.9, 0.3}, kPi / 2, 1),
          OscillatorState::cat({-0.5, 0.8}, 0.4, -1)};
}

std::vector<cplx> sample_points(std::uint64_t seed, int count, double radius) {
  auto gen = ref::rng(seed);
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) out.push_back(std::polar(ref::uniform(gen, 0, radius), ref::uniform(gen, 0, kTwoPi)));
  return out;
}

}  // namespace

TEST(ChiAnalytic, UnityAtOrigin) {
  for (const auto& s : analytic_family()) EXPECT_NEAR(std::abs(chi_analytic(s, 0.0) - 1.0), 0.0, 1e-15) << s.describe();
}

TEST(ChiAnalytic, FockFiveAtUnitRadius) {
  const double expected = std::exp(-0.5) * laguerre_sum(5, 1.0);
  const auto s = OscillatorState::fock(5);
  EXPECT_NEAR(chi_analytic(s, std::polar(1.0, 0.7)).real(), expected, 1e-14);
  EXPECT_NEAR(chi_numeric(to_density_matrix(s, 30), std::polar(1.0, 0.7)).value.real(), expected, 1e-10);
}

TEST(ChiAnalytic, CatMatchesStateVectorConstruction) {
  for (int sign : {1, -1}) {
    for (double varphi : {0.0, kPi / 2, kPi}) {
      const cplx alpha{1.0, 0.0};
      const int dim = 40;
      const Eigen::VectorXcd psi =
          coherent_vector(dim, alpha) + static_cast<double>(sign) * std::polar(1.0, -varphi) * coherent_vector(dim, -alpha);
      const Matrix rho = psi * psi.adjoint() / psi.squaredNorm();
      const DensityMatrix dm(rho);
      const auto s = OscillatorState::cat(alpha, varphi, sign);
      for (const cplx beta : sample_points(17, 20, 2.5)) {
        EXPECT_LT(std::abs(chi_analytic(s, beta) - chi_numeric(dm, beta).value), 1e-10)
            << "sign " << sign << " varphi " << varphi << " beta " << beta;
      }
    }
  }
}

TEST(ChiAnalytic, RejectsNumericStates) {
  const auto s = OscillatorState::numeric(to_density_matrix(OscillatorState::vacuum(), 4));
  EXPECT_CHIPROBE_ERROR(chi_analytic(s, 0.3), ErrorCode::kInvalidArgument);
  EXPECT_NEAR(characteristic(s, 0.0).real(), 1.0, 1e-14);
}

TEST(ChiAnalytic, CatNormalizationMustBePositive) {
  EXPECT_CHIPROBE_ERROR(OscillatorState::cat(0.0, 0.0, -1), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(OscillatorState::cat(0.0, 0.0, 1));
}

TEST(ChiNumeric, VacuumExamples) {
  const auto rho = to_density_matrix(OscillatorState::vacuum(), 30);
  EXPECT_NEAR(std::abs(chi_numeric(rho, 0.0).value - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(chi_numeric(rho, 1.0).value - std::exp(-0.5)), 0.0, 1e-8);
}

TEST(ChiNumeric, FockThreeMatchesAnalytic) {
  const auto s = OscillatorState::fock(3);
  const auto rho = to_density_matrix(s, 30);
  for (const cplx beta : sample_points(3, 30, 2.0)) {
    EXPECT_LT(std::abs(chi_numeric(rho, beta).value - chi_analytic(s, beta)), 1e-6);
  }
}

TEST(ChiNumeric, WarnsWhenPopulationReachesTheEdge) {
  Matrix m = Matrix::Zero(16, 16);
  m(0, 0) = 1.0 - 1e-6;
  m(14, 14) = 1e-6;
  EXPECT_TRUE(chi_numeric(DensityMatrix(m), 0.5).truncation_warning);
  EXPECT_FALSE(chi_numeric(to_density_matrix(OscillatorState::fock(2), 10), 0.5).truncation_warning);
}

TEST(DisplacementMatrix, CreatesCoherentStatesFromVacuum) {
  // D(beta)|0> = |beta> fixes the sign convention independently of chi.
  const int dim = 40;
  for (const cplx beta : sample_points(9, 10, 2.0)) {
    const Eigen::VectorXcd moved = displacement_matrix(dim, beta).col(0);
    EXPECT_LT((moved - coherent_vector(dim, beta)).norm(), 1e-10);
  }
}

TEST(DisplacementMatrix, IsUnitaryAwayFromTheCutoff) {
  const Matrix d = displacement_matrix(40, {0.8, -0.5});
  const Matrix product = d.adjoint() * d;
  EXPECT_LT((product.topLeftCorner(20, 20) - Matrix::Identity(20, 20)).norm(), 1e-10);
}

TEST(ToDensityMatrix, FockTwo) {
  const auto rho = to_density_matrix(OscillatorState::fock(2), 10);
  Matrix expected = Matrix::Zero(10, 10);
  expected(2, 2) = 1.0;
  EXPECT_EQ(rho.matrix(), expected);
}

TEST(ToDensityMatrix, CoherentIsPoissonian) {
  const auto rho = to_density_matrix(OscillatorState::coherent(0.5), 20);
  double factorial = 1.0;
  for (int n = 0; n < 20; ++n) {
    if (n > 0) factorial *= n;
    EXPECT_NEAR(rho.matrix()(n, n).real(), std::exp(-0.25) * std::pow(0.25, n) / factorial, 1e-12);
  }
}

TEST(ToDensityMatrix, ZeroTemperatureThermalIsVacuum) {
  const auto rho = to_density_matrix(OscillatorState::thermal(0.0), 5);
  Matrix expected = Matrix::Zero(5, 5);
  expected(0, 0) = 1.0;
  EXPECT_LT((rho.matrix() - expected).norm(), 1e-15);
}

TEST(ToDensityMatrix, InsufficientDimensionIsRejected) {
  EXPECT_CHIPROBE_ERROR(to_density_matrix(OscillatorState::fock(5), 5), ErrorCode::kTruncation);
  EXPECT_CHIPROBE_ERROR(to_density_matrix(OscillatorState::coherent(2.0), 8), ErrorCode::kTruncation);
  EXPECT_CHIPROBE_ERROR(to_density_matrix(OscillatorState::thermal(1.0), 10), ErrorCode::kTruncation);
  EXPECT_NO_THROW(to_density_matrix(OscillatorState::thermal(1.0), 20));
}

TEST(DensityMatrix, ValidatesInvariants) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  EXPECT_NO_THROW(DensityMatrix{m});
  Matrix not_hermitian = m;
  not_hermitian(0, 1) = 0.1;
  EXPECT_CHIPROBE_ERROR(DensityMatrix{not_hermitian}, ErrorCode::kInvalidArgument);
  Matrix bad_trace = m * 1.1;
  EXPECT_CHIPROBE_ERROR(DensityMatrix{bad_trace}, ErrorCode::kInvalidArgument);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.2;
  negative(1, 1) = -0.2;
  EXPECT_CHIPROBE_ERROR(DensityMatrix{negative}, ErrorCode::kInvalidArgument);
}

TEST(StateProperties, HermitianSymmetry) {
  for (const auto& s : analytic_family()) {
    for (const cplx beta : sample_points(5, 25, 3.0)) {
      EXPECT_LT(std::abs(chi_analytic(s, -beta) - std::conj(chi_analytic(s, beta))), 1e-13) << s.describe();
    }
  }
}

TEST(StateProperties, BoundedByOne) {
  for (const auto& s : analytic_family()) {
    for (const cplx beta : sample_points(6, 50, 4.0)) EXPECT_LE(std::abs(chi_analytic(s, beta)), 1.0 + 1e-13);
  }
}

TEST(StateProperties, CatInterferencePeaksAtTwiceAlpha) {
  const cplx alpha = std::polar(1.2, 0.6);
  const auto s = OscillatorState::cat(alpha, kPi / 2, 1);
  const double at_peak = std::abs(chi_analytic(s, 2.0 * alpha));
  EXPECT_GT(at_peak, std::abs(chi_analytic(s, 1.5 * alpha)));
  EXPECT_GT(at_peak, std::abs(chi_analytic(s, 2.5 * alpha)));
  EXPECT_GT(at_peak, 0.3);
}

TEST(StateProperties, NumericMatchesAnalyticAtDimensionForty) {
  for (const auto& s : analytic_family()) {
    const auto rho = to_density_matrix(s, 40);
    for (const cplx beta : sample_points(12, 30, 3.0)) {
      EXPECT_LT(std::abs(chi_numeric(rho, beta).value - chi_analytic(s, beta)), 1e-6) << s.describe();
    }
  }
}

TEST(Laguerre, MatchesExplicitSum) {
  for (int n = 0; n <= 20; ++n) {
    for (double x : {0.0, 0.3, 1.0, 2.5, 7.0}) {
      EXPECT_NEAR(laguerre(n, x), laguerre_sum(n, x), 1e-9 * (1 + std::abs(laguerre_sum(n, x))));
    }
  }
}

TEST(StateGrammar, ParsesEachFamily) {
  EXPECT_EQ(std::get<FockState>(OscillatorState::parse("fock:5").form()).n, 5);
  const auto c = std::get<CoherentState>(OscillatorState::parse("coherent:0.5+0.2i").form());
  EXPECT_EQ(c.alpha, cplx(0.5, 0.2));
  EXPECT_DOUBLE_EQ(std::get<ThermalState>(OscillatorState::parse("thermal:1.3").form()).nbar, 1.3);
  const auto cat = std::get<CatState>(OscillatorState::parse("cat:1.0,pi/2,+").form());
  EXPECT_EQ(cat.alpha, cplx(1.0, 0.0));
  EXPECT_DOUBLE_EQ(cat.varphi, kPi / 2);
  EXPECT_EQ(cat.sign, 1);
  EXPECT_EQ(std::get<CatState>(OscillatorState::parse("cat:0.5i,0,-").form()).sign, -1);
  EXPECT_EQ(std::get<FockState>(OscillatorState::parse("vacuum:").form()).n, 0);
}

TEST(StateGrammar, RejectsMalformedSpecs) {
  for (const char* bad : {"fock:-1", "fock:x", "squeezed:1", "coherent:", "thermal:-2", "cat:1,0", "fock5"}) {
    EXPECT_CHIPROBE_ERROR(OscillatorState::parse(bad), ErrorCode::kInvalidArgument);
  }
}

TEST(StateGrammar, ComplexAndRealHelpers) {
  EXPECT_EQ(parse_complex("-0.3-2i"), cplx(-0.3, -2.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("1.5"), cplx(1.5, 0.0));
  EXPECT_DOUBLE_EQ(parse_real("-pi/2"), -kPi / 2);
  EXPECT_DOUBLE_EQ(parse_real("2*pi"), kTwoPi);
}
