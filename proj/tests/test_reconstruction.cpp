#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "chiprobe/reconstruction.hpp"
#include "support.hpp"

using namespace chiprobe;

namespace {

const double kLabOmega = kTwoPi * 100e6;

DecoherenceParams lab_params() { return {kTwoPi * 50e3, kTwoPi * 0.4e6, kTwoPi * 0.4e6, 19.5, 0.0}; }

ScanOptions lab_scan(ShotPolicy shots) {
  ScanOptions o;
  o.r_max = 0.5;
  o.omega = kLabOmega;
  o.params = lab_params();
  o.plan.n_max = 8;
  o.shots = shots;
  o.seed = 42;
  return o;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double sx = std::accumulate(x.begin(), x.end(), 0.0), sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(PlanPoint, SeventhAnnulus) {
  const auto p = plan_point(3.4, 0.5, lab_params(), kLabOmega);
  EXPECT_EQ(p.n, 7);
  EXPECT_NEAR(p.r, 3.4 / 7, 1e-15);
  EXPECT_EQ(p.phi, 0.0);
  EXPECT_NEAR(p.t, 7 * kTwoPi / kLabOmega, 1e-22);
  EXPECT_LT(std::abs(xi_harmonic_closed(p.r, p.phi, p.n) - cplx(3.4, 0.0)), 1e-14);
}

TEST(PlanPoint, FirstAnnulus) {
  const auto p = plan_point(std::polar(0.3, kPi / 4), 0.5, lab_params(), kLabOmega);
  EXPECT_EQ(p.n, 1);
  EXPECT_NEAR(p.r, 0.3, 1e-15);
  EXPECT_NEAR(p.phi, kPi / 4, 1e-15);
}

TEST(PlanPoint, OriginUsesOnlyDephasing) {
  const auto params = lab_params();
  const auto p = plan_point(0.0, 0.5, params, kLabOmega);
  EXPECT_EQ(p.n, 1);
  EXPECT_EQ(p.r, 0.0);
  EXPECT_NEAR(p.f, derive_rates(params).gamma * kTwoPi / kLabOmega, 1e-15);
}

TEST(PlanPoint, BoundaryTieGoesToLargerN) {
  const auto p = plan_point(1.0, 0.5, lab_params(), kLabOmega);
  EXPECT_EQ(p.n, 3);
}

TEST(PlanPoint, BeyondReachIsAnError) {
  PlanOptions opts;
  opts.n_max = 7;
  EXPECT_CHIPROBE_ERROR(plan_point(3.5, 0.5, lab_params(), kLabOmega, opts), ErrorCode::kOutOfRange);
  EXPECT_NO_THROW(plan_point(3.49, 0.5, lab_params(), kLabOmega, opts));
}

TEST(PlanPoint, FirstOrderModeUsesApproximation) {
  PlanOptions opts;
  opts.damping = DampingMode::kFirstOrder;
  const auto params = lab_params();
  const auto p = plan_point(std::polar(2.2, 1.0), 0.5, params, kLabOmega, opts);
  EXPECT_DOUBLE_EQ(p.f, f_harmonic_approx(0.0, p.r, p.phi, p.n, params, kLabOmega));
  const auto exact = plan_point(std::polar(2.2, 1.0), 0.5, params, kLabOmega);
  EXPECT_NEAR(p.f, exact.f, 1e-2 * exact.f);
}

TEST(PlanPoint, RoundTripThroughClosedForm) {
  auto gen = ref::rng(1);
  for (int i = 0; i < 500; ++i) {
    const cplx beta = std::polar(ref::uniform(gen, 1e-3, 4.99), ref::uniform(gen, -kPi, kPi));
    const auto p = plan_point(beta, 0.5, DecoherenceParams::none(), kTwoPi);
    EXPECT_LT(std::abs(xi_harmonic_closed(p.r, p.phi, p.n) - beta), 1e-12 * std::abs(beta));
    EXPECT_LE((p.n - 1) * 0.5, std::abs(beta));
    EXPECT_LT(std::abs(beta), p.n * 0.5);
  }
}

TEST(PlanPoint, BudgetGrowsAwayFromOrigin) {
  const auto params = lab_params();
  PlanOptions opts;
  opts.n_max = 8;
  std::uint64_t previous = 0;
  for (int k = 1; k <= 200; ++k) {
    const auto p = plan_point(std::polar(3.99 * k / 200, 0.3), 0.5, params, kLabOmega, opts);
    EXPECT_GE(p.budget, previous) << "|beta| = " << 3.99 * k / 200;
    previous = p.budget;
  }
}

TEST(SimulateRuns, CertainOutcome) {
  for (std::uint64_t m : {1u, 7u, 10000u}) {
    const auto s = simulate_runs({1.0, 0.0}, m, m, 5);
    EXPECT_EQ(s.sx, 1.0);
  }
}

TEST(SimulateRuns, ZeroSignalConcentrates) {
  int inside = 0;
  const int seeds = 400;
  for (int seed = 0; seed < seeds; ++seed) inside += std::abs(simulate_runs(0.0, 10000, 10000, seed).sx) < 0.04;
  EXPECT_GE(inside, static_cast<int>(0.99 * seeds));
}

TEST(SimulateRuns, DeterministicInSeed) {
  const auto a = simulate_runs({0.3, -0.2}, 1234, 999, 77);
  const auto b = simulate_runs({0.3, -0.2}, 1234, 999, 77);
  EXPECT_EQ(a.sx, b.sx);
  EXPECT_EQ(a.sy, b.sy);
  const auto c = simulate_runs({0.3, -0.2}, 1234, 999, 78);
  EXPECT_TRUE(a.sx != c.sx || a.sy != c.sy);
}

TEST(SimulateRuns, RejectsInvalidSignals) {
  EXPECT_CHIPROBE_ERROR(simulate_runs({1.2, 0.0}, 10, 10, 1), ErrorCode::kInvalidArgument);
  EXPECT_CHIPROBE_ERROR(simulate_runs({0.0, -1.01}, 10, 10, 1), ErrorCode::kInvalidArgument);
  EXPECT_CHIPROBE_ERROR(simulate_runs({0.0, 0.0}, 0, 10, 1), ErrorCode::kInvalidArgument);
}

TEST(CorrectDecoherence, Examples) {
  EXPECT_NEAR(std::abs(correct_decoherence(std::exp(-1.0), 0.0, 1.0).chi - 1.0), 0.0, 1e-15);
  EXPECT_EQ(correct_decoherence(0.5, 0.5, 0.0).chi, cplx(0.5, 0.5));
  const auto e = correct_decoherence(0.2, -0.1, 0.5, 400, 900);
  EXPECT_NEAR(e.stderr_re, std::exp(0.5) * std::sqrt((1 - 0.04) / 400), 1e-15);
  EXPECT_NEAR(e.stderr_im, std::exp(0.5) * std::sqrt((1 - 0.01) / 900), 1e-15);
  EXPECT_NEAR(e.stderr, std::hypot(e.stderr_re, e.stderr_im), 1e-15);
  EXPECT_EQ(correct_decoherence(0.2, -0.1, 0.5).stderr, 0.0);
}

TEST(CorrectDecoherence, ErrorFloorForSaturatedMeans) {
  // A sample mean of exactly +1 still carries about 1/m binomial uncertainty.
  const auto e = correct_decoherence(1.0, 0.0, 0.0, 100, 100);
  EXPECT_NEAR(e.stderr_re, 0.01, 1e-15);
}

TEST(ScanGrid, OriginRecordIsExact) {
  const auto records = scan_grid(OscillatorState::fock(3), {0.0}, lab_scan(ShotPolicy::budgeted(0.2)));
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].ok);
  EXPECT_EQ(records[0].corrected.chi, cplx(1.0, 0.0));
  EXPECT_EQ(records[0].m_x, 0u);
}

TEST(ScanGrid, InfiniteShotPipelineIsIdentity) {
  const auto state = OscillatorState::fock(5);
  const auto grid = square_grid(3.5, 41, true);
  const auto records = scan_grid(state, grid, lab_scan(ShotPolicy::infinite()));
  double worst = 0.0;
  for (const auto& rec : records) {
    ASSERT_TRUE(rec.ok) << rec.error;
    worst = std::max(worst, std::abs(rec.corrected.chi - chi_analytic(state, rec.point.beta)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(ScanGrid, BudgetedScanCoverage) {
  const auto state = OscillatorState::fock(5);
  const auto grid = square_grid(3.5, 21, true);
  const auto records = scan_grid(state, grid, lab_scan(ShotPolicy::budgeted(0.2)));
  int covered = 0, total = 0;
  for (const auto& rec : records) {
    ASSERT_TRUE(rec.ok) << rec.error;
    if (rec.m_x == 0) continue;
    ++total;
    covered += std::abs(rec.corrected.chi - chi_analytic(state, rec.point.beta)) <= 3 * rec.corrected.stderr;
  }
  EXPECT_GE(covered, 0.95 * total);
}

TEST(ScanGrid, EstimatorIsUnbiased) {
  const auto state = OscillatorState::coherent({0.4, 0.2});
  const cplx beta{0.7, -0.5};
  const auto o = lab_scan(ShotPolicy::fixed(2000));
  cplx sum = 0.0;
  double err = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    auto opts = o;
    opts.seed = static_cast<std::uint64_t>(s);
    const auto rec = scan_grid(state, {beta}, opts).front();
    sum += rec.corrected.chi;
    err = rec.corrected.stderr;
  }
  EXPECT_LT(std::abs(sum / static_cast<double>(seeds) - chi_analytic(state, beta)), 4 * err / std::sqrt(seeds));
}

TEST(ScanGrid, ErrorScalesAsInverseSquareRootOfShots) {
  const cplx signal{0.35, -0.2};
  const double f = 1.3;
  std::vector<double> log_m, log_sd;
  for (std::uint64_t m : {100u, 1000u, 10000u, 100000u}) {
    double s1 = 0, s2 = 0;
    const int seeds = 400;
    for (int s = 0; s < seeds; ++s) {
      const auto means = simulate_runs(signal, m, m, static_cast<std::uint64_t>(s) + 1000 * m);
      const double v = correct_decoherence(means.sx, means.sy, f, m, m).chi.real();
      s1 += v;
      s2 += v * v;
    }
    const double mean = s1 / seeds;
    log_m.push_back(std::log(static_cast<double>(m)));
    log_sd.push_back(0.5 * std::log(s2 / seeds - mean * mean));
  }
  EXPECT_NEAR(slope(log_m, log_sd), -0.5, 0.05);
}

TEST(ScanGrid, OutOfReachPointsFailIndividually) {
  auto o = lab_scan(ShotPolicy::infinite());
  o.plan.n_max = 2;
  const auto records = scan_grid(OscillatorState::vacuum(), {0.3, 5.0, cplx{0.2, 0.6}}, o);
  EXPECT_TRUE(records[0].ok);
  EXPECT_FALSE(records[1].ok);
  EXPECT_NE(records[1].error.find("n_max"), std::string::npos);
  EXPECT_TRUE(records[2].ok);
}

TEST(ScanGrid, ResultsIndependentOfThreadCount) {
  const auto grid = square_grid(2.0, 9, false);
  auto o = lab_scan(ShotPolicy::budgeted(0.3));
  o.threads = 1;
  std::ostringstream a, b;
  write_records_csv(a, scan_grid(OscillatorState::thermal(0.4), grid, o));
  o.threads = 4;
  write_records_csv(b, scan_grid(OscillatorState::thermal(0.4), grid, o));
  EXPECT_EQ(a.str(), b.str());
}

TEST(ScanGrid, OracleEngineAgreesWithAnalyticAtReducedTemperature) {
  ScanOptions o;
  o.r_max = 0.5;
  o.omega = kTwoPi;
  o.params = DecoherenceParams(0.01 * kTwoPi, 0.01 * kTwoPi, 0.005 * kTwoPi, 0.3, 0.0);
  o.engine = Engine::kOracle;
  const auto state = OscillatorState::fock(2);
  const std::vector<cplx> grid{cplx{0.4, 0.3}, cplx{-0.9, 0.2}, cplx{0.1, -1.3}};
  const auto oracle = scan_grid(state, grid, o);
  o.engine = Engine::kAnalytic;
  const auto analytic = scan_grid(state, grid, o);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ASSERT_TRUE(oracle[i].ok) << oracle[i].error;
    EXPECT_EQ(oracle[i].engine, Engine::kOracle);
    EXPECT_LT(std::abs(oracle[i].chi_raw - analytic[i].chi_raw), 1e-4);
  }
}

TEST(SquareGrid, ShapeAndOrder) {
  const auto grid = square_grid(1.0, 3, false);
  ASSERT_EQ(grid.size(), 9u);
  EXPECT_EQ(grid.front(), cplx(-1.0, -1.0));
  EXPECT_EQ(grid[1], cplx(0.0, -1.0));
  EXPECT_EQ(square_grid(1.0, 3, true).size(), 5u);
}

TEST(RecordsCsv, HeaderAndPrecision) {
  MeasurementRecord rec;
  rec.point.beta = {0.1, 1.0 / 3.0};
  rec.corrected.chi = {2.0 / 3.0, 0.0};
  MeasurementRecord failed;
  failed.ok = false;
  std::ostringstream out;
  write_records_csv(out, {rec, failed});
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header,
            "beta_re,beta_im,r,phi,n,t,f,m_x,m_y,sx_hat,sy_hat,chi_re_raw,chi_im_raw,chi_re,chi_im,stderr,engine,seed");
  EXPECT_NE(row.find("0.33333333333333331"), std::string::npos);
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(MeasurementRecord, FlagsEstimatesOutsideUnitDisk) {
  MeasurementRecord rec;
  rec.corrected.chi = {1.02, 0.0};
  EXPECT_TRUE(rec.exceeds_unit_disk());
  rec.corrected.chi = {0.5, 0.5};
  EXPECT_FALSE(rec.exceeds_unit_disk());
}
