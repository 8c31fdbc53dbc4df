#include "chiprobe/reconstruction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sample_mean(double expectation, std::uint64_t shots, std::uint64_t seed) {
  const double p_plus = 0.5 * (1.0 + expectation);
  if (p_plus >= 1.0) return 1.0;
  if (p_plus <= 0.0) return -1.0;
  std::mt19937_64 engine(seed);
  std::binomial_distribution<std::uint64_t> draws(shots, p_plus);
  const auto plus = static_cast<double>(draws(engine));
  return (2.0 * plus - static_cast<double>(shots)) / static_cast<double>(shots);
}

double clamp_unit(double v) {
  // Integrator output may overshoot |s| = 1 by rounding.
  if (v > 1.0 && v < 1.0 + 1e-9) return 1.0;
  if (v < -1.0 && v > -1.0 - 1e-9) return -1.0;
  return v;
}

}  // namespace

const char* to_string(Engine engine) { return engine == Engine::kAnalytic ? "analytic" : "oracle"; }

ProtocolPoint plan_point(cplx beta, double r_max, const DecoherenceParams& params, double omega,
                         const PlanOptions& options) {
  const PhasePoint target(beta);
  require(std::isfinite(r_max) && r_max > 0.0, "r_max must be > 0");
  require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
  require(options.n_max >= 1, "n_max must be >= 1");

  ProtocolPoint p;
  p.beta = target.beta();
  const double modulus = std::abs(p.beta);
  const double n_real = std::floor(modulus / r_max) + 1.0;
  if (n_real > options.n_max) {
    fail(ErrorCode::kOutOfRange, "|beta| = " + format_real(modulus) + " needs n = " + format_real(n_real) +
                                     " periods, beyond n_max = " + std::to_string(options.n_max));
  }
  p.n = static_cast<int>(n_real);
  p.r = modulus / p.n;
  p.phi = modulus > 0.0 ? std::arg(p.beta) : 0.0;
  p.t = kTwoPi * p.n / omega;
  if (options.damping == DampingMode::kExact) {
    const CouplingProfile g = protocol_coupling(p, options.r0, omega, params.kappa());
    p.f = damping_f(g, p.t, params, omega, options.functionals);
  } else {
    p.f = f_harmonic_approx(options.r0, p.r, p.phi, p.n, params, omega);
  }
  p.budget = run_budget(p.f, options.target_rel_error);
  return p;
}

CouplingProfile protocol_coupling(const ProtocolPoint& point, double r0, double omega, double kappa) {
  return CouplingProfile::harmonic(r0, point.r, point.phi, omega, kappa);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index, std::uint64_t axis) {
  return splitmix64(splitmix64(splitmix64(master) ^ index) ^ (axis + 0x632be59bd9b4e019ULL));
}

ShotMeans simulate_runs(cplx true_signal, std::uint64_t m_x, std::uint64_t m_y, std::uint64_t seed) {
  const double sx = true_signal.real();
  const double sy = true_signal.imag();
  require(std::isfinite(sx) && std::abs(sx) <= 1.0, "signal real part outside [-1, 1]");
  require(std::isfinite(sy) && std::abs(sy) <= 1.0, "signal imaginary part outside [-1, 1]");
  require(m_x >= 1 && m_y >= 1, "shot counts must be >= 1");
  return {sample_mean(sx, m_x, stream_seed(seed, 0, 0)), sample_mean(sy, m_y, stream_seed(seed, 0, 1))};
}

CorrectedEstimate correct_decoherence(double sx, double sy, double f, std::uint64_t m_x, std::uint64_t m_y) {
  require(std::isfinite(f) && f >= 0.0, "damping exponent must be >= 0");
  const double gain = std::exp(f);
  auto axis_error = [gain](double s, std::uint64_t m) {
    if (m == 0) return 0.0;
    const double shots = static_cast<double>(m);
    return gain * std::sqrt(std::max(1.0 - s * s, 1.0 / shots) / shots);
  };
  CorrectedEstimate out;
  out.chi = cplx{sx, sy} * gain;
  out.stderr_re = axis_error(sx, m_x);
  out.stderr_im = axis_error(sy, m_y);
  out.stderr = std::hypot(out.stderr_re, out.stderr_im);
  return out;
}

std::vector<cplx> square_grid(double extent, int resolution, bool disk_only) {
  require(std::isfinite(extent) && extent >= 0.0, "grid extent must be >= 0");
  require(resolution >= 1, "grid resolution must be >= 1");
  std::vector<cplx> grid;
  const double step = resolution > 1 ? 2.0 * extent / (resolution - 1) : 0.0;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = resolution > 1 ? -extent + iy * step : 0.0;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = resolution > 1 ? -extent + ix * step : 0.0;
      if (disk_only && std::hypot(x, y) > extent * (1.0 + 1e-12)) continue;
      grid.emplace_back(x, y);
    }
  }
  return grid;
}

namespace {

MeasurementRecord measure_point(const OscillatorState& state, const JointState* oracle_initial, cplx beta,
                                std::size_t index, const ScanOptions& options) {
  MeasurementRecord rec;
  rec.engine = options.engine;
  rec.seed = stream_seed(options.seed, index, 2);
  rec.point.beta = beta;
  PlanOptions plan = options.plan;
  if (options.shots.kind == ShotPolicy::Kind::kBudgeted) plan.target_rel_error = options.shots.target_rel_error;
  try {
    rec.point = plan_point(beta, options.r_max, options.params, options.omega, plan);
    const ProtocolPoint& p = rec.point;

    if (beta == cplx{0.0, 0.0}) {
      // chi(0) = 1 is known; no shots are spent.
      rec.sx_hat = std::exp(-p.f);
      rec.sy_hat = 0.0;
      rec.chi_raw = {rec.sx_hat, 0.0};
      rec.corrected = {cplx{1.0, 0.0}, 0.0, 0.0, 0.0};
      return rec;
    }

    const CouplingProfile g = protocol_coupling(p, plan.r0, options.omega, options.params.kappa());
    cplx signal;
    if (options.engine == Engine::kAnalytic) {
      signal = predicted_signal(state, g, p.t, options.params, options.omega, plan.functionals);
    } else {
      const JointState final_state =
          evolve_master(*oracle_initial, g, p.t, options.params, options.omega, options.oracle);
      const PauliExpectations e = pauli_expectations(final_state);
      signal = {e.sx, e.sy};
    }
    signal = {clamp_unit(signal.real()), clamp_unit(signal.imag())};

    switch (options.shots.kind) {
      case ShotPolicy::Kind::kInfinite:
        rec.m_x = rec.m_y = 0;
        rec.sx_hat = signal.real();
        rec.sy_hat = signal.imag();
        break;
      case ShotPolicy::Kind::kBudgeted:
      case ShotPolicy::Kind::kFixed: {
        const std::uint64_t m = options.shots.kind == ShotPolicy::Kind::kFixed ? options.shots.shots : p.budget;
        if (m >= kBudgetSaturated) fail(ErrorCode::kComputation, "shot budget saturated at this point");
        rec.m_x = rec.m_y = m;
        const ShotMeans means = simulate_runs(signal, m, m, rec.seed);
        rec.sx_hat = means.sx;
        rec.sy_hat = means.sy;
        break;
      }
    }
    rec.chi_raw = {rec.sx_hat, rec.sy_hat};
    rec.corrected = correct_decoherence(rec.sx_hat, rec.sy_hat, p.f, rec.m_x, rec.m_y);
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<MeasurementRecord> scan_grid(const OscillatorState& state, const std::vector<cplx>& grid,
                                         const ScanOptions& options) {
  std::optional<JointState> oracle_initial;
  if (options.engine == Engine::kOracle) {
    oracle_initial.emplace(JointState::plus_product(to_density_matrix(state, options.oracle.dim)));
  }
  std::vector<MeasurementRecord> records(grid.size());
  unsigned workers = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(grid.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      records[i] = measure_point(state, oracle_initial ? &*oracle_initial : nullptr, grid[i], i, options);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return records;
}

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << "beta_re,beta_im,r,phi,n,t,f,m_x,m_y,sx_hat,sy_hat,chi_re_raw,chi_im_raw,chi_re,chi_im,stderr,engine,seed\n";
  for (const auto& rec : records) {
    if (!rec.ok) continue;
    const auto& p = rec.point;
    out << format_real(p.beta.real()) << ',' << format_real(p.beta.imag()) << ',' << format_real(p.r) << ','
        << format_real(p.phi) << ',' << p.n << ',' << format_real(p.t) << ',' << format_real(p.f) << ',' << rec.m_x
        << ',' << rec.m_y << ',' << format_real(rec.sx_hat) << ',' << format_real(rec.sy_hat) << ','
        << format_real(rec.chi_raw.real()) << ',' << format_real(rec.chi_raw.imag()) << ','
        << format_real(rec.corrected.chi.real()) << ',' << format_real(rec.corrected.chi.imag()) << ','
        << format_real(rec.corrected.stderr) << ',' << to_string(rec.engine) << ',' << rec.seed << '\n';
  }
}

}  // namespace chiprobe
