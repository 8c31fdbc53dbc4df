#include "chiprobe/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "chiprobe/catprep.hpp"
#include "chiprobe/error.hpp"
#include "chiprobe/moments.hpp"

#ifndef CHIPROBE_VERSION
#define CHIPROBE_VERSION "0.0.0"
#endif

namespace chiprobe {

namespace fs = std::filesystem;

namespace {

class Run {
 public:
  Run(const RunConfig& config, RunOutcome& outcome) : config_(config), outcome_(outcome) {}

  void go() {
    switch (config_.command) {
      case Command::kScan:
        scan();
        break;
      case Command::kReconstruct:
        reconstruct();
        break;
      case Command::kMoments:
        moments();
        break;
      case Command::kCat:
        cat();
        break;
      case Command::kOracleCheck:
        oracle_check();
        break;
      case Command::kBudget:
        budget();
        break;
    }
    outcome_.summary += failure_note();
  }

 private:
  ScanOptions scan_options() const {
    ScanOptions o;
    o.r_max = config_.r_max;
    o.omega = config_.omega;
    o.params = config_.params();
    o.plan.n_max = config_.n_max;
    o.plan.r0 = config_.r0;
    o.plan.damping = config_.f_mode;
    o.shots = config_.shots;
    o.seed = config_.seed;
    o.engine = config_.engine;
    o.oracle.dim = config_.dim;
    o.threads = config_.threads;
    return o;
  }

  std::vector<cplx> grid() const {
    return square_grid(config_.grid_extent, config_.grid_resolution, config_.grid_shape == GridShape::kDisk);
  }

  OscillatorState state() const { return OscillatorState::parse(config_.state); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = fs::path(config_.output) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) fail(ErrorCode::kIo, "write to " + path.string() + " failed");
    outcome_.artifacts.push_back(path);
  }

  // Counts failed records and keeps the first message for the summary.
  void tally(const std::vector<MeasurementRecord>& records) {
    outcome_.points_total += records.size();
    for (const auto& rec : records) {
      if (rec.ok) continue;
      if (outcome_.points_failed++ == 0) first_error_ = rec.error;
    }
  }

  std::string failure_note() const {
    if (outcome_.points_failed == 0) return {};
    return "; " + std::to_string(outcome_.points_failed) + " of " + std::to_string(outcome_.points_total) +
           " points failed (first: " + first_error_ + ")";
  }

  void scan() {
    const OscillatorState s = state();
    const std::vector<cplx> g = grid();
    ScanOptions o = scan_options();
    o.shots = ShotPolicy::infinite();
    const auto records = scan_grid(s, g, o);
    tally(records);
    write("chi_ideal.csv", [&](std::ostream& out) {
      out << "beta_re,beta_im,chi_re,chi_im\n";
      for (const cplx beta : g) {
        const cplx chi = characteristic(s, beta);
        out << format_real(beta.real()) << ',' << format_real(beta.imag()) << ',' << format_real(chi.real()) << ','
            << format_real(chi.imag()) << '\n';
      }
    });
    write("signal.csv", [&](std::ostream& out) {
      out << "beta_re,beta_im,n,signal_re,signal_im\n";
      for (const auto& rec : records) {
        if (!rec.ok) continue;
        out << format_real(rec.point.beta.real()) << ',' << format_real(rec.point.beta.imag()) << ',' << rec.point.n
            << ',' << format_real(rec.chi_raw.real()) << ',' << format_real(rec.chi_raw.imag()) << '\n';
      }
    });
    double max_e2f = 0.0;
    write("e2f.csv", [&](std::ostream& out) {
      out << "beta_re,beta_im,n,f,e2f\n";
      for (const auto& rec : records) {
        if (!rec.ok) continue;
        const double e2f = std::exp(2.0 * rec.point.f);
        max_e2f = std::max(max_e2f, e2f);
        out << format_real(rec.point.beta.real()) << ',' << format_real(rec.point.beta.imag()) << ',' << rec.point.n
            << ',' << format_real(rec.point.f) << ',' << format_real(e2f) << '\n';
      }
    });
    outcome_.summary = "scan: " + std::to_string(g.size()) + " points, max e^{2f} = " + format_real(max_e2f);
  }

  void reconstruct() {
    const std::vector<cplx> g = grid();
    const auto records = scan_grid(state(), g, scan_options());
    tally(records);
    std::size_t outside = 0;
    for (const auto& rec : records) outside += rec.ok && rec.exceeds_unit_disk() ? 1 : 0;
    write("reconstruction.csv", [&](std::ostream& out) { write_records_csv(out, records); });
    outcome_.summary = "reconstruct: " + std::to_string(g.size()) + " points, " + std::to_string(outside) +
                       " estimates outside the unit disk";
  }

  void moments() {
    const OscillatorState s = state();
    const ScanOptions o = scan_options();
    const std::vector<double> radii = geometric_radii(config_.moment_r_max, config_.moment_radii);
    std::vector<MeasurementRecord> all;
    std::vector<MomentFitResult> fits;
    for (const double theta : config_.moment_thetas) {
      const auto records = scan_grid(s, ray_points(theta, radii), o);
      tally(records);
      all.insert(all.end(), records.begin(), records.end());
      std::vector<MeasurementRecord> good;
      for (const auto& rec : records) {
        if (rec.ok) good.push_back(rec);
      }
      fits.push_back(fit_moments(good, {config_.moment_order, 1.0}));
    }
    write("moment_points.csv", [&](std::ostream& out) { write_records_csv(out, all); });
    write("moments.csv", [&](std::ostream& out) { write_moments_csv(out, fits); });
    std::ostringstream msg;
    msg << "moments: " << fits.size() << " angle(s)";
    for (const auto& fit : fits) {
      msg << "; theta=" << format_real(fit.theta) << " <X>=" << format_real(fit.moment(1).value)
          << " <X^2>=" << format_real(fit.moment(2).value);
    }
    outcome_.summary = msg.str();
  }

  void cat() {
    const DecoherenceParams p = config_.params();
    const CouplingProfile g = CouplingProfile::harmonic(config_.r0, config_.cat_r, config_.cat_phi, config_.omega,
                                                        config_.kappa);
    const double t = config_.cat_n * kTwoPi / config_.omega;
    const PreparedCat prepared = chi_prepared_cat(t, g, p, config_.omega, config_.cat_varphi, config_.cat_sign);
    const std::vector<cplx> points = grid();
    outcome_.points_total = points.size();
    write("cat.csv", [&](std::ostream& out) { write_cat_csv(out, points, prepared); });
    outcome_.summary = "cat: " + std::to_string(points.size()) + " points, post-selection probability " +
                       format_real(prepared.probability());
  }

  void oracle_check() {
    const OscillatorState s = state();
    std::vector<cplx> candidates;
    for (const cplx beta : grid()) {
      if (std::abs(beta) > 0.0) candidates.push_back(beta);
    }
    if (candidates.empty()) fail(ErrorCode::kConfig, "oracle-check needs a grid with nonzero points");
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(config_.oracle_points), candidates.size());
    std::vector<cplx> points;
    for (std::size_t i = 0; i < count; ++i) points.push_back(candidates[i * candidates.size() / count]);

    ScanOptions o = scan_options();
    o.shots = ShotPolicy::infinite();
    o.engine = Engine::kAnalytic;
    const auto analytic = scan_grid(s, points, o);
    o.engine = Engine::kOracle;
    const auto oracle = scan_grid(s, points, o);
    tally(oracle);

    double worst = 0.0;
    write("oracle_check.csv", [&](std::ostream& out) {
      out << "beta_re,beta_im,n,analytic_re,analytic_im,oracle_re,oracle_im,residual\n";
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!analytic[i].ok || !oracle[i].ok) continue;
        const cplx a = analytic[i].chi_raw;
        const cplx b = oracle[i].chi_raw;
        const double residual = std::abs(a - b);
        worst = std::max(worst, residual);
        out << format_real(points[i].real()) << ',' << format_real(points[i].imag()) << ',' << analytic[i].point.n
            << ',' << format_real(a.real()) << ',' << format_real(a.imag()) << ',' << format_real(b.real()) << ','
            << format_real(b.imag()) << ',' << format_real(residual) << '\n';
      }
    });
    outcome_.summary = "oracle-check: max residual = " + format_real(worst) + " over " +
                       std::to_string(points.size() - outcome_.points_failed) + " points";
  }

  void budget() {
    write("budget.csv", [&](std::ostream& out) {
      out << "f,epsilon,e2f,budget\n";
      for (const double f : config_.budget_f) {
        out << format_real(f) << ',' << format_real(config_.budget_epsilon) << ',' << format_real(std::exp(2.0 * f))
            << ',' << run_budget(f, config_.budget_epsilon) << '\n';
      }
    });
    outcome_.points_total = config_.budget_f.size();
    outcome_.summary = "budget: " + std::to_string(config_.budget_f.size()) + " rows";
  }

  const RunConfig& config_;
  RunOutcome& outcome_;
  std::string first_error_;
};

void write_manifest(const RunConfig& config, RunOutcome& outcome, double wall_seconds) {
  const fs::path path = fs::path(config.output) / "manifest.txt";
  std::ofstream out(path, std::ios::trunc);
  out << "# run manifest\n"
      << "version = " << library_version() << '\n'
      << "exit_code = " << outcome.exit_code << '\n'
      << "status = " << (outcome.exit_code == kExitOk ? "ok" : "failed") << '\n'
      << "summary = " << outcome.summary << '\n'
      << "points_total = " << outcome.points_total << '\n'
      << "points_failed = " << outcome.points_failed << '\n'
      << "wall_time_s = " << format_real(wall_seconds) << '\n';
  for (const auto& a : outcome.artifacts) out << "artifact = " << a.filename().string() << '\n';
  out << "# configuration\n" << to_text(config);
  out.flush();
  if (!out) {
    outcome.exit_code = kExitIo;
    outcome.summary += "; manifest could not be written";
  }
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
      return kExitConfig;
    case ErrorCode::kIo:
      return kExitIo;
    default:
      return kExitComputation;
  }
}

const char* library_version() { return CHIPROBE_VERSION; }

RunOutcome execute(const RunConfig& config) {
  RunOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(config.output, ec);
  if (ec) {
    outcome.exit_code = kExitIo;
    outcome.summary = "cannot create output directory " + config.output + ": " + ec.message();
    return outcome;
  }
  try {
    Run(config, outcome).go();
    if (outcome.points_failed > 0) {
      outcome.exit_code = kExitComputation;
    }
  } catch (const Error& e) {
    outcome.exit_code = exit_code_for(e.code());
    outcome.summary = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitComputation;
    outcome.summary = std::string("error: ") + e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(config, outcome, wall);
  return outcome;
}

}  // namespace chiprobe
