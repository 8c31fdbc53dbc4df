#pragma once

// The measurement protocol: map target phase-space points to harmonic
// couplings, simulate finite-shot Pauli measurements, undo the e^{-f}
// damping, and assemble characteristic-function datasets.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chiprobe/functionals.hpp"
#include "chiprobe/lindblad.hpp"
#include "chiprobe/states.hpp"

namespace chiprobe {

enum class DampingMode { kExact, kFirstOrder };

struct PlanOptions {
  int n_max = 10;
  double r0 = 0.0;
  DampingMode damping = DampingMode::kExact;
  double target_rel_error = 0.2;  // feeds run_budget
  FunctionalOptions functionals{};
};

struct ProtocolPoint {
  cplx beta;
  double r = 0.0;
  double phi = 0.0;
  int n = 1;
  double t = 0.0;
  double f = 0.0;
  std::uint64_t budget = 0;  // shots per Pauli axis
};

/// n is the integer with (n-1) r_max <= |beta| < n r_max, r = |beta|/n and
/// phi = arg(beta). Throws kOutOfRange when n would exceed n_max.
ProtocolPoint plan_point(cplx beta, double r_max, const DecoherenceParams& params, double omega,
                         const PlanOptions& options = {});

/// Harmonic coupling that realizes a planned point.
CouplingProfile protocol_coupling(const ProtocolPoint& point, double r0, double omega, double kappa);

struct ShotMeans {
  double sx = 0.0;
  double sy = 0.0;
};

/// Seed of an independent random stream for (master seed, point, axis).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index, std::uint64_t axis);

/// Sample means of m_x (m_y) outcomes +-1 with P(+1) = (1 + Re s)/2
/// ((1 + Im s)/2). Deterministic in seed.
ShotMeans simulate_runs(cplx true_signal, std::uint64_t m_x, std::uint64_t m_y, std::uint64_t seed);

struct CorrectedEstimate {
  cplx chi;
  double stderr = 0.0;     // sqrt(stderr_re^2 + stderr_im^2)
  double stderr_re = 0.0;
  double stderr_im = 0.0;
};

/// chi = (sx + i sy) e^f. Per-axis standard error e^f sqrt(max(1 - s^2, 1/m)/m);
/// m = 0 stands for the infinite-shot limit (zero error).
CorrectedEstimate correct_decoherence(double sx, double sy, double f, std::uint64_t m_x = 0, std::uint64_t m_y = 0);

enum class Engine { kAnalytic, kOracle };

const char* to_string(Engine engine);

struct ShotPolicy {
  enum class Kind { kInfinite, kBudgeted, kFixed } kind = Kind::kInfinite;
  double target_rel_error = 0.2;  // kBudgeted
  std::uint64_t shots = 0;        // kFixed, per axis

  static ShotPolicy infinite() { return {}; }
  static ShotPolicy budgeted(double eps) { return {Kind::kBudgeted, eps, 0}; }
  static ShotPolicy fixed(std::uint64_t m) { return {Kind::kFixed, 0.0, m}; }
};

struct ScanOptions {
  double r_max = 0.5;
  double omega = kTwoPi;
  DecoherenceParams params{};
  PlanOptions plan{};
  ShotPolicy shots{};
  std::uint64_t seed = 1;
  Engine engine = Engine::kAnalytic;
  OracleConfig oracle{};
  unsigned threads = 0;  // 0: hardware concurrency
};

struct MeasurementRecord {
  ProtocolPoint point;
  std::uint64_t m_x = 0;
  std::uint64_t m_y = 0;
  double sx_hat = 0.0;
  double sy_hat = 0.0;
  cplx chi_raw;
  CorrectedEstimate corrected;
  std::uint64_t seed = 0;
  Engine engine = Engine::kAnalytic;
  bool ok = true;
  std::string error;  // set when ok is false

  /// |chi| > 1 can only come from noise; flagged, never clamped.
  bool exceeds_unit_disk() const { return std::abs(corrected.chi) > 1.0; }
};

/// One record per grid point, in input order. Points that fail keep ok=false
/// and an error message; the rest of the scan proceeds.
std::vector<MeasurementRecord> scan_grid(const OscillatorState& state, const std::vector<cplx>& grid,
                                         const ScanOptions& options);

/// Square lattice of resolution x resolution points over [-extent, extent]^2,
/// optionally restricted to the disk |beta| <= extent.
std::vector<cplx> square_grid(double extent, int resolution, bool disk_only);

/// Dataset CSV (header + one row per successful record), floats at 17
/// significant digits.
void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);

/// %.17g formatting shared by every dataset writer.
std::string format_real(double value);

}  // namespace chiprobe
