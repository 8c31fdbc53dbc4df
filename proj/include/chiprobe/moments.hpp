#pragma once

// Quadrature moments from the small-|beta| expansion of the corrected signal
// along a ray beta = r e^{i phi}:
//
//   Re chi = 1 - r^2 <X^2>/2 + r^4 <X^4>/24 - ...
//   Im chi =   - r <X> + r^3 <X^3>/6 - ...
//
// with X_theta = a e^{-i theta} + a^dag e^{i theta} and theta = phi + pi/2.

#include <iosfwd>
#include <vector>

#include "chiprobe/reconstruction.hpp"

namespace chiprobe {

struct MomentEstimate {
  int order = 0;
  double value = 0.0;
  double stderr = 0.0;
};

struct MomentFitOptions {
  int max_order = 4;
  double r_cutoff = 1.0;  // series validity limit on the sampled radii
};

struct MomentFitResult {
  double theta = 0.0;
  std::vector<MomentEstimate> even_moments;  // orders 2, 4, ...
  std::vector<MomentEstimate> odd_moments;   // orders 1, 3, ...
  double fit_residual = 0.0;                 // weighted residual sum of squares
  std::vector<double> r_values;
  bool squeezed = false;  // <X^2> + 3 stderr < 1
  int non_gaussian = 0;   // sign of a significant fourth cumulant, 0 otherwise

  /// Moment of the given order, or throws kOutOfRange if it was not fitted.
  const MomentEstimate& moment(int order) const;
  /// <X^2> - <X>^2 clipped at zero.
  double variance() const;
};

/// Weighted least squares (weights 1/stderr^2 per component; unit weights
/// when any record is noiseless) of the corrected records of one ray.
MomentFitResult fit_moments(const std::vector<MeasurementRecord>& records, const MomentFitOptions& options = {});

/// tr(rho X_theta^k) from explicit operator powers on a truncated basis.
double quadrature_moment_analytic(const OscillatorState& state, double theta, int k);

/// count radii geometrically spaced over [r_max/10, r_max].
std::vector<double> geometric_radii(double r_max, int count);

/// Points r e^{i phi} with phi = theta - pi/2, so that the fitted moments
/// belong to X_theta.
std::vector<cplx> ray_points(double theta, const std::vector<double>& radii);

/// Moment report: theta, order, estimate, stderr, flag_squeezed, flag_nongaussian.
void write_moments_csv(std::ostream& out, const std::vector<MomentFitResult>& fits);

}  // namespace chiprobe
