#include "chiprobe/moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "chiprobe/error.hpp"

namespace chiprobe {

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

struct LinearFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd stderr;
  double residual = 0.0;
};

// Solves min || sqrt(w) (A c - y) ||. When weighted, the covariance is
// (A^T W A)^-1; otherwise it is scaled by the residual variance.
LinearFit solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                bool weighted) {
  const Eigen::Index rows = design.rows();
  const Eigen::Index cols = design.cols();
  const Eigen::VectorXd root_w = weights.cwiseSqrt();
  Eigen::MatrixXd a = root_w.asDiagonal() * design;
  const Eigen::VectorXd b = root_w.asDiagonal() * y;
  // Column equilibration keeps high powers of small radii well conditioned.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (!(scale(c) > 0.0)) fail(ErrorCode::kComputation, "moment fit: degenerate design column");
    a.col(c) /= scale(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < cols) fail(ErrorCode::kComputation, "moment fit: rank-deficient design (too few distinct radii)");
  const Eigen::VectorXd scaled = qr.solve(b);
  const double rss = (a * scaled - b).squaredNorm();

  const Eigen::MatrixXd normal = a.transpose() * a;
  Eigen::MatrixXd cov = normal.inverse();
  if (!weighted) cov *= rows > cols ? rss / static_cast<double>(rows - cols) : 0.0;

  LinearFit out;
  out.coefficients = scaled.cwiseQuotient(scale);
  out.stderr = cov.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseQuotient(scale);
  out.residual = rss;
  return out;
}

int working_dimension(const OscillatorState& state, int k) {
  return std::visit(
      [k](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockState>) {
          return s.n + k + 2;
        } else if constexpr (std::is_same_v<T, CoherentState> || std::is_same_v<T, CatState>) {
          const double m = std::norm(s.alpha);
          return static_cast<int>(std::ceil(m + 12.0 * std::sqrt(m + 1.0))) + 20 + k;
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          if (s.nbar == 0.0) return k + 2;
          const double ratio = s.nbar / (s.nbar + 1.0);
          return static_cast<int>(std::ceil(std::log(1e-16) / std::log(ratio))) + k + 2;
        } else {
          return s.dim();
        }
      },
      state.form());
}

}  // namespace

const MomentEstimate& MomentFitResult::moment(int order) const {
  const auto& list = order % 2 == 0 ? even_moments : odd_moments;
  for (const auto& m : list) {
    if (m.order == order) return m;
  }
  fail(ErrorCode::kOutOfRange, "moment of order " + std::to_string(order) + " was not fitted");
}

double MomentFitResult::variance() const {
  const double m1 = moment(1).value;
  return std::max(0.0, moment(2).value - m1 * m1);
}

MomentFitResult fit_moments(const std::vector<MeasurementRecord>& records, const MomentFitOptions& options) {
  require(options.max_order >= 2, "moment fit needs max_order >= 2");
  require(options.r_cutoff > 0.0, "moment fit cutoff must be > 0");

  std::vector<const MeasurementRecord*> used;
  for (const auto& rec : records) {
    if (rec.ok && std::abs(rec.point.beta) > 0.0) used.push_back(&rec);
  }
  require(!used.empty(), "moment fit: no usable records");

  const double phi = std::arg(used.front()->point.beta);
  std::vector<double> radii;
  bool weighted = true;
  for (const auto* rec : used) {
    const double r = std::abs(rec->point.beta);
    require(std::abs(wrap_angle(std::arg(rec->point.beta) - phi)) < 1e-9, "moment fit: records do not share one ray");
    if (r > options.r_cutoff) {
      fail(ErrorCode::kOutOfRange, "moment fit: radius " + format_real(r) + " exceeds series cutoff " +
                                       format_real(options.r_cutoff));
    }
    radii.push_back(r);
    if (!(rec->corrected.stderr_re > 0.0 && rec->corrected.stderr_im > 0.0)) weighted = false;
  }
  std::vector<double> distinct = radii;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }),
                 distinct.end());
  const int needed = options.max_order / 2 + 2;
  if (static_cast<int>(distinct.size()) < needed) {
    fail(ErrorCode::kComputation, "moment fit: " + std::to_string(distinct.size()) + " distinct radii, need " +
                                      std::to_string(needed));
  }

  const int even_terms = options.max_order / 2;
  const int odd_terms = (options.max_order + 1) / 2;
  const auto rows = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd even_design(rows, even_terms);
  Eigen::MatrixXd odd_design(rows, odd_terms);
  Eigen::VectorXd even_y(rows), odd_y(rows), even_w(rows), odd_w(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto* rec = used[static_cast<std::size_t>(i)];
    const double r = radii[static_cast<std::size_t>(i)];
    for (int k = 1; k <= even_terms; ++k) {
      even_design(i, k - 1) = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(r, 2 * k) / factorial(2 * k);
    }
    for (int k = 0; k < odd_terms; ++k) {
      odd_design(i, k) = (k % 2 == 0 ? -1.0 : 1.0) * std::pow(r, 2 * k + 1) / factorial(2 * k + 1);
    }
    // chi(0) = 1 is exact, so the constant term is pinned.
    even_y(i) = rec->corrected.chi.real() - 1.0;
    odd_y(i) = rec->corrected.chi.imag();
    even_w(i) = weighted ? 1.0 / (rec->corrected.stderr_re * rec->corrected.stderr_re) : 1.0;
    odd_w(i) = weighted ? 1.0 / (rec->corrected.stderr_im * rec->corrected.stderr_im) : 1.0;
  }

  const LinearFit even = solve(even_design, even_y, even_w, weighted);
  const LinearFit odd = solve(odd_design, odd_y, odd_w, weighted);

  MomentFitResult out;
  out.theta = wrap_angle(phi + 0.5 * kPi);
  out.r_values = distinct;
  out.fit_residual = even.residual + odd.residual;
  for (int k = 1; k <= even_terms; ++k) out.even_moments.push_back({2 * k, even.coefficients(k - 1), even.stderr(k - 1)});
  for (int k = 0; k < odd_terms; ++k) out.odd_moments.push_back({2 * k + 1, odd.coefficients(k), odd.stderr(k)});

  const auto& m2 = out.moment(2);
  out.squeezed = m2.value + 3.0 * m2.stderr < 1.0;

  if (options.max_order >= 4) {
    const double m1 = out.moment(1).value, s1 = out.moment(1).stderr;
    const double m3 = out.moment(3).value, s3 = out.moment(3).stderr;
    const double m4 = out.moment(4).value, s4 = out.moment(4).stderr;
    const double v2 = m2.value, s2 = m2.stderr;
    const double k4 = m4 - 4.0 * m3 * m1 - 3.0 * v2 * v2 + 12.0 * v2 * m1 * m1 - 6.0 * m1 * m1 * m1 * m1;
    // Delta-method error, neglecting covariances between orders.
    const double d1 = -4.0 * m3 + 24.0 * v2 * m1 - 24.0 * m1 * m1 * m1;
    const double d2 = -6.0 * v2 + 12.0 * m1 * m1;
    const double d3 = -4.0 * m1;
    const double sk4 = std::sqrt(s4 * s4 + d2 * d2 * s2 * s2 + d3 * d3 * s3 * s3 + d1 * d1 * s1 * s1);
    const double threshold = std::max(3.0 * sk4, 1e-6 * (1.0 + std::abs(m4)));
    if (std::abs(k4) > threshold) out.non_gaussian = k4 > 0.0 ? 1 : -1;
  }
  return out;
}

double quadrature_moment_analytic(const OscillatorState& state, double theta, int k) {
  require(k >= 0 && k <= 8, "quadrature moment order must lie in [0, 8]");
  const int dim = working_dimension(state, k);
  const DensityMatrix rho = to_density_matrix(state, dim);
  if (rho.tail_population(dim - k - 1) > 1e-10) {
    fail(ErrorCode::kTruncation, "basis of dimension " + std::to_string(dim) + " too small for order " +
                                     std::to_string(k) + " moments");
  }
  const Matrix a = annihilation(dim);
  const Matrix x = std::polar(1.0, -theta) * a + std::polar(1.0, theta) * a.adjoint();
  Matrix power = Matrix::Identity(dim, dim);
  for (int i = 0; i < k; ++i) power = (power * x).eval();
  return (rho.matrix() * power).trace().real();
}

std::vector<double> geometric_radii(double r_max, int count) {
  require(std::isfinite(r_max) && r_max > 0.0, "radius range must be positive");
  require(count >= 1, "need at least one radius");
  std::vector<double> out;
  if (count == 1) return {r_max};
  const double ratio = std::pow(10.0, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) out.push_back(r_max / 10.0 * std::pow(ratio, i));
  out.back() = r_max;
  return out;
}

std::vector<cplx> ray_points(double theta, const std::vector<double>& radii) {
  std::vector<cplx> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(std::polar(r, theta - 0.5 * kPi));
  return out;
}

void write_moments_csv(std::ostream& out, const std::vector<MomentFitResult>& fits) {
  out << "theta,order,estimate,stderr,flag_squeezed,flag_nongaussian\n";
  for (const auto& fit : fits) {
    std::vector<MomentEstimate> all = fit.odd_moments;
    all.insert(all.end(), fit.even_moments.begin(), fit.even_moments.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
    for (const auto& m : all) {
      out << format_real(fit.theta) << ',' << m.order << ',' << format_real(m.value) << ',' << format_real(m.stderr)
          << ',' << (fit.squeezed ? 1 : 0) << ',' << fit.non_gaussian << '\n';
    }
  }
}

}  // namespace chiprobe
