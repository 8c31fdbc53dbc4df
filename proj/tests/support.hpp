#pragma once

// Independent reference computations shared by the test suites. Nothing
// here calls the library's own quadrature or functional code.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "chiprobe/core_model.hpp"
#include "chiprobe/error.hpp"

#define EXPECT_CHIPROBE_ERROR(statement, expected_code)                  \
  do {                                                                   \
    try {                                                                \
      statement;                                                         \
      ADD_FAILURE() << "expected an error from: " #statement;            \
    } catch (const ::chiprobe::Error& e) {                               \
      EXPECT_EQ(e.code(), expected_code) << e.what();                    \
    }                                                                    \
  } while (0)

namespace chiprobe::ref {

/// Composite Simpson rule on [a, b] with an even number of intervals.
inline cplx simpson(const std::function<cplx(double)>& h, double a, double b, int intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double step = (b - a) / intervals;
  cplx sum = h(a) + h(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * h(a + i * step);
  return sum * step / 3.0;
}

inline cplx xi_reference(const CouplingProfile& g, double t, double kappa, double omega, int intervals = 20000) {
  return 2.0 * kI * simpson([&](double s) { return g(s) * std::exp(cplx{-0.5 * kappa * s, omega * s}); }, 0.0, t,
                            intervals);
}

/// f along the characteristic line: gamma t + kappa Delta int_0^t e^{kappa s} |xi(s) - xi(t)|^2 ds,
/// an algebraically equivalent form of the nested-mu expression.
inline double f_reference(const CouplingProfile& g, double t, const DecoherenceParams& p, double omega,
                          int intervals = 4000) {
  const DerivedRates d = derive_rates(p);
  const double kappa = p.kappa();
  if (intervals % 2) ++intervals;
  // Running xi on the Simpson nodes by cumulative trapezoid refinement of
  // each sub-interval.
  const double step = t / intervals;
  std::vector<cplx> xs(static_cast<std::size_t>(intervals) + 1);
  auto integrand = [&](double s) { return 2.0 * kI * g(s) * std::exp(cplx{-0.5 * kappa * s, omega * s}); };
  for (int i = 0; i < intervals; ++i) {
    const double a = i * step;
    xs[static_cast<std::size_t>(i) + 1] = xs[static_cast<std::size_t>(i)] + simpson(integrand, a, a + step, 16);
  }
  const cplx end = xs.back();
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::exp(kappa * i * step) * std::norm(xs[static_cast<std::size_t>(i)] - end);
  }
  return d.gamma * t + kappa * d.delta * sum * step / 3.0;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

}  // namespace chiprobe::ref
