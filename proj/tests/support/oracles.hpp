#pragma once

// Independent reference computations and frozen constants for the tests.

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvw/continuation.hpp"
#include "cvw/kernel.hpp"
#include "cvw/spectral.hpp"

namespace cvw::testing {

inline constexpr double pi = std::numbers::pi;

// β_1(π/2): both series forms agree to 5e-14; frozen.
inline constexpr double kBeta1HalfPi = 1.616309266041888;
inline constexpr double kBeta2HalfPi = 1.074604872696527;
inline constexpr double kBeta5HalfPi = 1.00018160796372;

// g = 9.81, k = h = 1, Υ = 1.
inline constexpr double kMStarMinusU1 = -2.878957;
inline constexpr double kQStarMinusU1 = 25.279439;

// Amplitude bounds at g = 9.81, k = h = 1 for Υ = 0, 1, 2, 5, 10.
inline constexpr double kBoundU[5] = {0, 1, 2, 5, 10};
inline constexpr double kBound[5] = {3.887, 3.767, 3.477, 2.529, 1.630};

/// ∫_{-π}^{π} -β'(s)/(4π) (f(x) - f(x-s))² ds and the cube form with 6π:
/// the defining integrals of 𝒥f(x) and 𝒦f(x). β' is even, so the two
/// halves of the interval are folded onto (0, π).
struct JK {
  double J = 0.0, K = 0.0;
};

inline JK jk_quadrature(const PeriodicField& f, double x, const KernelConfig& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  const double fx = f(x);
  auto fold = [&](double s, int power) {
    const double a = fx - f(x - s), b = fx - f(x + s);
    return -beta_prime_eval(s, cfg) * (std::pow(a, power) + std::pow(b, power));
  };
  double err = 0.0;
  JK r;
  r.J = gauss_kronrod<double, 31>::integrate([&](double s) { return fold(s, 2); }, 0.0, pi, 15,
                                             1e-13, &err) / (4.0 * pi);
  r.K = gauss_kronrod<double, 31>::integrate([&](double s) { return fold(s, 3); }, 0.0, pi, 15,
                                             1e-13, &err) / (6.0 * pi);
  return r;
}

/// Even field with decaying random coefficients, seeded for repeatability.
inline PeriodicField random_even_field(int modes, int active, std::uint64_t seed,
                                       double mean = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(modes + 1, 0.0), s(modes + 1, 0.0);
  c[0] = mean;
  for (int n = 1; n <= active && n <= modes; ++n) c[n] = u(rng) / (n * n);
  return PeriodicField(std::move(c), std::move(s), Parity::even);
}

/// Trig polynomial of degree `degree` with both parities.
inline PeriodicField random_trig_polynomial(int modes, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(modes + 1, 0.0), s(modes + 1, 0.0);
  for (int n = 1; n <= degree && n <= modes; ++n) {
    c[n] = u(rng);
    s[n] = u(rng);
  }
  return PeriodicField(std::move(c), std::move(s), Parity::general);
}

/// A short downstream branch at Υ = 1, traced once and shared between tests.
inline const Branch& short_branch() {
  static const Branch b = [] {
    PhysicalParams p;
    p.vorticity = 1.0;
    ContinuationConfig cfg;
    cfg.modes = 64;
    cfg.max_points = 25;
    cfg.max_step = 5e-3;
    return trace_branch(p, cfg);
  }();
  return b;
}

}  // namespace cvw::testing
