#pragma once

// Truncated Fourier representation of 2π-periodic real fields and the
// periodic conjugate-function operator of a horizontal strip.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvw {

struct KernelConfig;

enum class Parity { even, odd, general };

Parity flip(Parity p);
std::string to_string(Parity p);

/// Resolution of the discretisation: highest retained wavenumber N,
/// collocation count M (nodes x_j = 2πj/M) and strip height d.
/// Requires N ≥ 8 and M ≥ 4N.
class GridSpec {
 public:
  GridSpec(int modes, int nodes, double strip_height);

  /// M = 4N, the smallest node count for which cubic products stay clean.
  static GridSpec dealiased(int modes, double strip_height);

  int modes() const { return modes_; }
  int nodes() const { return nodes_; }
  double strip_height() const { return strip_height_; }

  double node(int j) const;
  std::vector<double> node_positions() const;

  /// coth(n d), clipped to 1 once n d exceeds 20.
  double coth_multiplier(int n) const;

  bool operator==(const GridSpec&) const = default;

 private:
  int modes_;
  int nodes_;
  double strip_height_;
};

/// f(x) = a_0 + Σ a_n cos(nx) + Σ b_n sin(nx), n = 1..N.
///
/// Both coefficient vectors have length N+1; sin_coeffs()[0] is always 0.
/// The parity tag is enforced: an even field carries no sine terms and an
/// odd field no cosine terms (a_0 included).
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                Parity parity);

  static PeriodicField zero(int modes, Parity parity = Parity::even);
  static PeriodicField constant(int modes, double value);
  static PeriodicField cosine(int modes, int n, double amplitude = 1.0);
  static PeriodicField sine(int modes, int n, double amplitude = 1.0);

  int modes() const { return static_cast<int>(cos_.size()) - 1; }
  Parity parity() const { return parity_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  double cos_coeff(int n) const { return cos_[n]; }
  double sin_coeff(int n) const { return sin_[n]; }

  /// Period average [f]; identical to a_0.
  double mean() const { return cos_.empty() ? 0.0 : cos_[0]; }

  /// Direct evaluation of the trigonometric sum at an arbitrary point.
  double operator()(double x) const;

  PeriodicField without_mean() const;
  PeriodicField with_mean(double value) const;

  /// Largest absolute coefficient.
  double max_coeff() const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
  Parity parity_ = Parity::general;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double s, PeriodicField a);
PeriodicField operator-(PeriodicField a);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Samples at the M nodes to the first N Fourier modes. Coefficients
/// forbidden by `parity` are set to zero.
PeriodicField analyze(std::span<const double> values, const GridSpec& grid,
                      Parity parity = Parity::general);

/// Same, keeping modes 0..max_mode (max_mode < M/2).
PeriodicField analyze_modes(std::span<const double> values, int nodes,
                            int max_mode, Parity parity = Parity::general);

std::vector<double> synthesize(const PeriodicField& field, const GridSpec& grid);

/// Synthesis on M nodes for a field of any mode count below M/2.
std::vector<double> synthesize_nodes(const PeriodicField& field, int nodes);

PeriodicField derivative(const PeriodicField& field);

/// Zero-mean antiderivative of a zero-mean field.
PeriodicField antiderivative(const PeriodicField& field);

double mean(const PeriodicField& field);

/// Pointwise product on the collocation grid, truncated back to N modes.
PeriodicField product(const PeriodicField& f, const PeriodicField& g,
                      const GridSpec& grid);

/// Conjugate function operator of the strip of height d:
/// cos(nx) -> coth(nd) sin(nx), sin(nx) -> -coth(nd) cos(nx).
/// Throws std::invalid_argument when the input mean is not zero.
PeriodicField strip_hilbert(const PeriodicField& field, const GridSpec& grid);

/// 𝒥f = f 𝒞(f') - 𝒞(f f').
PeriodicField op_J(const PeriodicField& f, const GridSpec& grid);

/// 𝒦f = f² 𝒞(f') + 𝒞(f² f') - 2 f 𝒞(f f').
PeriodicField op_K(const PeriodicField& f, const GridSpec& grid);

/// Evaluates 𝒞 through the kernel representation instead of the Fourier
/// multiplier: with F the antiderivative of the input,
///   𝒞(F')(x) = -(1/2π) ∫_0^π β'(s) (2F(x) - F(x+s) - F(x-s)) ds,
/// computed by adaptive Gauss-Kronrod quadrature at every node.
PeriodicField pv_hilbert_quadrature(const PeriodicField& field,
                                    const GridSpec& grid,
                                    const KernelConfig& kernel,
                                    double quad_tol = 1e-12);

}  // namespace cvw
