#pragma once

// The convolution kernel β_d of the strip conjugate-function operator,
//
//   β_d(s) = -s/d + (π/d) coth(πs/2d)
//            + (π/d) Σ_{n≥1} 2 sinh(πs/d) / (cosh(πs/d) - cosh(2π²n/d)),
//
// evaluated with a certified bound on the truncated series tail.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvw {

struct KernelConfig {
  double d = 1.0;
  int max_terms = 200000;
  double tail_tol = 1e-13;

  void validate() const;
};

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the neglected part of the series
  int terms = 0;
};

/// β_d(s) from the single-sided series. Odd and 2π-periodic; throws
/// KernelError for s ∈ 2πℤ or when the tail bound cannot be met.
KernelValue beta_certified(double s, const KernelConfig& cfg);
double beta_eval(double s, const KernelConfig& cfg);

/// β_d(s) from the bilateral coth series; used to cross-check beta_eval.
KernelValue beta_bilateral(double s, const KernelConfig& cfg);

/// β'_d(s) by term-by-term differentiation. Even and 2π-periodic.
KernelValue beta_prime_certified(double s, const KernelConfig& cfg);
double beta_prime_eval(double s, const KernelConfig& cfg);

/// β_d(s) - (π/d) coth(πs/2d), which extends continuously to s = 0.
double beta_regular_part(double s, const KernelConfig& cfg);

/// β_d(π/2) through the variable x = π²/2d:
///   π β_d(π/2) = 2x coth(x/2) - x - 4x sinh(x) Σ 1/(cosh(4nx) - cosh(x)).
double beta_half_pi_remark_form(double d, const KernelConfig& cfg);

struct KernelRow {
  double d = 0.0;
  double beta_half_pi = 0.0;
  double tail_bound = 0.0;
  bool positive_ok = false;
  bool monotone_ok = false;
  bool pi_zero_ok = false;
  double beta_at_pi = 0.0;
  double strpos_margin = 0.0;  // β_d(π/2) - (π-2)/π
  double distance_from_one = 0.0;
};

struct KernelFailure {
  double d = 0.0;
  double s = 0.0;
  std::string what;
};

struct KernelReport {
  std::vector<KernelRow> rows;
  std::vector<KernelFailure> failures;
  double min_beta_half_pi = 0.0;
  double min_strpos_margin = 0.0;
  // Exploratory only: whether β_d(π/2) ≥ 1 held on every sampled d.
  bool conjecture_held = false;

  bool ok() const { return failures.empty(); }
};

/// (π-2)/π, the proven lower bound for β_d(π/2).
double strpos_lower_bound();

/// Positivity and strict decrease of β_d on `samples` points of (0, π),
/// β_d(π) = 0, and β_d(π/2) ≥ (π-2)/π for every d in the grid.
KernelReport lemma1_verify(const std::vector<double>& d_grid,
                           const KernelConfig& cfg, int samples = 64);

/// Scan of β_d(π/2) over d. Only the proven facts are recorded as failures.
KernelReport conjecture_scan(const std::vector<double>& d_grid,
                             const KernelConfig& cfg);

/// Columns: d, beta_half_pi, tail_bound, monotone_ok, strpos_margin.
void write_kernel_csv(std::ostream& out, const KernelReport& report);

}  // namespace cvw
