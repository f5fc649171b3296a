#include "cvw/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace cvw {

namespace {

constexpr double pi = std::numbers::pi;

// Reduces s to (-π, π]. Returns false at the singular points s ∈ 2πℤ.
bool reduce(double s, double& t) {
  if (!std::isfinite(s)) return false;
  t = std::remainder(s, 2.0 * pi);
  if (t <= -pi) t += 2.0 * pi;
  return t != 0.0;
}

// One-minus-exponential, 1 - e^{-z}, accurate for small z.
double one_minus_exp(double z) { return -std::expm1(-z); }

// The n-th term of the single-sided series without the π/d prefactor:
//   2 sinh X / (cosh X - cosh Y),   X = π t/d ∈ [0, π²/d],  Y = 2π²n/d,
// rewritten with decaying exponentials only.
double series_term(double X, double Y) {
  return -2.0 * std::exp(X - Y) * one_minus_exp(2.0 * X) /
         (one_minus_exp(X + Y) * one_minus_exp(Y - X));
}

// d/dX [sinh X / (cosh X - cosh Y)] = (1 - cosh X cosh Y) / (cosh X - cosh Y)².
double series_term_slope(double X, double Y) {
  const double num = 4.0 * std::exp(-(X + Y)) - 1.0 - std::exp(-2.0 * Y) -
                     std::exp(-2.0 * X) - std::exp(-2.0 * (X + Y));
  const double a = one_minus_exp(X + Y);
  const double b = one_minus_exp(Y - X);
  return std::exp(-(Y - X)) * num / (a * a * b * b);
}

KernelValue single_sided_sum(double t, const KernelConfig& cfg) {
  const double d = cfg.d;
  const double X = pi * t / d;
  const double step = 2.0 * pi * pi / d;
  const double gap = one_minus_exp(pi * pi / d);
  const double geometric = one_minus_exp(step);
  const double scale = (pi / d) * 2.0 / (gap * gap * geometric);

  KernelValue out;
  double sum = 0.0;
  for (int n = 1; n <= cfg.max_terms; ++n) {
    sum += series_term(X, step * n);
    const double tail = scale * std::exp(X - step * (n + 1));
    if (tail <= cfg.tail_tol) {
      out.value = (pi / d) * sum;
      out.tail_bound = tail;
      out.terms = n;
      return out;
    }
  }
  throw KernelError("beta series: tail bound not reached within max_terms (d=" +
                    std::to_string(d) + ")");
}

}  // namespace

void KernelConfig::validate() const {
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::invalid_argument("KernelConfig: strip height d must be positive");
  if (max_terms <= 0)
    throw std::invalid_argument("KernelConfig: max_terms must be positive");
  if (!(tail_tol > 0.0))
    throw std::invalid_argument("KernelConfig: tail_tol must be positive");
}

KernelValue beta_certified(double s, const KernelConfig& cfg) {
  cfg.validate();
  double t = 0.0;
  if (!reduce(s, t)) throw KernelError("beta: s lies on the singular set 2πℤ");
  const double sign = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  const double d = cfg.d;
  KernelValue series = single_sided_sum(t, cfg);
  const double head = -t / d + (pi / d) / std::tanh(pi * t / (2.0 * d));
  series.value = sign * (head + series.value);
  return series;
}

double beta_eval(double s, const KernelConfig& cfg) {
  return beta_certified(s, cfg).value;
}

KernelValue beta_bilateral(double s, const KernelConfig& cfg) {
  cfg.validate();
  double t = 0.0;
  if (!reduce(s, t)) throw KernelError("beta: s lies on the singular set 2πℤ");
  const double sign = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  const double d = cfg.d;
  const double step = 2.0 * pi * pi / d;
  const double scale = (pi / d) * 4.0 * std::exp(pi * t / d) /
                       (one_minus_exp(pi * pi / d) * one_minus_exp(step));

  double sum = 1.0 / std::tanh(pi * t / (2.0 * d));
  for (int n = 1; n <= cfg.max_terms; ++n) {
    // coth(π(t - 2πn)/2d) + 1  and  coth(π(t + 2πn)/2d) - 1
    const double y1 = pi * (2.0 * pi * n - t) / d;
    const double y2 = pi * (2.0 * pi * n + t) / d;
    sum += -2.0 * std::exp(-y1) / one_minus_exp(y1);
    sum += 2.0 * std::exp(-y2) / one_minus_exp(y2);
    const double tail = scale * std::exp(-step * (n + 1));
    if (tail <= cfg.tail_tol) {
      KernelValue out;
      out.value = sign * (-t / d + (pi / d) * sum);
      out.tail_bound = tail;
      out.terms = n;
      return out;
    }
  }
  throw KernelError("beta (bilateral): tail bound not reached within max_terms");
}

KernelValue beta_prime_certified(double s, const KernelConfig& cfg) {
  cfg.validate();
  double t = 0.0;
  if (!reduce(s, t)) throw KernelError("beta': s lies on the singular set 2πℤ");
  t = std::abs(t);
  const double d = cfg.d;
  const double X = pi * t / d;
  const double step = 2.0 * pi * pi / d;
  const double gap = one_minus_exp(pi * pi / d);
  const double prefactor = 2.0 * pi * pi / (d * d);
  const double scale =
      prefactor * 4.0 / (gap * gap * gap * gap * one_minus_exp(step));

  const double sh = std::sinh(pi * t / (2.0 * d));
  const double head = -1.0 / d - (pi * pi / (2.0 * d * d)) / (sh * sh);

  double sum = 0.0;
  for (int n = 1; n <= cfg.max_terms; ++n) {
    sum += series_term_slope(X, step * n);
    const double tail = scale * std::exp(X - step * (n + 1));
    if (tail <= cfg.tail_tol) {
      KernelValue out;
      out.value = head + prefactor * sum;
      out.tail_bound = tail;
      out.terms = n;
      return out;
    }
  }
  throw KernelError("beta': tail bound not reached within max_terms");
}

double beta_prime_eval(double s, const KernelConfig& cfg) {
  return beta_prime_certified(s, cfg).value;
}

double beta_regular_part(double s, const KernelConfig& cfg) {
  cfg.validate();
  if (std::abs(s) > pi)
    throw std::invalid_argument("beta_regular_part: |s| must not exceed π");
  if (s == 0.0) return 0.0;
  const KernelValue series = single_sided_sum(std::abs(s), cfg);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  return -s / cfg.d + sign * series.value;
}

double beta_half_pi_remark_form(double d, const KernelConfig& cfg) {
  KernelConfig c = cfg;
  c.d = d;
  c.validate();
  const double x = pi * pi / (2.0 * d);
  const double gap = one_minus_exp(3.0 * x);
  const double scale = 4.0 * x / (gap * gap * one_minus_exp(4.0 * x));
  double sum = 0.0;
  for (int n = 1; n <= c.max_terms; ++n) {
    // sinh x / (cosh 4nx - cosh x)
    const double Y = 4.0 * n * x;
    sum += std::exp(x - Y) * one_minus_exp(2.0 * x) /
           (one_minus_exp(x + Y) * one_minus_exp(Y - x));
    if (scale * std::exp(x - 4.0 * (n + 1) * x) <= c.tail_tol) {
      const double scaled = 2.0 * x / std::tanh(x / 2.0) - x - 4.0 * x * sum;
      return scaled / pi;
    }
  }
  throw KernelError("remark form: tail bound not reached within max_terms");
}

double strpos_lower_bound() { return (pi - 2.0) / pi; }

namespace {

KernelRow half_pi_row(double d, const KernelConfig& base) {
  KernelConfig cfg = base;
  cfg.d = d;
  const KernelValue half = beta_certified(pi / 2.0, cfg);
  KernelRow row;
  row.d = d;
  row.beta_half_pi = half.value;
  row.tail_bound = half.tail_bound;
  row.strpos_margin = half.value - strpos_lower_bound();
  row.distance_from_one = half.value - 1.0;
  row.beta_at_pi = beta_eval(pi, cfg);
  row.pi_zero_ok = std::abs(row.beta_at_pi) < 1e-10;
  return row;
}

void summarize(KernelReport& report) {
  report.min_beta_half_pi = std::numeric_limits<double>::infinity();
  report.min_strpos_margin = std::numeric_limits<double>::infinity();
  report.conjecture_held = true;
  for (const auto& row : report.rows) {
    report.min_beta_half_pi = std::min(report.min_beta_half_pi, row.beta_half_pi);
    report.min_strpos_margin = std::min(report.min_strpos_margin, row.strpos_margin);
    if (row.beta_half_pi < 1.0) report.conjecture_held = false;
  }
}

}  // namespace

KernelReport lemma1_verify(const std::vector<double>& d_grid,
                           const KernelConfig& cfg, int samples) {
  if (samples < 2) throw std::invalid_argument("lemma1_verify: need >= 2 samples");
  KernelReport report;
  for (double d : d_grid) {
    if (!(d > 0.0)) throw std::invalid_argument("lemma1_verify: d must be positive");
    KernelRow row = half_pi_row(d, cfg);
    KernelConfig c = cfg;
    c.d = d;

    row.positive_ok = true;
    row.monotone_ok = true;
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= samples; ++i) {
      const double s = pi * i / (samples + 1);
      const KernelValue b = beta_certified(s, c);
      row.tail_bound = std::max(row.tail_bound, b.tail_bound);
      if (!(b.value > 0.0)) {
        row.positive_ok = false;
        report.failures.push_back({d, s, "beta not positive"});
      }
      if (!(b.value < previous)) {
        row.monotone_ok = false;
        report.failures.push_back({d, s, "beta not strictly decreasing"});
      }
      previous = b.value;
    }
    if (!row.pi_zero_ok) report.failures.push_back({d, pi, "beta(pi) != 0"});
    if (!(row.strpos_margin >= 0.0))
      report.failures.push_back({d, pi / 2.0, "beta(pi/2) below (pi-2)/pi"});
    if (row.tail_bound > cfg.tail_tol)
      report.failures.push_back({d, pi / 2.0, "tail bound above tolerance"});
    report.rows.push_back(row);
  }
  summarize(report);
  return report;
}

KernelReport conjecture_scan(const std::vector<double>& d_grid,
                             const KernelConfig& cfg) {
  KernelReport report;
  for (double d : d_grid) {
    if (!(d > 0.0)) throw std::invalid_argument("conjecture_scan: d must be positive");
    KernelRow row = half_pi_row(d, cfg);
    row.positive_ok = row.beta_half_pi > 0.0;
    row.monotone_ok = true;
    if (!(row.strpos_margin >= 0.0))
      report.failures.push_back({d, pi / 2.0, "beta(pi/2) below (pi-2)/pi"});
    report.rows.push_back(row);
  }
  summarize(report);
  return report;
}

void write_kernel_csv(std::ostream& out, const KernelReport& report) {
  out << "d,beta_half_pi,tail_bound,monotone_ok,strpos_margin\n";
  out << std::setprecision(17);
  for (const auto& row : report.rows) {
    out << row.d << ',' << row.beta_half_pi << ',' << row.tail_bound << ','
        << (row.monotone_ok ? 1 : 0) << ',' << row.strpos_margin << '\n';
  }
}

}  // namespace cvw
