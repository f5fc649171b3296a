#include "cvw/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "cvw/kernel.hpp"

namespace cvw {

namespace {

constexpr double pi = std::numbers::pi;

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// One r2c/c2r pair per transform length. Planning is not thread safe in
// FFTW, executing an existing plan on fresh arrays is.
const PlanPair& plans_for(int nodes) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;
  double* real = fftw_alloc_real(nodes);
  fftw_complex* spec = fftw_alloc_complex(nodes / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p{fftw_plan_dft_r2c_1d(nodes, real, spec, flags),
             fftw_plan_dft_c2r_1d(nodes, spec, real, flags)};
  fftw_free(real);
  fftw_free(spec);
  return cache.emplace(nodes, p).first->second;
}

Parity combine_sum(Parity a, Parity b) { return a == b ? a : Parity::general; }

Parity combine_product(Parity a, Parity b) {
  if (a == Parity::general || b == Parity::general) return Parity::general;
  return a == b ? Parity::even : Parity::odd;
}

void require_same_modes(const PeriodicField& a, const PeriodicField& b) {
  if (a.modes() != b.modes())
    throw GridMismatch("fields carry different mode counts");
}

void require_grid(const PeriodicField& f, const GridSpec& grid) {
  if (f.modes() != grid.modes())
    throw GridMismatch("field has " + std::to_string(f.modes()) +
                       " modes, grid expects " + std::to_string(grid.modes()));
}

// Pointwise f^p on the grid, truncated back to N modes.
PeriodicField power(const PeriodicField& f, int p, const GridSpec& grid) {
  auto values = synthesize(f, grid);
  for (double& v : values) v = std::pow(v, p);
  Parity parity = (p % 2 == 0 && f.parity() != Parity::general) ? Parity::even
                                                                 : f.parity();
  return analyze(values, grid, parity);
}

}  // namespace

Parity flip(Parity p) {
  switch (p) {
    case Parity::even: return Parity::odd;
    case Parity::odd: return Parity::even;
    default: return Parity::general;
  }
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "general";
  }
}

GridSpec::GridSpec(int modes, int nodes, double strip_height)
    : modes_(modes), nodes_(nodes), strip_height_(strip_height) {
  if (modes < 8) throw std::invalid_argument("GridSpec: need at least 8 modes");
  if (nodes < 4 * modes)
    throw std::invalid_argument("GridSpec: node count must be at least 4N");
  if (!(strip_height > 0.0) || !std::isfinite(strip_height))
    throw std::invalid_argument("GridSpec: strip height must be positive");
}

GridSpec GridSpec::dealiased(int modes, double strip_height) {
  return GridSpec(modes, 4 * modes, strip_height);
}

double GridSpec::node(int j) const { return 2.0 * pi * j / nodes_; }

std::vector<double> GridSpec::node_positions() const {
  std::vector<double> x(nodes_);
  for (int j = 0; j < nodes_; ++j) x[j] = node(j);
  return x;
}

double GridSpec::coth_multiplier(int n) const {
  const double z = n * strip_height_;
  return z > 20.0 ? 1.0 : 1.0 / std::tanh(z);
}

PeriodicField::PeriodicField(std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs, Parity parity)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)), parity_(parity) {
  if (cos_.empty() || cos_.size() != sin_.size())
    throw std::invalid_argument("PeriodicField: coefficient vectors must share a nonzero length");
  sin_[0] = 0.0;
  if (parity_ == Parity::even &&
      std::any_of(sin_.begin(), sin_.end(), [](double c) { return c != 0.0; }))
    throw std::invalid_argument("PeriodicField: even field with sine terms");
  if (parity_ == Parity::odd &&
      std::any_of(cos_.begin(), cos_.end(), [](double c) { return c != 0.0; }))
    throw std::invalid_argument("PeriodicField: odd field with cosine terms");
}

PeriodicField PeriodicField::zero(int modes, Parity parity) {
  return PeriodicField(std::vector<double>(modes + 1), std::vector<double>(modes + 1),
                       parity);
}

PeriodicField PeriodicField::constant(int modes, double value) {
  PeriodicField f = zero(modes, Parity::even);
  f.cos_[0] = value;
  return f;
}

PeriodicField PeriodicField::cosine(int modes, int n, double amplitude) {
  if (n < 0 || n > modes) throw std::out_of_range("PeriodicField::cosine: bad mode");
  PeriodicField f = zero(modes, Parity::even);
  f.cos_[n] = amplitude;
  return f;
}

PeriodicField PeriodicField::sine(int modes, int n, double amplitude) {
  if (n < 1 || n > modes) throw std::out_of_range("PeriodicField::sine: bad mode");
  PeriodicField f = zero(modes, Parity::odd);
  f.sin_[n] = amplitude;
  return f;
}

double PeriodicField::operator()(double x) const {
  double sum = cos_[0];
  for (int n = 1; n <= modes(); ++n)
    sum += cos_[n] * std::cos(n * x) + sin_[n] * std::sin(n * x);
  return sum;
}

PeriodicField PeriodicField::without_mean() const { return with_mean(0.0); }

PeriodicField PeriodicField::with_mean(double value) const {
  PeriodicField f = *this;
  f.cos_[0] = value;
  if (f.parity_ == Parity::odd && value != 0.0) f.parity_ = Parity::general;
  return f;
}

double PeriodicField::max_coeff() const {
  double m = 0.0;
  for (double c : cos_) m = std::max(m, std::abs(c));
  for (double c : sin_) m = std::max(m, std::abs(c));
  return m;
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  require_same_modes(*this, other);
  for (size_t n = 0; n < cos_.size(); ++n) {
    cos_[n] += other.cos_[n];
    sin_[n] += other.sin_[n];
  }
  parity_ = combine_sum(parity_, other.parity_);
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  require_same_modes(*this, other);
  for (size_t n = 0; n < cos_.size(); ++n) {
    cos_[n] -= other.cos_[n];
    sin_[n] -= other.sin_[n];
  }
  parity_ = combine_sum(parity_, other.parity_);
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (double& c : cos_) c *= s;
  for (double& c : sin_) c *= s;
  return *this;
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double s, PeriodicField a) { return a *= s; }
PeriodicField operator-(PeriodicField a) { return a *= -1.0; }

PeriodicField analyze_modes(std::span<const double> values, int nodes,
                            int max_mode, Parity parity) {
  if (static_cast<int>(values.size()) != nodes)
    throw GridMismatch("analyze: expected " + std::to_string(nodes) + " samples, got " +
                       std::to_string(values.size()));
  if (max_mode < 0 || 2 * max_mode >= nodes)
    throw std::invalid_argument("analyze: max_mode must stay below M/2");
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw std::invalid_argument("analyze: non-finite sample");
  const PlanPair& plan = plans_for(nodes);
  std::vector<double> in(values.begin(), values.end());
  std::vector<std::complex<double>> out(nodes / 2 + 1);
  fftw_execute_dft_r2c(plan.forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));

  std::vector<double> c(max_mode + 1), s(max_mode + 1);
  c[0] = out[0].real() / nodes;
  for (int n = 1; n <= max_mode; ++n) {
    c[n] = 2.0 * out[n].real() / nodes;
    s[n] = -2.0 * out[n].imag() / nodes;
  }
  if (parity == Parity::even) std::fill(s.begin(), s.end(), 0.0);
  if (parity == Parity::odd) std::fill(c.begin(), c.end(), 0.0);
  return PeriodicField(std::move(c), std::move(s), parity);
}

PeriodicField analyze(std::span<const double> values, const GridSpec& grid,
                      Parity parity) {
  return analyze_modes(values, grid.nodes(), grid.modes(), parity);
}

std::vector<double> synthesize_nodes(const PeriodicField& field, int nodes) {
  if (2 * field.modes() >= nodes)
    throw GridMismatch("synthesize: too few nodes for the field's modes");
  const PlanPair& plan = plans_for(nodes);
  std::vector<std::complex<double>> spec(nodes / 2 + 1);
  spec[0] = field.cos_coeff(0);
  for (int n = 1; n <= field.modes(); ++n)
    spec[n] = {0.5 * field.cos_coeff(n), -0.5 * field.sin_coeff(n)};
  std::vector<double> out(nodes);
  fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(spec.data()),
                       out.data());
  return out;
}

std::vector<double> synthesize(const PeriodicField& field, const GridSpec& grid) {
  require_grid(field, grid);
  return synthesize_nodes(field, grid.nodes());
}

PeriodicField derivative(const PeriodicField& field) {
  const int N = field.modes();
  std::vector<double> c(N + 1), s(N + 1);
  for (int n = 1; n <= N; ++n) {
    c[n] = n * field.sin_coeff(n);
    s[n] = -n * field.cos_coeff(n);
  }
  return PeriodicField(std::move(c), std::move(s), flip(field.parity()));
}

PeriodicField antiderivative(const PeriodicField& field) {
  const double scale = std::max(1.0, field.max_coeff());
  if (std::abs(field.mean()) > 1e-10 * scale)
    throw std::invalid_argument("antiderivative: input mean is not zero");
  const int N = field.modes();
  std::vector<double> c(N + 1), s(N + 1);
  for (int n = 1; n <= N; ++n) {
    c[n] = -field.sin_coeff(n) / n;
    s[n] = field.cos_coeff(n) / n;
  }
  return PeriodicField(std::move(c), std::move(s), flip(field.parity()));
}

double mean(const PeriodicField& field) { return field.mean(); }

PeriodicField product(const PeriodicField& f, const PeriodicField& g,
                      const GridSpec& grid) {
  require_grid(f, grid);
  require_grid(g, grid);
  auto a = synthesize(f, grid);
  const auto b = synthesize(g, grid);
  for (size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
  return analyze(a, grid, combine_product(f.parity(), g.parity()));
}

PeriodicField strip_hilbert(const PeriodicField& field, const GridSpec& grid) {
  require_grid(field, grid);
  const double scale = std::max(1.0, field.max_coeff());
  if (std::abs(field.mean()) > 1e-10 * scale)
    throw std::invalid_argument("strip_hilbert: input mean " +
                                std::to_string(field.mean()) + " is not zero");
  const int N = field.modes();
  std::vector<double> c(N + 1), s(N + 1);
  for (int n = 1; n <= N; ++n) {
    const double k = grid.coth_multiplier(n);
    c[n] = -k * field.sin_coeff(n);
    s[n] = k * field.cos_coeff(n);
  }
  return PeriodicField(std::move(c), std::move(s), flip(field.parity()));
}

PeriodicField op_J(const PeriodicField& f, const GridSpec& grid) {
  const PeriodicField cf = strip_hilbert(derivative(f), grid);
  const PeriodicField ffp = derivative(0.5 * power(f, 2, grid));
  return product(f, cf, grid) - strip_hilbert(ffp, grid);
}

PeriodicField op_K(const PeriodicField& f, const GridSpec& grid) {
  const PeriodicField f2 = power(f, 2, grid);
  const PeriodicField cf = strip_hilbert(derivative(f), grid);
  const PeriodicField cffp = strip_hilbert(derivative(0.5 * f2), grid);
  const PeriodicField cf2fp = strip_hilbert(derivative((1.0 / 3.0) * power(f, 3, grid)), grid);
  return product(f2, cf, grid) + cf2fp - 2.0 * product(f, cffp, grid);
}

PeriodicField pv_hilbert_quadrature(const PeriodicField& field, const GridSpec& grid,
                                    const KernelConfig& kernel, double quad_tol) {
  require_grid(field, grid);
  KernelConfig cfg = kernel;
  cfg.d = grid.strip_height();
  const PeriodicField F = antiderivative(field);
  const int N = F.modes();

  std::vector<double> values(grid.nodes());
  std::vector<double> local(N + 1);
  for (int j = 0; j < grid.nodes(); ++j) {
    const double x = grid.node(j);
    for (int n = 1; n <= N; ++n)
      local[n] = F.cos_coeff(n) * std::cos(n * x) + F.sin_coeff(n) * std::sin(n * x);
    // 2F(x) - F(x+s) - F(x-s) = Σ 4 sin²(ns/2) F_n(x), free of cancellation.
    auto integrand = [&](double s) {
      double second = 0.0;
      for (int n = 1; n <= N; ++n) {
        const double h = std::sin(0.5 * n * s);
        second += 4.0 * h * h * local[n];
      }
      return beta_prime_eval(s, cfg) * second;
    };
    double error = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, pi, 15, quad_tol, &error);
    if (!(error <= 10.0 * quad_tol * std::max(1.0, std::abs(integral))))
      throw QuadratureError("pv_hilbert_quadrature: error estimate above tolerance", error);
    values[j] = -integral / (2.0 * pi);
  }
  return analyze(values, grid, flip(field.parity()));
}

}  // namespace cvw
