#include "cvw/equations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace cvw {

namespace {

constexpr double pi = std::numbers::pi;

using Nodal = std::vector<double>;

double nodal_mean(const Nodal& a) {
  return std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
}

// Nodal values of 𝒞(F') where F is the field sampled by `values`.
Nodal conjugate_of_derivative(const Nodal& values, const GridSpec& grid, Parity parity) {
  const PeriodicField F = analyze(values, grid, parity);
  return synthesize(strip_hilbert(derivative(F), grid), grid);
}

Nodal conjugate_of_derivative(const PeriodicField& F, const GridSpec& grid) {
  return synthesize(strip_hilbert(derivative(F), grid), grid);
}


struct MinAt {
  double value = std::numeric_limits<double>::infinity();
  double location = 0.0;
  void take(double v, double x) {
    if (v < value) {
      value = v;
      location = x;
    }
  }
};

}  // namespace

void check_point(const SolutionPoint& p, const GridSpec& grid) {
  p.params.validate();
  if (p.v.modes() != grid.modes())
    throw GridMismatch("solution has " + std::to_string(p.v.modes()) +
                       " modes, grid expects " + std::to_string(grid.modes()));
  if (std::abs(grid.strip_height() - p.params.strip_height()) >
      1e-12 * p.params.strip_height())
    throw GridMismatch("grid strip height differs from k h");
  if (p.v.parity() != Parity::even) throw std::invalid_argument("v must be even");
  if (std::abs(p.v.mean() - p.params.h) > 1e-12 * std::max(1.0, p.params.h))
    throw std::invalid_argument("constraint [v] = h violated");
}

void PhysicalParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("g must be positive");
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (!std::isfinite(vorticity)) throw std::invalid_argument("vorticity must be finite");
}

double trivial_head(const PhysicalParams& p, double m) {
  const double lambda = m / p.h + p.vorticity * p.h / 2.0;
  return 2.0 * p.g * p.h + lambda * lambda;
}

SolutionPoint trivial_point(const PhysicalParams& p, double m, int modes) {
  return {m, trivial_head(p, m), PeriodicField::constant(modes, p.h), p};
}

SurfaceTerms surface_terms(const SolutionPoint& p, const GridSpec& grid) {
  check_point(p, grid);
  const double g = p.params.g, k = p.params.k, h = p.params.h, U = p.params.vorticity;
  SurfaceTerms t;
  t.v = synthesize(p.v, grid);
  const PeriodicField vp = derivative(p.v);
  t.vp = synthesize(vp, grid);
  t.cvp = synthesize(strip_hilbert(vp, grid), grid);
  const size_t M = t.v.size();
  Nodal half_v2(M);
  for (size_t j = 0; j < M; ++j) half_v2[j] = 0.5 * t.v[j] * t.v[j];
  const PeriodicField hv2 = analyze(half_v2, grid, Parity::even);
  t.mean_v2 = 2.0 * hv2.mean();
  t.cvvp = conjugate_of_derivative(hv2, grid);
  t.vy.resize(M);
  t.w.resize(M);
  t.z.resize(M);
  t.head.resize(M);
  for (size_t j = 0; j < M; ++j) {
    t.vy[j] = 1.0 / k + t.cvp[j];
    t.w[j] = p.m / (k * h) - U * t.mean_v2 / (2.0 * k * h) - U * t.cvvp[j];
    t.z[j] = t.w[j] + U * t.v[j] * t.vy[j];
    t.head[j] = p.Q - 2.0 * g * t.v[j];
  }
  return t;
}

double SystemResidual::norm() const {
  double s = scalar * scalar;
  for (double c : field.cos_coeffs()) s += c * c;
  for (double c : field.sin_coeffs()) s += c * c;
  return std::sqrt(s);
}

SystemResidual residual_system(const SolutionPoint& p, const GridSpec& grid) {
  const SurfaceTerms t = surface_terms(p, grid);
  const double g = p.params.g, k = p.params.k, h = p.params.h, U = p.params.vorticity;
  const size_t M = t.v.size();

  // (Q - 2gv - Υ²v²) v' is the derivative of Qv - gv² - Υ²v³/3.
  Nodal G(M), vcvp(M);
  for (size_t j = 0; j < M; ++j) {
    const double v = t.v[j];
    G[j] = p.Q * v - g * v * v - U * U * v * v * v / 3.0;
    vcvp[j] = v * t.cvp[j];
  }
  const Nodal cG = conjugate_of_derivative(G, grid, Parity::even);
  const double mean_vcvp = nodal_mean(vcvp);
  const double constant = (p.Q - 2.0 * U * p.m - 2.0 * g * h) / k;

  Nodal E(M), S1(M), S2(M);
  for (size_t j = 0; j < M; ++j) {
    const double v = t.v[j];
    const double P = p.Q - 2.0 * g * v - U * U * v * v;
    E[j] = cG[j] + P * t.vy[j] - 2.0 * U * v * t.w[j] - constant + 2.0 * g * mean_vcvp;
    S1[j] = t.z[j] * t.z[j];
    S2[j] = t.head[j] * (t.vp[j] * t.vp[j] + t.vy[j] * t.vy[j]);
  }
  return {analyze(E, grid, Parity::even), nodal_mean(S1) - nodal_mean(S2)};
}

SystemResidual linearized_residual(const SolutionPoint& p, const GridSpec& grid,
                                   const PeriodicField& dv, double dm, double dQ) {
  const SurfaceTerms t = surface_terms(p, grid);
  if (dv.modes() != grid.modes()) throw GridMismatch("direction has the wrong mode count");
  if (dv.parity() != Parity::even || dv.mean() != 0.0)
    throw std::invalid_argument("direction must be even with zero mean");
  const double g = p.params.g, k = p.params.k, h = p.params.h, U = p.params.vorticity;
  const size_t M = t.v.size();

  const Nodal dvv = synthesize(dv, grid);
  const PeriodicField dvp_field = derivative(dv);
  const Nodal dvp = synthesize(dvp_field, grid);
  const Nodal cdvp = synthesize(strip_hilbert(dvp_field, grid), grid);

  Nodal dG(M), vdv(M);
  for (size_t j = 0; j < M; ++j) {
    const double v = t.v[j];
    const double P = p.Q - 2.0 * g * v - U * U * v * v;
    dG[j] = dQ * v + P * dvv[j];
    vdv[j] = v * dvv[j];
  }
  const Nodal cdG = conjugate_of_derivative(dG, grid, Parity::even);
  const Nodal cvdv = conjugate_of_derivative(vdv, grid, Parity::even);
  const double mean_vdv = nodal_mean(vdv);

  Nodal a(M), b(M);
  for (size_t j = 0; j < M; ++j) {
    a[j] = dvv[j] * t.cvp[j];
    b[j] = t.v[j] * cdvp[j];
  }
  const double d_mean_vcvp = nodal_mean(a) + nodal_mean(b);

  Nodal dE(M), dS1(M), dS2(M);
  for (size_t j = 0; j < M; ++j) {
    const double v = t.v[j];
    const double P = p.Q - 2.0 * g * v - U * U * v * v;
    const double dP = dQ - 2.0 * g * dvv[j] - 2.0 * U * U * v * dvv[j];
    const double dW = dm / (k * h) - U * mean_vdv / (k * h) - U * cvdv[j];
    dE[j] = cdG[j] + dP * t.vy[j] + P * cdvp[j] - 2.0 * U * dvv[j] * t.w[j] -
            2.0 * U * v * dW - (dQ - 2.0 * U * dm) / k + 2.0 * g * d_mean_vcvp;
    const double dZ = dW + U * dvv[j] * t.vy[j] + U * v * cdvp[j];
    const double T = t.vp[j] * t.vp[j] + t.vy[j] * t.vy[j];
    const double dT = 2.0 * t.vp[j] * dvp[j] + 2.0 * t.vy[j] * cdvp[j];
    dS1[j] = 2.0 * t.z[j] * dZ;
    dS2[j] = (dQ - 2.0 * g * dvv[j]) * T + t.head[j] * dT;
  }
  return {analyze(dE, grid, Parity::even), nodal_mean(dS1) - nodal_mean(dS2)};
}

FFormView to_f_form(const SolutionPoint& p, const GridSpec& grid) {
  const SurfaceTerms t = surface_terms(p, grid);
  const double g = p.params.g, k = p.params.k, h = p.params.h, U = p.params.vorticity;
  const double Q = p.Q, m = p.m;
  const double kappa = k * Q / (2.0 * g);

  FFormView ff;
  std::vector<double> c = p.v.cos_coeffs();
  for (double& x : c) x *= -k;
  c[0] += kappa;
  std::vector<double> s(c.size());
  ff.f = PeriodicField(std::move(c), std::move(s), Parity::even);

  ff.A = U * U / (k * g);
  ff.a = k * (Q - 2.0 * g * h) / (2.0 * g);
  const Nodal fv = synthesize(ff.f, grid);
  Nodal f2(fv.size()), fcfp(fv.size());
  const Nodal cfp = synthesize(strip_hilbert(derivative(ff.f), grid), grid);
  for (size_t j = 0; j < fv.size(); ++j) {
    f2[j] = fv[j] * fv[j];
    fcfp[j] = fv[j] * cfp[j];
  }
  const double mean_f2 = nodal_mean(f2);
  ff.B = (U / g) * (m / h + U * h - U * Q / (2.0 * g) + U * Q * Q / (8.0 * h * g * g) -
                    U * mean_f2 / (2.0 * k * k * h));
  // The constant obtained by multiplying the surface equation by k²/2g.
  ff.b = kappa - U * k * m / g - k * h - nodal_mean(fcfp) + kappa * ff.B -
         U * U * k * h * Q / (2.0 * g * g) + U * U * k * Q * Q / (8.0 * g * g * g);
  return ff;
}

double mean_v2_from_f(const SolutionPoint& p, const FFormView& ff, const GridSpec& grid) {
  const double g = p.params.g, k = p.params.k, h = p.params.h;
  const Nodal fv = synthesize(ff.f, grid);
  double s = 0.0;
  for (double x : fv) s += x * x;
  const double mean_f2 = s / static_cast<double>(fv.size());
  return p.Q * h / g - p.Q * p.Q / (4.0 * g * g) + mean_f2 / (k * k);
}

PeriodicField residual_ef(const FFormView& ff, const GridSpec& grid) {
  const Nodal f = synthesize(ff.f, grid);
  const size_t M = f.size();
  const Nodal cfp = synthesize(strip_hilbert(derivative(ff.f), grid), grid);
  Nodal half_f2(M), third_f3(M);
  for (size_t j = 0; j < M; ++j) {
    half_f2[j] = 0.5 * f[j] * f[j];
    third_f3[j] = f[j] * f[j] * f[j] / 3.0;
  }
  const Nodal cffp = conjugate_of_derivative(half_f2, grid, Parity::even);
  const Nodal cf2fp = conjugate_of_derivative(third_f3, grid, Parity::even);
  Nodal r(M);
  for (size_t j = 0; j < M; ++j) {
    const double K = f[j] * f[j] * cfp[j] + cf2fp[j] - 2.0 * f[j] * cffp[j];
    r[j] = f[j] + (ff.a * ff.A + ff.B) * f[j] - 0.5 * ff.A * f[j] * f[j] -
           (f[j] * cfp[j] + cffp[j]) - ff.b + 0.5 * ff.A * K;
  }
  return analyze(r, grid, Parity::even);
}

double identity_add_check(const SolutionPoint& p, const GridSpec& grid) {
  const SurfaceTerms t = surface_terms(p, grid);
  double worst = 0.0;
  for (size_t j = 0; j < t.v.size(); ++j) {
    const double r =
        t.z[j] * t.z[j] - t.head[j] * (t.vp[j] * t.vp[j] + t.vy[j] * t.vy[j]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

bool ConditionReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ConditionEntry& e) { return e.pass; });
}

std::vector<std::string> ConditionReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.pass) out.push_back(e.name);
  return out;
}

std::optional<ConditionEntry> ConditionReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  return std::nullopt;
}

ConditionReport condition_suite(const SolutionPoint& p, const GridSpec& grid,
                                BranchSign sign) {
  const SurfaceTerms t = surface_terms(p, grid);
  const double g = p.params.g, k = p.params.k, h = p.params.h, U = p.params.vorticity;
  const int M = grid.nodes();
  const int half = M / 2;
  const auto x = grid.node_positions();
  ConditionReport report;
  auto add = [&](const std::string& name, const MinAt& m, bool strict = true) {
    report.entries.push_back(
        {name, strict ? m.value > 0.0 : m.value >= 0.0, m.value, m.location});
  };

  MinAt head, depth, monotone, range, graph, nonvanishing, flow;
  for (int j = 0; j < M; ++j) {
    head.take(t.head[j], x[j]);
    depth.take(t.v[j], x[j]);
    graph.take(t.vy[j], x[j]);
    nonvanishing.take(t.vp[j] * t.vp[j] + t.vy[j] * t.vy[j], x[j]);
    flow.take(sign == BranchSign::minus ? -t.z[j] : t.z[j], x[j]);
  }
  const PeriodicField conj = strip_hilbert(p.v.without_mean(), grid);
  const Nodal cv = synthesize(conj, grid);
  std::vector<double> u(M);
  for (int j = 0; j < M; ++j) u[j] = x[j] / k + cv[j];
  for (int j = 1; j < half; ++j) {
    monotone.take(-t.vp[j], x[j]);
    range.take(std::min(u[j], pi / k - u[j]), x[j]);
  }

  const PeriodicField v2 = derivative(derivative(p.v));
  MinAt curvature;
  curvature.take(-v2(0.0), 0.0);
  curvature.take(v2(pi), pi);

  MinAt crest_trough;
  crest_trough.take(t.vy[0], 0.0);
  crest_trough.take(t.vy[half], pi);

  add("head_positive", head);
  add("depth_positive", depth);
  add("monotone_profile", monotone);
  add("crest_trough", curvature);
  add("conjugate_range", range);
  add("graph_crest_trough", crest_trough);
  add("flow_sign", flow);
  add("graph", graph);

  // Discrete injectivity over one period, with the neighbouring period
  // shifted by 2π/k.
  const double period = 2.0 * pi / k;
  MinAt separation;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      const double dy = t.v[j] - t.v[i];
      const double dx = u[j] - u[i];
      const double d = std::min(std::hypot(dx, dy), std::hypot(dx - period, dy));
      separation.take(d, x[i]);
    }
  if (graph.value > 0.0) {
    for (int j = 0; j < M; ++j) {
      const double next = j + 1 < M ? u[j + 1] : u[0] + period;
      separation.take(next - u[j], x[j]);
    }
  }
  report.entries.push_back({"injective", separation.value > 1e-10, separation.value,
                            separation.location});
  add("nonvanishing", nonvanishing);

  const FFormView ff = to_f_form(p, grid);
  const Nodal f = synthesize(ff.f, grid);
  const Nodal fp = synthesize(derivative(ff.f), grid);
  const PeriodicField J = op_J(ff.f, grid);
  const Nodal jf = synthesize(J, grid);
  const Nodal cfp = synthesize(strip_hilbert(derivative(ff.f), grid), grid);
  double mean_f2 = 0.0;
  for (double fj : f) mean_f2 += fj * fj;
  mean_f2 /= M;

  MinAt f_pos, f_inc, cf_below, f_flow, f_avg;
  for (int j = 0; j < M; ++j) {
    f_pos.take(f[j], x[j]);
    cf_below.take(1.0 - cfp[j], x[j]);
    const double lhs = p.m / h + U * p.Q * p.Q / (8.0 * h * g * g) -
                       U * mean_f2 / (2.0 * k * k * h) - (U / k) * f[j] + (U / k) * jf[j];
    f_flow.take(-lhs, x[j]);
    f_avg.take(-(ff.a * ff.A + ff.B - ff.A * f[j] + ff.A * jf[j]), x[j]);
  }
  for (int j = 1; j < half; ++j) f_inc.take(fp[j], x[j]);

  add("f_positive", f_pos);
  add("f_increasing", f_inc);
  add("cf_below_one", cf_below);
  add("f_flow_sign", f_flow);
  add("f_averaged", f_avg, false);

  MinAt identity;
  identity.value = kIdentityTolerance * p.Q - identity_add_check(p, grid);
  add("bernoulli_identity", identity);
  return report;
}

}  // namespace cvw
