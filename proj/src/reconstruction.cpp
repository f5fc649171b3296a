#include "cvw/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace cvw {

namespace {

constexpr double pi = std::numbers::pi;

// sinh(n(y+d))/sinh(nd) and cosh(n(y+d))/sinh(nd) for y in [-d, 0].
struct ModeFactors {
  double s, c;
};

ModeFactors factors(int n, double y, double d) {
  const double e = std::exp(n * y);
  const double lower = std::exp(-2.0 * n * (y + d));
  const double denom = -std::expm1(-2.0 * n * d);
  return {e * (1.0 - lower) / denom, e * (1.0 + lower) / denom};
}

}  // namespace

std::vector<double> default_levels(double strip_height, int count) {
  if (count < 2) throw std::invalid_argument("default_levels: need at least two levels");
  std::vector<double> y(count);
  for (int j = 0; j < count; ++j)
    y[j] = -strip_height * (1.0 - std::cos(pi * j / (2.0 * (count - 1))));
  y.back() = -strip_height;
  return y;
}

StripExtension::StripExtension(const PeriodicField& trace, double strip_height)
    : trace_(trace), d_(strip_height) {
  if (trace.parity() != Parity::even)
    throw std::invalid_argument("StripExtension: trace must be even");
  if (!(strip_height > 0.0)) throw std::invalid_argument("StripExtension: d must be positive");
}

StripExtension::Value StripExtension::at(double x, double y) const {
  Value r;
  r.f = trace_.mean() * (y + d_) / d_;
  r.fy = trace_.mean() / d_;
  const double c1 = std::cos(x), s1 = std::sin(x);
  double cn = 1.0, sn = 0.0;
  for (int n = 1; n <= trace_.modes(); ++n) {
    const double cn1 = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = cn1;
    const double a = trace_.cos_coeff(n);
    if (a == 0.0) continue;
    const ModeFactors m = factors(n, y, d_);
    r.f += a * m.s * cn;
    r.fx -= a * n * m.s * sn;
    r.fy += a * n * m.c * cn;
  }
  return r;
}

double StripExtension::conjugate(double x, double y) const {
  double u = trace_.mean() * x / d_;
  for (int n = 1; n <= trace_.modes(); ++n) {
    const double a = trace_.cos_coeff(n);
    if (a != 0.0) u += a * factors(n, y, d_).c * std::sin(n * x);
  }
  return u;
}

void StripExtension::level(double y, int nodes, std::vector<double>& f,
                           std::vector<double>& fx, std::vector<double>& fy) const {
  const int N = trace_.modes();
  std::vector<double> cf(N + 1), cy(N + 1), sx(N + 1), zero(N + 1);
  cf[0] = trace_.mean() * (y + d_) / d_;
  cy[0] = trace_.mean() / d_;
  for (int n = 1; n <= N; ++n) {
    const ModeFactors m = factors(n, y, d_);
    const double a = trace_.cos_coeff(n);
    cf[n] = a * m.s;
    cy[n] = a * n * m.c;
    sx[n] = -a * n * m.s;
  }
  f = synthesize_nodes(PeriodicField(cf, zero, Parity::even), nodes);
  fy = synthesize_nodes(PeriodicField(cy, zero, Parity::even), nodes);
  fx = synthesize_nodes(PeriodicField(zero, sx, Parity::odd), nodes);
}

std::vector<double> StripExtension::conjugate_level(double y, int nodes) const {
  const int N = trace_.modes();
  std::vector<double> s(N + 1), zero(N + 1);
  for (int n = 1; n <= N; ++n) s[n] = trace_.cos_coeff(n) * factors(n, y, d_).c;
  std::vector<double> u = synthesize_nodes(PeriodicField(zero, s, Parity::odd), nodes);
  for (int j = 0; j < nodes; ++j) u[j] += trace_.mean() * (2.0 * pi * j / nodes) / d_;
  return u;
}

namespace {

PeriodicField zeta_trace(const SolutionPoint& p, const GridSpec& grid) {
  std::vector<double> t = synthesize(p.v, grid);
  for (double& x : t) x = p.m - 0.5 * p.params.vorticity * x * x;
  return analyze_modes(t, grid.nodes(), grid.nodes() / 2 - 1, Parity::even);
}

}  // namespace

StripMap build_strip_map(const SolutionPoint& p, const std::vector<double>& levels,
                         const GridSpec& grid) {
  check_point(p, grid);
  StripMap map;
  map.d = grid.strip_height();
  map.x = grid.node_positions();
  map.y = levels;
  const StripExtension V(p.v, map.d);
  const int M = grid.nodes();
  for (double y : levels) {
    if (y < -map.d - 1e-14 || y > 1e-14)
      throw std::invalid_argument("build_strip_map: level outside the strip");
    std::vector<double> v, vx, vy;
    V.level(y, M, v, vx, vy);
    map.U.push_back(V.conjugate_level(y, M));
    map.V.push_back(std::move(v));
    map.Ux.push_back(vy);
    std::vector<double> uy(M);
    for (int j = 0; j < M; ++j) uy[j] = -vx[j];
    map.Uy.push_back(std::move(uy));
    map.Vx.push_back(std::move(vx));
    map.Vy.push_back(std::move(vy));
  }
  return map;
}

FlowField build_flow(const SolutionPoint& p, const std::vector<double>& levels,
                     const GridSpec& grid) {
  FlowField flow;
  flow.map = build_strip_map(p, levels, grid);
  const StripExtension Z(zeta_trace(p, grid), grid.strip_height());
  const int M = grid.nodes();
  const double U = p.params.vorticity;
  for (size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> z, zx, zy;
    Z.level(levels[i], M, z, zx, zy);
    std::vector<double> psi(M), hor(M), ver(M);
    for (int j = 0; j < M; ++j) {
      const double Vx = flow.map.Vx[i][j], Vy = flow.map.Vy[i][j], V = flow.map.V[i][j];
      const double D = Vx * Vx + Vy * Vy;
      if (!(D >= 1e-14)) throw FlowError("build_flow: conformal map degenerates");
      psi[j] = z[j] - p.m + 0.5 * U * V * V;
      hor[j] = (Vx * zx[j] + Vy * zy[j]) / D + U * V;
      ver[j] = (Vx * zy[j] - Vy * zx[j]) / D;
    }
    flow.zeta.push_back(std::move(z));
    flow.zeta_x.push_back(std::move(zx));
    flow.zeta_y.push_back(std::move(zy));
    flow.psi.push_back(std::move(psi));
    flow.psi_Y.push_back(std::move(hor));
    flow.minus_psi_X.push_back(std::move(ver));
  }
  return flow;
}

PhysicalReport physical_checks(const SolutionPoint& p, const FlowField& flow) {
  const auto& y = flow.map.y;
  const auto top = std::find_if(y.begin(), y.end(), [](double v) { return std::abs(v) < 1e-14; });
  if (top == y.end()) throw std::invalid_argument("physical_checks: no level at y = 0");
  const size_t i = static_cast<size_t>(top - y.begin());
  const double g = p.params.g, Q = p.Q, U = p.params.vorticity;

  PhysicalReport r;
  r.min_head = std::numeric_limits<double>::infinity();
  r.max_psi_Y = -std::numeric_limits<double>::infinity();
  for (const auto& row : flow.psi_Y)
    for (double u : row) r.max_psi_Y = std::max(r.max_psi_Y, u);
  for (size_t j = 0; j < flow.map.x.size(); ++j) {
    const double Y = flow.map.V[i][j];
    const double u = flow.psi_Y[i][j], w = flow.minus_psi_X[i][j];
    const double speed2 = u * u + w * w;
    const double psi = flow.psi[i][j];
    r.bernoulli_residual = std::max(r.bernoulli_residual, std::abs(speed2 + 2.0 * g * Y - Q) / Q);
    r.R_max = std::max(r.R_max, std::abs(0.5 * speed2 + g * Y - 0.5 * Q - U * psi) / Q);
    r.min_head = std::min(r.min_head, Q - 2.0 * g * Y);
    r.surface_psi = std::max(r.surface_psi, std::abs(psi));
    const double Vx = flow.map.Vx[i][j], Vy = flow.map.Vy[i][j];
    const double lhs = flow.zeta_y[i][j] + U * Y * Vy;
    r.identity_residual = std::max(
        r.identity_residual, std::abs(lhs * lhs - (Q - 2.0 * g * Y) * (Vx * Vx + Vy * Vy)));
  }
  return r;
}

std::vector<double> default_profile_heights(const SolutionPoint& p, int count) {
  const double trough = p.v(pi);
  std::vector<double> Y(count);
  for (int i = 0; i < count; ++i) Y[i] = trough * (0.02 + 0.93 * i / std::max(count - 1, 1));
  return Y;
}

CurrentProfile current_profile(const SolutionPoint& p, const GridSpec& grid,
                               const std::vector<double>& Ys) {
  check_point(p, grid);
  const double d = grid.strip_height(), trough = p.v(pi);
  const double U = p.params.vorticity;
  const StripExtension V(p.v, d);
  const StripExtension Z(zeta_trace(p, grid), d);
  const int M = grid.nodes();
  CurrentProfile prof;
  for (double Y : Ys) {
    if (!(Y >= 0.0 && Y < trough))
      throw std::invalid_argument("current_profile: Y must lie in [0, v(pi))");
    double integral = 0.0;
    for (int j = 0; j < M; ++j) {
      const double x = grid.node(j);
      double y = -d + d * Y / p.params.h;
      StripExtension::Value v = V.at(x, y);
      for (int it = 0; it < 60 && std::abs(v.f - Y) > 1e-15 * (1.0 + Y); ++it) {
        y = std::clamp(y - (v.f - Y) / v.fy, -d, 0.0);
        v = V.at(x, y);
      }
      if (std::abs(v.f - Y) > 1e-12 * (1.0 + Y))
        throw FlowError("current_profile: streamline level not found");
      const StripExtension::Value z = Z.at(x, y);
      integral += (v.fx * z.fx + v.fy * z.fy) / v.fy + U * Y * (v.fx * v.fx + v.fy * v.fy) / v.fy;
    }
    prof.Y.push_back(Y);
    // (k/2π) ∫ dX over one wavelength, X advancing by (V_x² + V_y²)/V_y dx.
    prof.current.push_back(p.params.k * integral / M);
  }
  const size_t n = prof.Y.size();
  if (n >= 2) {
    double sy = 0, sc = 0, syy = 0, syc = 0;
    for (size_t i = 0; i < n; ++i) {
      sy += prof.Y[i];
      sc += prof.current[i];
      syy += prof.Y[i] * prof.Y[i];
      syc += prof.Y[i] * prof.current[i];
    }
    prof.slope = (n * syc - sy * sc) / (n * syy - sy * sy);
    prof.U0 = (sc - prof.slope * sy) / n;
    for (size_t i = 0; i < n; ++i)
      prof.max_deviation = std::max(
          prof.max_deviation, std::abs(prof.current[i] - prof.U0 - prof.slope * prof.Y[i]));
  }
  return prof;
}

double harmonicity_residual(const SolutionPoint& p, const GridSpec& grid) {
  check_point(p, grid);
  const double d = grid.strip_height();
  const int M = grid.nodes();
  const StripExtension V(p.v, d);
  const StripExtension Z(zeta_trace(p, grid), d);
  const double hy = 2e-3 * d;
  double worst = 0.0;

  auto check = [&](const StripExtension& E, bool conjugate, double y0) {
    std::vector<std::vector<double>> rows;
    for (int s = -2; s <= 2; ++s) {
      const double y = y0 + s * hy;
      if (conjugate) {
        rows.push_back(E.conjugate_level(y, M));
      } else {
        std::vector<double> f, fx, fy;
        E.level(y, M, f, fx, fy);
        rows.push_back(std::move(f));
      }
    }
    // f_xx of the centre level from its mode coefficients.
    const PeriodicField& tr = E.trace();
    const int N = tr.modes();
    std::vector<double> c(N + 1), s(N + 1);
    for (int n = 1; n <= N; ++n) {
      const ModeFactors m = factors(n, y0, d);
      if (conjugate)
        s[n] = -double(n) * n * tr.cos_coeff(n) * m.c;
      else
        c[n] = -double(n) * n * tr.cos_coeff(n) * m.s;
    }
    const auto fxx = synthesize_nodes(
        PeriodicField(c, s, conjugate ? Parity::odd : Parity::even), M);
    double scale = 1.0;
    for (double v : fxx) scale = std::max(scale, std::abs(v));
    for (int j = 0; j < M; ++j) {
      const double fyy = (-rows[0][j] + 16.0 * rows[1][j] - 30.0 * rows[2][j] +
                          16.0 * rows[3][j] - rows[4][j]) / (12.0 * hy * hy);
      worst = std::max(worst, std::abs(fxx[j] + fyy) / scale);
    }
  };
  for (double frac : {0.25, 0.5, 0.75}) {
    check(V, false, -frac * d);
    check(V, true, -frac * d);
    check(Z, false, -frac * d);
  }
  return worst;
}

void write_surface_csv(std::ostream& out, const FlowField& flow) {
  const auto& y = flow.map.y;
  const auto top = std::find_if(y.begin(), y.end(), [](double v) { return std::abs(v) < 1e-14; });
  if (top == y.end()) throw std::invalid_argument("write_surface_csv: no level at y = 0");
  const size_t i = static_cast<size_t>(top - y.begin());
  out << "x,u,v\n" << std::setprecision(17);
  for (size_t j = 0; j < flow.map.x.size(); ++j)
    out << flow.map.x[j] << ',' << flow.map.U[i][j] << ',' << flow.map.V[i][j] << '\n';
}

void write_velocity_csv(std::ostream& out, const FlowField& flow) {
  out << "X,Y,psi_Y,minus_psi_X\n" << std::setprecision(17);
  for (size_t i = 0; i < flow.map.y.size(); ++i)
    for (size_t j = 0; j < flow.map.x.size(); ++j)
      out << flow.map.U[i][j] << ',' << flow.map.V[i][j] << ',' << flow.psi_Y[i][j] << ','
          << flow.minus_psi_X[i][j] << '\n';
}

}  // namespace cvw
