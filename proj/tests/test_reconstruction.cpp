#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvw/reconstruction.hpp"
#include "support/oracles.hpp"

using namespace cvw;
using cvw::testing::pi;

namespace {

const GridSpec& grid64() {
  static const GridSpec g = GridSpec::dealiased(64, 1.0);
  return g;
}

const SolutionPoint& late_point() { return cvw::testing::short_branch().points.back().point; }

}  // namespace

TEST(Levels, DefaultSpacing) {
  const auto y = default_levels(2.0);
  ASSERT_EQ(y.size(), 33u);
  EXPECT_EQ(y.front(), 0.0);
  EXPECT_EQ(y.back(), -2.0);
  for (size_t i = 1; i < y.size(); ++i) EXPECT_LT(y[i], y[i - 1]);
}

TEST(StripMap, TrivialPointIsLinear) {
  PhysicalParams p;
  p.k = 2.0;
  p.h = 0.75;
  const GridSpec grid = GridSpec::dealiased(16, p.strip_height());
  const SolutionPoint t = trivial_point(p, -1.0, 16);
  const StripMap map = build_strip_map(t, {0.0, -0.5, -1.5}, grid);
  const double d = p.strip_height();
  for (size_t i = 0; i < map.y.size(); ++i)
    for (size_t j = 0; j < map.x.size(); ++j) {
      EXPECT_NEAR(map.V[i][j], p.h * (map.y[i] + d) / d, 1e-14);
      EXPECT_NEAR(map.U[i][j], map.x[j] / p.k, 1e-13);
    }
}

TEST(StripMap, SurfaceTraces) {
  const SolutionPoint& s = late_point();
  const StripMap map = build_strip_map(s, {0.0}, grid64());
  const SurfaceTerms t = surface_terms(s, grid64());
  const auto cv = synthesize(strip_hilbert(s.v - PeriodicField::constant(64, 1.0), grid64()), grid64());
  for (size_t j = 0; j < map.x.size(); ++j) {
    EXPECT_NEAR(map.V[0][j], t.v[j], 1e-13);
    EXPECT_NEAR(map.Vy[0][j], t.vy[j], 1e-10);
    EXPECT_NEAR(map.Vx[0][j], t.vp[j], 1e-12);
    EXPECT_NEAR(map.U[0][j], map.x[j] + cv[j], 1e-12);
  }
}

TEST(StripExtension, PointEvaluationMatchesLevels) {
  const StripExtension V(late_point().v, 1.0);
  std::vector<double> f, fx, fy;
  V.level(-0.3, 256, f, fx, fy);
  for (int j : {0, 17, 100}) {
    const double x = 2.0 * pi * j / 256;
    const auto a = V.at(x, -0.3);
    EXPECT_NEAR(a.f, f[j], 1e-13);
    EXPECT_NEAR(a.fx, fx[j], 1e-12);
    EXPECT_NEAR(a.fy, fy[j], 1e-12);
  }
  const auto u = V.conjugate_level(-0.3, 256);
  for (int j : {3, 64, 200}) EXPECT_NEAR(V.conjugate(2.0 * pi * j / 256, -0.3), u[j], 1e-12);
}

TEST(Flow, SurfaceNormalDerivativeOfZeta) {
  const SolutionPoint& s = late_point();
  const FlowField flow = build_flow(s, {0.0}, grid64());
  const SurfaceTerms t = surface_terms(s, grid64());
  for (size_t j = 0; j < t.w.size(); ++j) EXPECT_NEAR(flow.zeta_y[0][j], t.w[j], 1e-10);
}

TEST(Flow, TrivialShearFlow) {
  PhysicalParams p;
  p.vorticity = 1.5;
  const GridSpec grid = GridSpec::dealiased(16, 1.0);
  const double m = -2.0;
  const FlowField flow = build_flow(trivial_point(p, m, 16), default_levels(1.0, 9), grid);
  for (size_t i = 0; i < flow.map.y.size(); ++i)
    for (size_t j = 0; j < flow.map.x.size(); ++j) {
      const double Y = flow.map.V[i][j];
      EXPECT_NEAR(flow.psi_Y[i][j], p.vorticity * Y + m / p.h - p.vorticity * p.h / 2, 1e-12);
      EXPECT_NEAR(flow.minus_psi_X[i][j], 0.0, 1e-13);
    }
}

TEST(Flow, NoVerticalVelocityAtCrestAndTrough) {
  const FlowField flow = build_flow(late_point(), {0.0}, grid64());
  const size_t half = flow.map.x.size() / 2;
  EXPECT_NEAR(flow.minus_psi_X[0][0], 0.0, 1e-12);
  EXPECT_NEAR(flow.minus_psi_X[0][half], 0.0, 1e-12);
}

TEST(Physical, BranchPointChecks) {
  const SolutionPoint& s = late_point();
  const FlowField flow = build_flow(s, default_levels(1.0), grid64());
  const PhysicalReport r = physical_checks(s, flow);
  EXPECT_LT(r.bernoulli_residual, 1e-8);
  EXPECT_LT(r.R_max, 1e-8);
  EXPECT_LT(r.max_psi_Y, 0.0);
  EXPECT_GT(r.min_head, 0.0);
  EXPECT_LT(r.surface_psi, 1e-12);
  EXPECT_LT(r.identity_residual, 1e-8 * s.Q);
  EXPECT_TRUE(r.ok());
  EXPECT_THROW(physical_checks(s, build_flow(s, {-0.5}, grid64())), std::invalid_argument);
}

TEST(Physical, CorruptedHeadIsDetected) {
  SolutionPoint s = late_point();
  s.Q *= 1.0 + 1e-5;
  const PhysicalReport r = physical_checks(s, build_flow(s, {0.0}, grid64()));
  EXPECT_GT(r.bernoulli_residual, 1e-6);
  EXPECT_FALSE(r.ok());
}

TEST(Current, AffineWithSlopeUpsilon) {
  const SolutionPoint& s = late_point();
  const CurrentProfile prof = current_profile(s, grid64(), default_profile_heights(s));
  EXPECT_NEAR(prof.slope, s.params.vorticity, 1e-8);
  EXPECT_LT(prof.max_deviation, 1e-8);
  EXPECT_THROW(current_profile(s, grid64(), {s.v(pi) + 1e-3}), std::invalid_argument);
  EXPECT_THROW(current_profile(s, grid64(), {-0.1}), std::invalid_argument);
}

TEST(Current, ConstantWithoutVorticity) {
  PhysicalParams p;
  ContinuationConfig cfg;
  cfg.modes = 32;
  cfg.max_points = 6;
  const Branch b = trace_branch(p, cfg);
  const SolutionPoint& s = b.points.back().point;
  const CurrentProfile prof = current_profile(s, cfg.grid(1.0), default_profile_heights(s, 9));
  for (double u : prof.current) EXPECT_NEAR(u, prof.current.front(), 1e-10);
  EXPECT_NEAR(prof.slope, 0.0, 1e-9);
}

TEST(Harmonicity, InteriorLaplacianSmall) {
  EXPECT_LT(harmonicity_residual(late_point(), grid64()), 1e-6);
}

TEST(Export, CsvHeaders) {
  const FlowField flow = build_flow(late_point(), {0.0, -0.5}, grid64());
  std::ostringstream a, b;
  write_surface_csv(a, flow);
  write_velocity_csv(b, flow);
  const std::string surface = a.str(), velocity = b.str();
  EXPECT_EQ(surface.substr(0, 6), "x,u,v\n");
  EXPECT_EQ(velocity.substr(0, velocity.find('\n')), "X,Y,psi_Y,minus_psi_X");
  EXPECT_EQ(std::count(velocity.begin(), velocity.end(), '\n'), 1 + 2 * 256);
}
