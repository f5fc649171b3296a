#include <gtest/gtest.h>

#include <cmath>

#include "cvw/continuation.hpp"
#include "support/oracles.hpp"

using namespace cvw;
using cvw::testing::pi;

namespace {

PhysicalParams params(double vorticity) {
  PhysicalParams p;
  p.vorticity = vorticity;
  return p;
}

double deviation_from_local_form(const SolutionPoint& s, double amp, const GridSpec& grid) {
  const auto v = synthesize(s.v, grid);
  double worst = 0.0;
  for (int j = 0; j < grid.nodes(); ++j)
    worst = std::max(worst, std::abs(v[j] - s.params.h - amp * std::cos(grid.node(j))));
  return worst;
}

}  // namespace

TEST(Bifurcation, ZeroVorticityValues) {
  const BifurcationData b = bifurcation_data(params(0.0));
  EXPECT_NEAR(b.m_minus, -std::sqrt(9.81 * std::tanh(1.0)), 1e-12);
  EXPECT_NEAR(b.m_minus, -2.73335, 1e-5);
  EXPECT_NEAR(b.Q_minus, 2 * 9.81 + 9.81 * std::tanh(1.0), 1e-12);
  EXPECT_NEAR(b.Q_minus, 27.0912, 1e-4);
  EXPECT_NEAR(b.m_plus, -b.m_minus, 1e-14);
}

TEST(Bifurcation, SignsAndVorticity) {
  for (double U : {-3.0, 0.0, 1.0, 10.0}) {
    const BifurcationData b = bifurcation_data(params(U));
    EXPECT_GT(b.lambda_plus, 0.0);
    EXPECT_LT(b.lambda_minus, 0.0);
    EXPECT_NEAR(b.Q_minus, trivial_head(params(U), b.m_minus), 1e-12);
  }
  const BifurcationData b1 = bifurcation_data(params(1.0));
  EXPECT_NEAR(b1.m_minus, cvw::testing::kMStarMinusU1, 1e-6);
  EXPECT_NEAR(b1.Q_minus, cvw::testing::kQStarMinusU1, 1e-6);
}

TEST(Singularity, DetectedAtBifurcationOnly) {
  const PhysicalParams p = params(0.0);
  const double m = bifurcation_data(p).m_minus;
  const GridSpec g64 = GridSpec::dealiased(64, 1.0);
  const double at = detect_singularity(p, m, g64);
  EXPECT_LT(at, 1e-8);
  EXPECT_GT(detect_singularity(p, m + 0.5, g64), 1e-3);
  EXPECT_GT(detect_singularity(p, m - 0.5, g64), 1e-3);
  const double at128 = detect_singularity(p, m, GridSpec::dealiased(128, 1.0));
  EXPECT_TRUE(at128 <= at || at128 < 1e-14);
}

TEST(Predict, InitialAndSecant) {
  const PhysicalParams p = params(1.0);
  const BifurcationData b = bifurcation_data(p);
  const SolutionPoint s = predict_initial(p, 16, 1e-3);
  EXPECT_DOUBLE_EQ(s.m, b.m_minus);
  EXPECT_DOUBLE_EQ(s.Q, b.Q_minus);
  EXPECT_DOUBLE_EQ(s.v.cos_coeff(0), 1.0);
  EXPECT_DOUBLE_EQ(s.v.cos_coeff(1), 1e-3);

  const SolutionPoint z = predict_initial(p, 16, 0.0);
  const SolutionPoint t = trivial_point(p, b.m_minus, 16);
  EXPECT_EQ(z.v.cos_coeffs(), t.v.cos_coeffs());
  EXPECT_DOUBLE_EQ(z.Q, t.Q);

  SolutionPoint a = predict_initial(p, 16, 0.1), c = predict_initial(p, 16, 0.2);
  a.m = 1.0;
  c.m = 2.0;
  const SolutionPoint e = predict_secant(a, c, 1.0);
  EXPECT_NEAR(e.v.cos_coeff(1), 0.3, 1e-15);
  EXPECT_NEAR(e.m, 3.0, 1e-15);
}

TEST(PackUnpack, RoundTrip) {
  const PhysicalParams p = params(1.0);
  SolutionPoint s = predict_initial(p, 16, 0.01);
  s.v += PeriodicField::cosine(16, 5, 0.002);
  const SolutionPoint r = unpack(pack(s), p);
  EXPECT_EQ(r.v.cos_coeffs(), s.v.cos_coeffs());
  EXPECT_EQ(r.m, s.m);
  EXPECT_EQ(r.Q, s.Q);
  EXPECT_EQ(pack(s).size(), 18);
}

TEST(Jacobian, AnalyticMatchesFiniteDifference) {
  const Branch& b = cvw::testing::short_branch();
  const SolutionPoint& s = b.points[5].point;
  const GridSpec grid = GridSpec::dealiased(64, 1.0);
  const PinConstraint pin = AmplitudePin{s.v.cos_coeff(1)};
  const Eigen::MatrixXd A = stacked_jacobian(s, grid, pin, false);
  const Eigen::MatrixXd F = stacked_jacobian(s, grid, pin, true);
  EXPECT_EQ(A.rows(), 67);
  EXPECT_EQ(A.cols(), 66);
  EXPECT_LT((A - F).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, A.cwiseAbs().maxCoeff()));
}

TEST(Correct, ConvergesFromInitialPredictor) {
  const PhysicalParams p = params(1.0);
  ContinuationConfig cfg;
  cfg.modes = 64;
  cfg.newton_tol = 1e-12;
  const GridSpec grid = cfg.grid(1.0);
  const CorrectorResult r =
      correct(predict_initial(p, 64, 1e-3), grid, cfg, AmplitudePin{1e-3});
  EXPECT_LE(r.iterations, 8);
  EXPECT_LT(r.residual_norm, 1e-12);
  EXPECT_LE(deviation_from_local_form(r.point, 1e-3, grid), 1e-2 * 1e-3);
}

TEST(Correct, TrivialPointIsFixed) {
  const PhysicalParams p = params(1.0);
  ContinuationConfig cfg;
  cfg.modes = 16;
  const SolutionPoint t = trivial_point(p, bifurcation_data(p).m_minus, 16);
  const CorrectorResult r = correct(t, cfg.grid(1.0), cfg, AmplitudePin{0.0});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.point.v.cos_coeffs(), t.v.cos_coeffs());
  EXPECT_EQ(r.point.m, t.m);
  EXPECT_EQ(r.point.Q, t.Q);
}

TEST(Correct, LocalFormImprovesAsAmplitudeShrinks) {
  const PhysicalParams p = params(1.0);
  ContinuationConfig cfg;
  cfg.modes = 32;
  const GridSpec grid = cfg.grid(1.0);
  double previous = 1.0;
  for (double s : {1e-3, 5e-4, 2e-4, 1e-4}) {
    const CorrectorResult r = correct(predict_initial(p, 32, s), grid, cfg, AmplitudePin{s});
    const double ratio = deviation_from_local_form(r.point, s, grid) / s;
    EXPECT_LT(ratio, previous) << s;
    previous = ratio;
  }
}

TEST(Config, Validation) {
  ContinuationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.newton_tol = 1e-14;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = ContinuationConfig{};
  c.s_init = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(ContinuationConfig{}.grid(1.0).nodes(), 512);
}

TEST(Trace, ShortBranchInvariants) {
  const Branch& b = cvw::testing::short_branch();
  ASSERT_EQ(b.points.size(), 25u);
  EXPECT_EQ(b.status, BranchStatus::max_points);
  EXPECT_NEAR(b.points.front().diagnostics.amplitude, 2e-3, 1e-5);
  for (size_t i = 0; i < b.points.size(); ++i) {
    const BranchPoint& bp = b.points[i];
    EXPECT_LT(bp.diagnostics.residual_norm, 1e-10);
    EXPECT_NEAR(bp.point.v.mean(), 1.0, 1e-12);
    EXPECT_GT(bp.diagnostics.min_graph, 0.0);
    EXPECT_GT(bp.diagnostics.bound_margin, 0.0);
    EXPECT_TRUE(bp.diagnostics.certified);
    if (i > 0) {
      EXPECT_GT(bp.s, b.points[i - 1].s);
      EXPECT_GT(bp.diagnostics.amplitude, b.points[i - 1].diagnostics.amplitude);
    }
  }
  EXPECT_LT(b.points.back().diagnostics.min_head, b.points.front().diagnostics.min_head);
}

TEST(Trace, RefinementStability) {
  const Branch& b = cvw::testing::short_branch();
  const SolutionPoint& s = b.points.back().point;
  ContinuationConfig cfg;
  cfg.modes = 128;
  SolutionPoint fine = s;
  std::vector<double> c = s.v.cos_coeffs();
  c.resize(129, 0.0);
  fine.v = PeriodicField(c, std::vector<double>(129, 0.0), Parity::even);
  const CorrectorResult r = correct(fine, cfg.grid(1.0), cfg, AmplitudePin{s.v.cos_coeff(1)});
  EXPECT_NEAR(r.point.m, s.m, 1e-8 * std::abs(s.m));
  EXPECT_NEAR(r.point.Q, s.Q, 1e-8 * s.Q);
}

TEST(Trace, HaltPolicyReturnsCertifiedPrefix) {
  ContinuationConfig cfg;
  cfg.modes = 32;
  cfg.policy = Policy::halt;
  cfg.max_step = 5e-3;
  const Branch b = trace_branch(params(1.0), cfg);
  EXPECT_EQ(b.status, BranchStatus::certification_halt);
  EXPECT_NE(b.message.find("certification failed"), std::string::npos);
  for (const auto& bp : b.points) EXPECT_TRUE(bp.diagnostics.certified);
}
