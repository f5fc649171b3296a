#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cvw/kernel.hpp"
#include "support/oracles.hpp"

using namespace cvw;
using cvw::testing::pi;

namespace {
KernelConfig at(double d) { return KernelConfig{.d = d}; }
}  // namespace

TEST(Kernel, VanishesAtPi) {
  for (double d : {0.5, 1.0, 5.0}) EXPECT_LT(std::abs(beta_eval(pi, at(d))), 1e-10) << d;
}

TEST(Kernel, OddAndPeriodic) {
  for (double d : {0.1, 1.0, 10.0})
    for (double s : {0.1, 1.0, 2.5}) {
      EXPECT_NEAR(beta_eval(-s, at(d)), -beta_eval(s, at(d)), 1e-12);
      EXPECT_NEAR(beta_eval(s, at(d)) + beta_eval(2.0 * pi - s, at(d)), 0.0, 1e-11);
    }
}

TEST(Kernel, FrozenReferenceValues) {
  EXPECT_NEAR(beta_eval(pi / 2, at(1.0)), cvw::testing::kBeta1HalfPi, 1e-13);
  EXPECT_NEAR(beta_eval(pi / 2, at(2.0)), cvw::testing::kBeta2HalfPi, 1e-13);
  EXPECT_NEAR(beta_eval(pi / 2, at(5.0)), cvw::testing::kBeta5HalfPi, 1e-13);
}

TEST(Kernel, DualSeriesAgree) {
  for (double d : {0.05, 0.3, 1.0, 7.0, 100.0})
    for (double s : {0.1, pi / 2, pi, 2.0}) {
      const double a = beta_certified(s, at(d)).value;
      const double b = beta_bilateral(s, at(d)).value;
      EXPECT_NEAR(a, b, 1e-11) << "d=" << d << " s=" << s;
    }
}

TEST(Kernel, CertifiedTailBelowTolerance) {
  const KernelValue v = beta_certified(1.0, at(1.0));
  EXPECT_LE(v.tail_bound, 1e-13);
  EXPECT_GT(v.terms, 0);
}

TEST(Kernel, SingularAtZero) {
  EXPECT_THROW(beta_eval(0.0, at(1.0)), KernelError);
  EXPECT_THROW(beta_eval(2.0 * pi, at(1.0)), KernelError);
}

TEST(Kernel, RegularPartIsContinuous) {
  const double near0 = beta_regular_part(1e-8, at(1.0));
  EXPECT_NEAR(beta_regular_part(0.0, at(1.0)), near0, 1e-7);
}

TEST(KernelPrime, NegativeEvenAndConsistent) {
  for (double s : {0.1, 1.0, 3.0, 6.0}) EXPECT_LT(beta_prime_eval(s, at(1.0)), 0.0) << s;
  EXPECT_NEAR(beta_prime_eval(-1.3, at(1.0)), beta_prime_eval(1.3, at(1.0)), 1e-12);
  const double h = 1e-5;
  const double fd = (beta_eval(1.0 + h, at(1.0)) - beta_eval(1.0 - h, at(1.0))) / (2.0 * h);
  EXPECT_NEAR(fd, beta_prime_eval(1.0, at(1.0)), 1e-6);
}

TEST(KernelRemark, SubstitutionMatchesSeries) {
  EXPECT_NEAR(beta_half_pi_remark_form(2.0, {}), beta_eval(pi / 2, at(2.0)), 1e-10);
}

TEST(KernelRemark, DeepLimit) {
  EXPECT_LT(std::abs(beta_eval(pi / 2, at(1e4)) - 1.0), 1e-3);
}

TEST(Lemma1, HoldsOnGrid) {
  const KernelReport r = lemma1_verify({0.1, 0.5, 1, 2, 5, 10, 50}, {}, 64);
  EXPECT_TRUE(r.ok());
  for (const auto& row : r.rows) {
    EXPECT_GE(row.beta_half_pi, strpos_lower_bound()) << row.d;
    EXPECT_TRUE(row.monotone_ok) << row.d;
    EXPECT_GT(row.strpos_margin, 0.0);
  }
  EXPECT_NEAR(strpos_lower_bound(), 0.363380, 1e-6);
  EXPECT_GT(beta_eval(3.0, at(10.0)), 0.0);
}

TEST(ConjectureScan, ReportsOnly) {
  const KernelReport r = conjecture_scan({0.05, 1.0, 1e4}, {});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_GE(r.rows[0].beta_half_pi, strpos_lower_bound());
  EXPECT_LT(r.rows[2].distance_from_one, 1e-3);
  EXPECT_TRUE(r.ok());
}

TEST(KernelCsv, Columns) {
  std::ostringstream s;
  write_kernel_csv(s, lemma1_verify({1.0}, {}, 8));
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')),
            "d,beta_half_pi,tail_bound,monotone_ok,strpos_margin");
}
