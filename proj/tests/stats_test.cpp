#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "biomatch/error.hpp"
#include "biomatch/stats.hpp"

using namespace biomatch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference values computed offline with 30-digit arithmetic.
constexpr double kPhi1 = 0.841344746068542948585232545632;
constexpr double kPhiMinus5 = 2.86651571879193911673752332875e-7;
constexpr double kPhiMinus20 = 2.75362411860623369507562278086e-89;
constexpr double kInvPhi075 = 0.674489750196081743202227014541;
constexpr double kInvPhi1em10 = -6.36134090240405620469535501582;
constexpr double kOrthant09 = 0.428216853435646864624529057612;  // P(X<0, Y<0), rho 0.9
constexpr double kLlrOrigin09 = 0.83036560341082545401347773874;

struct RectCase {
  double xlo, xhi, ylo, yhi, rho, expected;
};

const RectCase kRects[] = {
    {0.0, 0.5, 0.5, 1.5, 0.6, 0.0543888473523140863098525548982},
    {-1.0, 1.0, -0.5, 2.0, -0.3, 0.462834624259057872424619802665},
    {2.5, kInf, 2.5, kInf, 0.95, 0.00404656100376883857719510469055},
    {-kInf, -2.0, 2.0, kInf, 0.9, 3.73865048064811812657267100418e-21},
    {-0.3186393639643752, -0.15731068461017067, 1.5341205443525463, kInf, 0.8,
     0.000129095837673669991048736222038},
};

// Orthant probability in closed form: 1/4 + asin(rho) / (2 pi).
double orthant(double rho) { return 0.25 + std::asin(rho) / (2.0 * M_PI); }

}  // namespace

TEST(NormCdf, KnownValues) {
  EXPECT_EQ(norm_cdf(0.0), 0.5);
  EXPECT_EQ(norm_cdf(kInf), 1.0);
  EXPECT_EQ(norm_cdf(-kInf), 0.0);
  EXPECT_NEAR(norm_cdf(1.0), kPhi1, 1e-15);
  EXPECT_NEAR(norm_cdf(-5.0) / kPhiMinus5, 1.0, 1e-13);
  EXPECT_NEAR(norm_cdf(-20.0) / kPhiMinus20, 1.0, 1e-12);
  EXPECT_NEAR(norm_sf(20.0) / kPhiMinus20, 1.0, 1e-12);
}

TEST(NormCdf, RejectsNaN) { EXPECT_THROW(norm_cdf(std::nan("")), DomainError); }

TEST(NormInvCdf, KnownValues) {
  EXPECT_EQ(norm_inv_cdf(0.5), 0.0);
  EXPECT_NEAR(norm_inv_cdf(0.75), kInvPhi075, 1e-14);
  EXPECT_NEAR(norm_inv_cdf(0.25), -kInvPhi075, 1e-14);
  EXPECT_NEAR(norm_inv_cdf(1e-10), kInvPhi1em10, 1e-11);
}

TEST(NormInvCdf, DomainErrors) {
  EXPECT_THROW(norm_inv_cdf(0.0), DomainError);
  EXPECT_THROW(norm_inv_cdf(1.0), DomainError);
  EXPECT_THROW(norm_inv_cdf(-0.2), DomainError);
  EXPECT_THROW(norm_inv_cdf(std::nan("")), DomainError);
}

TEST(NormInvCdf, RoundTripAndAntisymmetry) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    double p = unif(gen);
    if (p == 0.0) continue;
    const double x = norm_inv_cdf(p);
    ASSERT_NEAR(norm_cdf(x), p, 1e-9) << p;
    ASSERT_NEAR(norm_inv_cdf(1.0 - p), -x, 1e-8 * std::max(1.0, std::abs(x))) << p;
  }
  // deep tails keep relative accuracy
  for (double p : {1e-300, 1e-100, 1e-20, 1e-5}) EXPECT_NEAR(norm_cdf(norm_inv_cdf(p)) / p, 1.0, 1e-9) << p;
}

TEST(NormInvCdf, Monotone) {
  double prev = -kInf;
  for (int i = 1; i < 20000; ++i) {
    const double x = norm_inv_cdf(i / 20000.0);
    ASSERT_GT(x, prev);
    prev = x;
  }
}

TEST(BvnRect, TotalAndIndependentOrthant) {
  EXPECT_NEAR(bvn_rect_prob(-kInf, kInf, -kInf, kInf, 0.9), 1.0, 1e-12);
  EXPECT_NEAR(bvn_rect_prob(-kInf, 0.0, -kInf, 0.0, 0.0), 0.25, 1e-15);
}

TEST(BvnRect, OrthantMatchesClosedForm) {
  for (double rho : {-0.95, -0.5, 0.1, 0.5, 0.9, 0.99})
    EXPECT_NEAR(bvn_rect_prob(-kInf, 0.0, -kInf, 0.0, rho), orthant(rho), 1e-13) << rho;
  EXPECT_NEAR(bvn_rect_prob(-kInf, 0.0, -kInf, 0.0, 0.9), kOrthant09, 1e-13);
}

TEST(BvnRect, FrozenRectangles) {
  for (const auto& c : kRects) {
    const double got = bvn_rect_prob(c.xlo, c.xhi, c.ylo, c.yhi, c.rho);
    EXPECT_NEAR(got, c.expected, 1e-12);
    EXPECT_NEAR(got / c.expected, 1.0, 1e-8) << "relative accuracy for small cells";
  }
}

TEST(BvnRect, MonteCarloOrthant) {
  // 1e8 correlated pairs from the standard library generator; 3 sigma band.
  constexpr long kDraws = 100'000'000;
  const double rho = 0.9;
  const double s = std::sqrt(1.0 - rho * rho);
  std::mt19937_64 gen(20240601);
  std::normal_distribution<double> normal;
  long hits = 0;
  for (long i = 0; i < kDraws; ++i) {
    const double x = normal(gen);
    const double y = rho * x + s * normal(gen);
    hits += (x < 0.0 && y < 0.0);
  }
  const double est = static_cast<double>(hits) / kDraws;
  const double p = bvn_rect_prob(-kInf, 0.0, -kInf, 0.0, rho);
  const double sigma = std::sqrt(p * (1.0 - p) / kDraws);
  EXPECT_LE(std::abs(est - p), 3.0 * sigma) << "estimate " << est << " vs " << p;
}

TEST(BvnRect, AdditiveUnderSplits) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0), r(-0.98, 0.98);
  for (int i = 0; i < 300; ++i) {
    double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const double rho = r(gen);
    const double mid = a + (b - a) * std::uniform_real_distribution<double>(0, 1)(gen);
    const double whole = bvn_rect_prob(a, b, c, d, rho);
    const double parts = bvn_rect_prob(a, mid, c, d, rho) + bvn_rect_prob(mid, b, c, d, rho);
    ASSERT_NEAR(whole, parts, 1e-9);
    ASSERT_NEAR(bvn_rect_prob(a, b, c, d, rho), bvn_rect_prob(c, d, a, b, rho), 1e-12);
  }
}

TEST(BvnRect, Errors) {
  EXPECT_THROW(bvn_rect_prob(0, 1, 0, 1, 1.0), DomainError);
  EXPECT_THROW(bvn_rect_prob(0, 1, 0, 1, -1.0), DomainError);
  EXPECT_THROW(bvn_rect_prob(1, 0, 0, 1, 0.5), DomainError);
  EXPECT_THROW(bvn_rect_prob(0, 1, std::nan(""), 1, 0.5), DomainError);
}

TEST(FeatureModel, Invariants) {
  const FeatureModeld m(0.7);
  EXPECT_DOUBLE_EQ(m.rho() + m.sigma_w2(), 1.0);
  EXPECT_THROW(FeatureModeld(1.0), DomainError);
  EXPECT_THROW(FeatureModeld(-0.1), DomainError);
  const GenuineCovariance<double> cov(0.6);
  EXPECT_DOUBLE_EQ(cov.determinant(), 1.0 - 0.36);
  EXPECT_TRUE(cov.matrix().isApprox(cov.matrix().transpose()));
  EXPECT_TRUE((cov.matrix() * cov.inverse()).isApprox(Eigen::Matrix2d::Identity(), 1e-14));
  EXPECT_THROW(GenuineCovariance<double>(1.0), DomainError);
}

TEST(LlrContinuous, Examples) {
  const FeatureModeld zero(0.0);
  for (double p : {-2.0, 0.3, 1.7})
    for (double t : {-1.1, 0.0, 2.4}) EXPECT_NEAR(llr_continuous(p, t, zero), 0.0, 1e-15);
  EXPECT_NEAR(llr_continuous(0.0, 0.0, FeatureModeld(0.9)), kLlrOrigin09, 1e-14);
  const FeatureModeld m(0.75);
  EXPECT_EQ(llr_continuous(1.2, -0.3, m), llr_continuous(-0.3, 1.2, m));
}

TEST(LlrContinuous, SymmetryProperty) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> r(0.0, 0.99);
  for (int i = 0; i < 10000; ++i) {
    const FeatureModeld m(r(gen));
    const double p = 3 * n(gen), t = 3 * n(gen);
    ASSERT_NEAR(llr_continuous(p, t, m), llr_continuous(t, p, m), 1e-12);
  }
}

TEST(LlrContinuous, VanishesAsRhoGoesToZero) {
  double prev = kInf;
  for (double rho : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    double sup = 0.0;
    for (double p = -4.0; p <= 4.0; p += 0.25)
      for (double t = -4.0; t <= 4.0; t += 0.25) sup = std::max(sup, std::abs(llr_continuous(p, t, FeatureModeld(rho))));
    EXPECT_LT(sup, prev);
    prev = sup;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Comparator, SumsFeatureTerms) {
  const std::vector<FeatureModeld> models{FeatureModeld(0.7), FeatureModeld(0.85), FeatureModeld(0.9)};
  const Eigen::Vector3d p(0.4, -1.3, 2.2), t(0.1, -0.9, 1.5);
  // term by term, written out from the closed form
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double r = models[static_cast<std::size_t>(i)].rho();
    const double det = 1 - r * r;
    const double quad = (p(i) * p(i) - 2 * r * p(i) * t(i) + t(i) * t(i)) / det;
    expected += 0.5 * (p(i) * p(i) + t(i) * t(i) - quad) - 0.5 * std::log(det);
  }
  EXPECT_NEAR(comparator_continuous(p, t, models), expected, 1e-12);

  const std::vector<FeatureModeld> one{FeatureModeld(0.8)};
  EXPECT_EQ(comparator_continuous(Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, -0.2), one),
            llr_continuous(0.3, -0.2, one[0]));
  const std::vector<FeatureModeld> zeros(3, FeatureModeld(0.0));
  EXPECT_NEAR(comparator_continuous(p, t, zeros), 0.0, 1e-15);
  EXPECT_THROW(comparator_continuous(p, Eigen::Vector2d(0, 0), models), DomainError);
}
