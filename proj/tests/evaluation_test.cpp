#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "biomatch/config.hpp"
#include "biomatch/error.hpp"
#include "biomatch/evaluation.hpp"

using namespace biomatch;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

TrialSet unweighted(std::vector<double> gen, std::vector<double> imp) { return TrialSet{std::move(gen), std::move(imp), {}, {}}; }

double sample_variance(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(FeatureSets, Definitions) {
  const FeatureSet fs1 = feature_set("fs1");
  ASSERT_EQ(fs1.features(), 21);
  EXPECT_DOUBLE_EQ(fs1.rho.front(), 0.70);
  EXPECT_DOUBLE_EQ(fs1.rho[10], 0.80);
  EXPECT_DOUBLE_EQ(fs1.rho.back(), 0.90);
  const FeatureSet fs2 = feature_set("fs2");
  ASSERT_EQ(fs2.features(), 20);
  for (double r : fs2.rho) EXPECT_EQ(r, 0.8);
  const FeatureSet fs3 = feature_set("fs3");
  ASSERT_EQ(fs3.features(), 12);
  EXPECT_EQ(std::count(fs3.rho.begin(), fs3.rho.end(), 0.7), 4);
  EXPECT_EQ(std::count(fs3.rho.begin(), fs3.rho.end(), 0.8), 4);
  EXPECT_EQ(std::count(fs3.rho.begin(), fs3.rho.end(), 0.9), 4);
  EXPECT_THROW(feature_set("fs4"), ConfigError);
}

TEST(Population, MarginalsAndUserMeans) {
  const FeatureSet fs = feature_set("fs3");
  const int users = 2000, captures = 5;
  const Population pop = gen_population(fs, users, captures, 42);
  ASSERT_EQ(pop.samples.rows(), users * captures);
  const double n = static_cast<double>(pop.samples.rows());
  for (int f = 0; f < fs.features(); ++f) {
    // total variance 1; sampling sd of the variance estimator is about sqrt(2/n)
    // (inflated for the within-user correlation by 1 + (C - 1) rho^2)
    const double rho = fs.rho[static_cast<std::size_t>(f)];
    const double design = 1 + (captures - 1) * rho * rho;
    EXPECT_NEAR(sample_variance(pop.samples.col(f)), 1.0, 3 * std::sqrt(2.0 * design / n)) << f;

    // per-user sample means have variance rho + (1 - rho) / C
    Eigen::VectorXd means(users);
    for (int u = 0; u < users; ++u) means(u) = pop.samples.col(f).segment(u * captures, captures).mean();
    const double expected = rho + (1 - rho) / captures;
    EXPECT_NEAR(sample_variance(means), expected, 3 * expected * std::sqrt(2.0 / (users - 1))) << f;
  }
}

TEST(Population, Reproducible) {
  const FeatureSet fs = feature_set("fs1");
  const Population a = gen_population(fs, 30, 4, 7), b = gen_population(fs, 30, 4, 7), c = gen_population(fs, 30, 4, 8);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.capture(2, 3), a.samples.row(11));
}

TEST(ScoreTrials, Shapes) {
  const FeatureSet fs = feature_set("fs3");
  const Population pop = gen_population(fs, 50, 4, 1);
  const TrialSet cont = score_trials(fs, ContinuousScoring{}, pop, 3000, 2);
  EXPECT_EQ(cont.genuine.size(), 50u * 6u);
  EXPECT_EQ(cont.impostor.size(), 3000u);
  EXPECT_GT(mean(cont.genuine), mean(cont.impostor));

  const TrialSet quant = score_trials(fs, QuantizedScoring{3, 0.5}, pop, 3000, 2);
  std::vector<ScoreDistribution> dists;
  for (double r : fs.rho) dists.push_back(table_score_distribution(build_table(3, r, 0.5)));
  const ScoreDistribution total = convolve(dists);
  for (const auto* v : {&quant.genuine, &quant.impostor})
    for (double s : *v) {
      ASSERT_GE(s, static_cast<double>(total.min()));
      ASSERT_LE(s, static_cast<double>(total.max()));
      ASSERT_EQ(s, std::round(s));
    }
  EXPECT_EQ(score_trials(fs, QuantizedScoring{3, 0.5}, pop, 3000, 2).impostor, quant.impostor);
}

TEST(ScoreTrials, ZeroRhoIsDegenerate) {
  const FeatureSet fs{"flat", {0.0, 0.0, 0.0}};
  const Population pop = gen_population(fs, 20, 3, 3);
  for (const ScoringMode mode : {ScoringMode{ContinuousScoring{}}, ScoringMode{QuantizedScoring{4, 1.0}}}) {
    const TrialSet t = score_trials(fs, mode, pop, 200, 4);
    for (double s : t.genuine) EXPECT_NEAR(s, 0.0, 1e-12);
    for (double s : t.impostor) EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(Eer, Extremes) {
  EXPECT_EQ(eer(unweighted({5, 6, 7}, {1, 2, 3})).rate, 0.0);
  EXPECT_NEAR(eer(unweighted({1, 2, 3, 4}, {1, 2, 3, 4})).rate, 0.5, 1e-12);
  EXPECT_NEAR(eer(unweighted({2}, {2})).rate, 0.5, 1e-12);
  EXPECT_THROW(eer(unweighted({}, {1})), DomainError);
}

TEST(Eer, InterpolatesBetweenThresholds) {
  // thresholds 1..4: FAR = 1, .5, .5, 0 ; FRR = 0, 0, .5, .5 (accept iff score >= t)
  const EerResult e = eer(unweighted({2, 4}, {1, 3}));
  EXPECT_NEAR(e.rate, 0.5, 1e-12);
  // weighted trials behave like repeated trials
  const TrialSet w{{1.0, 3.0}, {0.0, 2.0}, {3.0, 1.0}, {1.0, 1.0}};
  const TrialSet rep = unweighted({1, 1, 1, 3}, {0, 2});
  EXPECT_NEAR(eer(w).rate, eer(rep).rate, 1e-12);
}

TEST(Roc, Shape) {
  const FeatureSet fs = feature_set("fs3");
  const Population pop = gen_population(fs, 60, 4, 9);
  const TrialSet t = score_trials(fs, QuantizedScoring{3, 1.0}, pop, 4000, 10);
  const auto roc = roc_points(t);
  ASSERT_GE(roc.size(), 3u);
  EXPECT_EQ(roc.front().far, 0.0);
  EXPECT_EQ(roc.back().far, 1.0);
  for (std::size_t i = 1; i < roc.size(); ++i) {
    ASSERT_GE(roc[i].far, roc[i - 1].far);
    ASSERT_GE(roc[i].gar, roc[i - 1].gar);
  }
  // GAR is 1 - FRR at each threshold
  for (const auto& p : roc) {
    const double frr = static_cast<double>(std::count_if(t.genuine.begin(), t.genuine.end(),
                                                         [&](double s) { return s < p.threshold; })) /
                       static_cast<double>(t.genuine.size());
    ASSERT_NEAR(p.gar, 1.0 - frr, 1e-12);
  }
  const std::string csv = roc_csv(roc);
  EXPECT_EQ(csv.rfind("threshold,far,gar\n", 0), 0u);
  EXPECT_EQ(csv, roc_csv(roc_points(score_trials(fs, QuantizedScoring{3, 1.0}, pop, 4000, 10))));
}

TEST(Roc, FourBitsDominateOneBitOnFs1) {
  const FeatureSet fs = feature_set("fs1");
  const Population pop = gen_population(fs, 200, 5, 21);
  const auto r4 = roc_points(score_trials(fs, QuantizedScoring{4, 1.0}, pop, 20000, 22));
  const auto r1 = roc_points(score_trials(fs, QuantizedScoring{1, 1.0}, pop, 20000, 22));
  // paired runs; allow one genuine-trial's worth of slack per point
  const double slack = 3.0 / 2000.0;
  for (double far : {0.001, 0.005, 0.01, 0.05, 0.1}) EXPECT_GE(gar_at_far(r4, far) + slack, gar_at_far(r1, far)) << far;
}

TEST(ExactTrials, Consistency) {
  const FeatureSet fs{"pair", {0.9, 0.8}};
  const TrialSet t = exact_trials(fs, 3, 0.5);
  EXPECT_NEAR(std::accumulate(t.genuine_weight.begin(), t.genuine_weight.end(), 0.0), 1.0, 1e-9);
  EXPECT_NEAR(std::accumulate(t.impostor_weight.begin(), t.impostor_weight.end(), 0.0), 1.0, 1e-12);
  double gm = 0, im = 0;
  for (std::size_t i = 0; i < t.genuine.size(); ++i) gm += t.genuine[i] * t.genuine_weight[i];
  for (std::size_t i = 0; i < t.impostor.size(); ++i) im += t.impostor[i] * t.impostor_weight[i];
  EXPECT_GT(gm, im);

  // the exact EER agrees with a large sampled run
  const Population pop = gen_population(fs, 4000, 4, 5);
  const double sampled = eer(score_trials(fs, QuantizedScoring{3, 0.5}, pop, 200000, 6)).rate;
  EXPECT_NEAR(eer(t).rate, sampled, 0.01);
}

TEST(ExactTrials, GenuineDistributionSumsToOne) {
  const LookupTable table = build_table(4, 0.9, 1.0);
  const ScoreDistribution g = genuine_score_distribution(table);
  EXPECT_NEAR(g.total(), 1.0, 1e-9);
  const ScoreDistribution imp = table_score_distribution(table);
  EXPECT_EQ(g.min() >= imp.min(), true);
  EXPECT_EQ(g.max(), imp.max());
}

TEST(Alpha, MatchesConvolutionAtEerThreshold) {
  const FeatureSet fs = feature_set("fs1");
  const EerResult e = eer(exact_trials(fs, 4, 1.0));
  SystemConfig c;
  c.features = fs.features();
  c.bits = 4;
  c.delta = 1.0;
  c.rho = fs.rho;
  c.threshold = static_cast<Score>(e.threshold);
  const SystemContext ctx(c);
  std::vector<ScoreDistribution> d;
  for (double r : fs.rho) d.push_back(table_score_distribution(build_table(4, r, 1.0)));
  EXPECT_EQ(ctx.alpha(), convolve(d).max() - static_cast<Score>(e.threshold));
  EXPECT_GT(ctx.alpha(), 0);
}

TEST(Alpha, ScalesInverselyWithDelta) {
  const FeatureSet fs = feature_set("fs3");
  auto smax = [&](double delta) {
    std::vector<ScoreDistribution> d;
    for (double r : fs.rho) d.push_back(table_score_distribution(build_table(4, r, delta)));
    return static_cast<double>(convolve(d).max());
  };
  const double base = smax(1.0);
  for (double delta : {0.125, 0.25, 0.5, 2.0}) {
    const double ratio = smax(delta) * delta / base;
    EXPECT_GT(ratio, 0.8) << delta;
    EXPECT_LT(ratio, 1.25) << delta;
  }
}

TEST(Bench, MoreAlphaTakesLonger) {
  const auto rows = bench_alpha(Curve::p256, {10, 80}, 5, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].median_ms, rows[0].median_ms);
  EXPECT_EQ(bench_csv(rows).rfind("alpha,median_ms\n10,", 0), 0u);
}

TEST(LinearFit, ExactAndNoisy) {
  Eigen::VectorXd x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y = 2.5 * x.array() + 1.0;
  const LinearFit f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  y(2) += 3;
  EXPECT_LT(linear_fit(x, y).r2, 0.99);
  EXPECT_THROW(linear_fit(Eigen::VectorXd(1), Eigen::VectorXd(1)), DomainError);
}

TEST(ExactTrials, EerNonIncreasingInBits) {
  const FeatureSet one = single_feature(0.9);
  for (double delta : {1.0, 0.25}) {
    double prev = 1.0;
    for (int b = 2; b <= 6; ++b) {
      const double e = eer(exact_trials(one, b, delta)).rate;
      EXPECT_LE(e, prev) << "b=" << b << " delta=" << delta;
      prev = e;
    }
  }
}
