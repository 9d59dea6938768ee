#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "biomatch/ec_elgamal.hpp"
#include "biomatch/quantization.hpp"

namespace biomatch {

/// Named feature set: one between-user variance per feature.
struct FeatureSet {
  std::string name;
  std::vector<double> rho;

  int features() const { return static_cast<int>(rho.size()); }
};

/// fs1: 21 features, rho = 0.70, 0.71, ..., 0.90.
/// fs2: 20 features, rho = 0.8.
/// fs3: 12 features, four each of 0.7, 0.8, 0.9.
FeatureSet feature_set(std::string_view name);
FeatureSet single_feature(double rho);

/// Synthetic captures; row u * captures + c holds capture c of user u.
struct Population {
  int users = 0;
  int captures = 0;
  Eigen::MatrixXd samples;

  auto capture(int user, int index) const { return samples.row(user * captures + index); }
};

Population gen_population(const FeatureSet& fs, int users, int captures, std::uint64_t seed);

struct ContinuousScoring {};
struct QuantizedScoring {
  int bits = 4;
  double delta = 1.0;
};
using ScoringMode = std::variant<ContinuousScoring, QuantizedScoring>;

/// Genuine and impostor comparison scores. Weight vectors are either empty
/// (every trial counts once) or parallel to the scores.
struct TrialSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
  std::vector<double> genuine_weight;
  std::vector<double> impostor_weight;
};

/// Genuine trials: every ordered capture pair (a < b) of a user, capture a as
/// enrollment and b as probe. Impostor trials: `impostor_pairs` pairs of
/// distinct users with random captures, drawn from `seed`.
TrialSet score_trials(const FeatureSet& fs, const ScoringMode& mode, const Population& population,
                      std::size_t impostor_pairs, std::uint64_t seed);

/// Score distribution of one table when probe and template come from the same
/// user (each cell weighted by its genuine rectangle mass).
ScoreDistribution genuine_score_distribution(const LookupTable& table);

/// Population-level trial set of the quantized comparator: the exact genuine
/// and impostor score distributions as weighted trials.
TrialSet exact_trials(const FeatureSet& fs, int bits, double delta);

struct EerResult {
  double rate = 0.0;
  double threshold = 0.0;  // sweep threshold nearest the crossing (accept iff score >= threshold)
};

/// Equal error rate by a threshold sweep with linear interpolation between the
/// two thresholds that bracket FAR = FRR.
EerResult eer(const TrialSet& trials);

struct RocPoint {
  double threshold;
  double far;
  double gar;
};

/// ROC in order of increasing FAR; the first row has FAR 0, the last FAR 1.
std::vector<RocPoint> roc_points(const TrialSet& trials);
std::string roc_csv(const std::vector<RocPoint>& points);
/// GAR at a given FAR, interpolated linearly along the ROC.
double gar_at_far(const std::vector<RocPoint>& points, double far);

struct BenchRow {
  std::int64_t alpha;
  double median_ms;
};

/// Median wall time of one compare round (service_compare + sensor_decide)
/// for each alpha, over `repetitions` runs.
std::vector<BenchRow> bench_alpha(Curve curve, const std::vector<std::int64_t>& alphas, int repetitions,
                                  std::uint64_t seed);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace biomatch
