#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biomatch/bytes.hpp"

namespace biomatch {

using Score = std::int64_t;
using ScoreMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMinBits = 1;
inline constexpr int kMaxBits = 8;

/// 2^b equiprobable bins of the standard normal. `boundaries` has 2^b + 1
/// entries running from -inf to +inf; bin j is the half-open interval
/// [boundaries[j], boundaries[j + 1]).
struct BinScheme {
  int bits = 0;
  std::vector<double> boundaries;

  int bin_count() const { return 1 << bits; }
  double lower(int bin) const { return boundaries[static_cast<std::size_t>(bin)]; }
  double upper(int bin) const { return boundaries[static_cast<std::size_t>(bin) + 1]; }
};

BinScheme make_bins(int bits);

/// Bin index of a feature value; boundary values map to the upper bin.
int quantize_feature(double x, const BinScheme& bins);

/// Sentinel used when a genuine rectangle mass underflows to zero.
double quantized_llr_floor(int bits);

/// Log-likelihood ratio of a bin pair: ln of the genuine rectangle mass minus
/// ln of the background mass 2^-2b.
double quantized_llr(int x, int y, const BinScheme& bins, double rho);

/// Nearest integer to s / delta, ties away from zero.
Score quantize_score(double s, double delta);

/// Unrounded quantized-LLR matrix for one feature. The four cells related by
/// transposition and by reflection through the origin share one evaluation, so
/// both symmetries hold bit-exactly.
Eigen::MatrixXd raw_llr_table(const BinScheme& bins, double rho);

/// Precomputed integer score table for one feature.
struct LookupTable {
  int bits = 0;
  double rho = 0.0;
  double delta = 1.0;
  ScoreMatrix scores;

  int size() const { return 1 << bits; }
  std::int32_t at(int row, int col) const { return scores(row, col); }
};

LookupTable build_table(int bits, double rho, double delta);

/// Discrete probability mass over integer comparator scores.
class ScoreDistribution {
 public:
  ScoreDistribution() = default;
  explicit ScoreDistribution(std::map<Score, double> masses);

  static ScoreDistribution point(Score v) { return ScoreDistribution({{v, 1.0}}); }

  const std::map<Score, double>& masses() const { return masses_; }
  Score min() const;
  Score max() const;
  double total() const;
  double mass(Score v) const;
  bool empty() const { return masses_.empty(); }

  friend bool operator==(const ScoreDistribution&, const ScoreDistribution&) = default;

 private:
  std::map<Score, double> masses_;
};

/// Score distribution of a single table under the background model: every
/// cell carries mass 2^-2b.
ScoreDistribution table_score_distribution(const LookupTable& table);

/// Exact discrete convolution of independent score distributions.
ScoreDistribution convolve(std::span<const ScoreDistribution> dists);

// Binary table blob: "QLRT", version, b, delta (f64 BE), rho (f64 BE),
// then 2^2b int32 BE scores in row-major order.
inline constexpr std::uint8_t kTableBlobVersion = 1;
Bytes encode_table(const LookupTable& table);
LookupTable decode_table(ByteView blob);

}  // namespace biomatch
