#include "biomatch/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>

#include "biomatch/error.hpp"
#include "biomatch/stats.hpp"

namespace biomatch {
namespace {

void check_bits(int bits) {
  if (bits < kMinBits || bits > kMaxBits) throw DomainError("bits per feature must lie in [1, 8]");
}

void check_bin(int bin, const BinScheme& bins) {
  if (bin < 0 || bin >= bins.bin_count()) throw DomainError("bin index out of range");
}

}  // namespace

BinScheme make_bins(int bits) {
  check_bits(bits);
  const int n = 1 << bits;
  BinScheme scheme{bits, std::vector<double>(static_cast<std::size_t>(n) + 1)};
  auto& edge = scheme.boundaries;
  edge.front() = -std::numeric_limits<double>::infinity();
  edge.back() = std::numeric_limits<double>::infinity();
  // Lower half from the inverse CDF, upper half mirrored so the scheme is exactly symmetric.
  for (int j = 1; j < n / 2; ++j) {
    const double x = norm_inv_cdf(static_cast<double>(j) / n);
    edge[static_cast<std::size_t>(j)] = x;
    edge[static_cast<std::size_t>(n - j)] = -x;
  }
  edge[static_cast<std::size_t>(n / 2)] = 0.0;
  return scheme;
}

int quantize_feature(double x, const BinScheme& bins) {
  if (std::isnan(x)) throw DomainError("cannot quantize NaN");
  const auto first = bins.boundaries.begin() + 1;
  const auto last = bins.boundaries.end() - 1;
  return static_cast<int>(std::upper_bound(first, last, x) - first);
}

double quantized_llr_floor(int bits) {
  return std::log(1e-300) + 2.0 * bits * std::numbers::ln2;
}

double quantized_llr(int x, int y, const BinScheme& bins, double rho) {
  check_bin(x, bins);
  check_bin(y, bins);
  // Evaluate one fixed member of the cell's symmetry orbit so that symmetric
  // cells get bit-identical values.
  const int n = bins.bin_count();
  std::pair<int, int> cell{x, y};
  for (auto c : {std::pair{y, x}, std::pair{n - 1 - x, n - 1 - y}, std::pair{n - 1 - y, n - 1 - x}}) cell = std::min(cell, c);
  std::tie(x, y) = cell;
  const double mass = bvn_rect_prob(bins.lower(x), bins.upper(x), bins.lower(y), bins.upper(y), rho);
  if (!(mass > 0.0)) return quantized_llr_floor(bins.bits);
  return std::log(mass) + 2.0 * bins.bits * std::numbers::ln2;
}

Score quantize_score(double s, double delta) {
  if (!(delta > 0.0)) throw DomainError("score step must be positive");
  if (std::isnan(s)) throw DomainError("cannot quantize NaN score");
  return static_cast<Score>(std::llround(s / delta));
}

Eigen::MatrixXd raw_llr_table(const BinScheme& bins, double rho) {
  const int n = bins.bin_count();
  Eigen::MatrixXd raw(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> done =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (done(x, y)) continue;
      const double v = quantized_llr(x, y, bins, rho);
      const int rx = n - 1 - x;
      const int ry = n - 1 - y;
      for (auto [i, j] : {std::pair{x, y}, {y, x}, {rx, ry}, {ry, rx}}) {
        raw(i, j) = v;
        done(i, j) = true;
      }
    }
  }
  return raw;
}

LookupTable build_table(int bits, double rho, double delta) {
  if (!(delta > 0.0)) throw DomainError("score step must be positive");
  const FeatureModeld model(rho);
  const BinScheme bins = make_bins(bits);
  const Eigen::MatrixXd raw = raw_llr_table(bins, model.rho());
  LookupTable table{bits, rho, delta, ScoreMatrix(raw.rows(), raw.cols())};
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      const Score s = quantize_score(raw(i, j), delta);
      if (s < std::numeric_limits<std::int32_t>::min() || s > std::numeric_limits<std::int32_t>::max())
        throw DomainError("quantized score does not fit in 32 bits; increase delta");
      table.scores(i, j) = static_cast<std::int32_t>(s);
    }
  }
  return table;
}

ScoreDistribution::ScoreDistribution(std::map<Score, double> masses) {
  for (const auto& [v, m] : masses)
    if (m > 0.0) masses_.emplace(v, m);
}

Score ScoreDistribution::min() const {
  if (masses_.empty()) throw DomainError("empty score distribution");
  return masses_.begin()->first;
}

Score ScoreDistribution::max() const {
  if (masses_.empty()) throw DomainError("empty score distribution");
  return masses_.rbegin()->first;
}

double ScoreDistribution::total() const {
  double sum = 0.0;
  for (const auto& [v, m] : masses_) sum += m;
  return sum;
}

double ScoreDistribution::mass(Score v) const {
  auto it = masses_.find(v);
  return it == masses_.end() ? 0.0 : it->second;
}

ScoreDistribution table_score_distribution(const LookupTable& table) {
  const double cell = std::ldexp(1.0, -2 * table.bits);
  std::map<Score, double> masses;
  for (Eigen::Index i = 0; i < table.scores.rows(); ++i)
    for (Eigen::Index j = 0; j < table.scores.cols(); ++j) masses[table.scores(i, j)] += cell;
  return ScoreDistribution(std::move(masses));
}

ScoreDistribution convolve(std::span<const ScoreDistribution> dists) {
  if (dists.empty()) throw DomainError("convolve needs at least one distribution");
  std::map<Score, double> acc = dists.front().masses();
  for (const auto& next : dists.subspan(1)) {
    std::map<Score, double> out;
    for (const auto& [a, ma] : acc)
      for (const auto& [b, mb] : next.masses()) out[a + b] += ma * mb;
    acc = std::move(out);
  }
  return ScoreDistribution(std::move(acc));
}

Bytes encode_table(const LookupTable& table) {
  ByteWriter w;
  w.raw(std::string_view("QLRT"));
  w.u8(kTableBlobVersion);
  w.u8(static_cast<std::uint8_t>(table.bits));
  w.f64(table.delta);
  w.f64(table.rho);
  for (Eigen::Index i = 0; i < table.scores.rows(); ++i)
    for (Eigen::Index j = 0; j < table.scores.cols(); ++j) w.i32(table.scores(i, j));
  return std::move(w).take();
}

LookupTable decode_table(ByteView blob) {
  ByteReader r(blob);
  if (r.str(4) != "QLRT") throw FormatError("table blob: bad magic");
  if (r.u8() != kTableBlobVersion) throw FormatError("table blob: unsupported version");
  const int bits = r.u8();
  if (bits < kMinBits || bits > kMaxBits) throw FormatError("table blob: bits out of range");
  LookupTable table;
  table.bits = bits;
  table.delta = r.f64();
  table.rho = r.f64();
  const int n = 1 << bits;
  table.scores.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) table.scores(i, j) = r.i32();
  r.expect_end();
  return table;
}

}  // namespace biomatch
