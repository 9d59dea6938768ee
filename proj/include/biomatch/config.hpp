#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "biomatch/ec_elgamal.hpp"
#include "biomatch/quantization.hpp"

namespace biomatch {

/// Parameters shared by sensor and service.
struct SystemConfig {
  int features = 0;  // k
  int bits = 0;      // b
  double delta = 1.0;
  std::vector<double> rho;  // one between-user variance per feature
  Score threshold = 0;
  Curve curve = Curve::p256;
};

/// Parses the text form:
///
///   # comment
///   features  = 3
///   bits      = 3
///   delta     = 1
///   rho       = 0.7, 0.8, 0.9
///   threshold = 2
///   curve     = P-256
///   score_max = 6        (optional; checked against the derived value)
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::filesystem::path& path);
std::string format_config(const SystemConfig& config);

/// A validated configuration together with everything derived from it: bins,
/// lookup tables, and the total score distribution. Immutable after
/// construction.
class SystemContext {
 public:
  explicit SystemContext(SystemConfig config);

  /// Same tables with a different threshold (revalidated against the domain).
  SystemContext with_threshold(Score threshold) const;

  const SystemConfig& config() const { return config_; }
  int features() const { return config_.features; }
  int bits() const { return config_.bits; }
  int row_width() const { return 1 << config_.bits; }
  Score threshold() const { return config_.threshold; }
  const Group& group() const { return Group::get(config_.curve); }

  const BinScheme& bins() const { return bins_; }
  const LookupTable& table(int feature) const { return tables_.at(static_cast<std::size_t>(feature)); }
  const std::vector<LookupTable>& tables() const { return tables_; }
  const ScoreDistribution& total_distribution() const { return total_; }
  Score score_min() const { return total_.min(); }
  Score score_max() const { return total_.max(); }
  /// max(score domain) - threshold; the compare set holds alpha + 1 elements.
  Score alpha() const { return score_max() - config_.threshold; }

 private:
  void check_threshold() const;

  SystemConfig config_;
  BinScheme bins_;
  std::vector<LookupTable> tables_;
  ScoreDistribution total_;
};

}  // namespace biomatch
