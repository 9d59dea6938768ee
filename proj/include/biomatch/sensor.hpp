#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "biomatch/net.hpp"
#include "biomatch/protocol.hpp"

namespace biomatch {

/// Feature files: a header line "k=<n>", then one comma-separated vector per line.
std::vector<FeatureVector> read_feature_file(const std::filesystem::path& path);
std::vector<FeatureVector> parse_feature_text(const std::string& text);
void write_feature_file(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors);

/// Where a sensor gets its feature vector from.
struct FileCapture {
  std::filesystem::path path;
  std::size_t index = 0;
};

/// Synthetic subject: the user seed fixes the mean vector, the capture seed the
/// noise draw.
struct SyntheticCapture {
  std::uint64_t user_seed = 0;
  std::uint64_t capture_seed = 0;
};

using CaptureSource = std::variant<FileCapture, SyntheticCapture>;

/// Produces one vector of length k; throws ConfigError on a length mismatch.
FeatureVector capture(const CaptureSource& source, const SystemContext& ctx);

enum class VerifyOutcome { accept, reject, unknown_user, locked_out };

/// Sensor side of both protocols over any channel.
class SensorClient {
 public:
  SensorClient(Channel& channel, const SystemContext& ctx, PublicKey pk, RandomSource& rng)
      : channel_(channel), ctx_(ctx), pk_(std::move(pk)), rng_(rng) {}

  void enroll(const std::string& user, const FeatureRef& features);
  VerifyOutcome verify(const std::string& user, const FeatureRef& probe, const SensorShare& share);

 private:
  Frame expect_reply();

  Channel& channel_;
  const SystemContext& ctx_;
  PublicKey pk_;
  RandomSource& rng_;
};

}  // namespace biomatch
