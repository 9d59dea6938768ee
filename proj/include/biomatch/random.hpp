#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace biomatch {

/// Source of random bytes, injected wherever the protocol needs randomness.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);
};

/// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Seeded, reproducible generator for tests and benchmarks. Not for key material
/// in deployment.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

}  // namespace biomatch
