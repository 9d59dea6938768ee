#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace biomatch {

/// Standard normal draws by inversion of a 53-bit uniform from mt19937_64.
/// Both pieces are fully specified, so streams are reproducible byte-for-byte
/// across platforms for a given seed.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform_open();  // (0, 1)
  double operator()();

 private:
  std::mt19937_64 engine_;
};

/// User-specific means: mu_i ~ N(0, rho_i).
Eigen::VectorXd sample_user_mean(std::span<const double> rho, NormalSampler& sampler);

/// One capture of a user: mu_i + N(0, 1 - rho_i).
Eigen::VectorXd sample_capture(const Eigen::VectorXd& mean, std::span<const double> rho, NormalSampler& sampler);

}  // namespace biomatch
