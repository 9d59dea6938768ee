#include "biomatch/sampling.hpp"

#include <cmath>

#include "biomatch/error.hpp"
#include "biomatch/stats.hpp"

namespace biomatch {

double NormalSampler::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalSampler::operator()() { return norm_inv_cdf(uniform_open()); }

Eigen::VectorXd sample_user_mean(std::span<const double> rho, NormalSampler& sampler) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(rho.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = std::sqrt(rho[static_cast<std::size_t>(i)]) * sampler();
  return mu;
}

Eigen::VectorXd sample_capture(const Eigen::VectorXd& mean, std::span<const double> rho, NormalSampler& sampler) {
  if (static_cast<std::size_t>(mean.size()) != rho.size()) throw DomainError("mean and rho lengths differ");
  Eigen::VectorXd x(mean.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x(i) = mean(i) + std::sqrt(1.0 - rho[static_cast<std::size_t>(i)]) * sampler();
  return x;
}

}  // namespace biomatch
