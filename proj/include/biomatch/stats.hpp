#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "biomatch/error.hpp"

namespace biomatch {

/// Gaussian model of one feature: a user-specific mean with variance `rho`
/// (between-user variance) plus capture noise with variance 1 - rho, so the
/// total feature distribution is standard normal.
template <typename Scalar>
class FeatureModel {
 public:
  explicit FeatureModel(Scalar rho) : rho_(rho) {
    if (!(rho >= Scalar(0) && rho < Scalar(1)))
      throw DomainError("between-user variance must lie in [0, 1)");
  }

  Scalar rho() const { return rho_; }
  Scalar sigma_w2() const { return Scalar(1) - rho_; }

 private:
  Scalar rho_;
};

using FeatureModeld = FeatureModel<double>;

/// Covariance [[1, rho], [rho, 1]] of a genuine (probe, template) pair.
template <typename Scalar>
class GenuineCovariance {
 public:
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;

  explicit GenuineCovariance(Scalar rho) : rho_(rho) {
    if (!(std::abs(rho) < Scalar(1))) throw DomainError("singular genuine covariance (|rho| >= 1)");
  }

  Scalar rho() const { return rho_; }
  Scalar determinant() const { return Scalar(1) - rho_ * rho_; }

  Matrix matrix() const {
    Matrix m;
    m << Scalar(1), rho_, rho_, Scalar(1);
    return m;
  }

  Matrix inverse() const {
    Matrix m;
    m << Scalar(1), -rho_, -rho_, Scalar(1);
    return m / determinant();
  }

 private:
  Scalar rho_;
};

/// Standard normal CDF. NaN input throws DomainError.
double norm_cdf(double x);

/// Upper tail 1 - Phi(x), accurate in relative terms for large x.
double norm_sf(double x);

/// Inverse of norm_cdf on (0, 1).
double norm_inv_cdf(double p);

/// Probability that (X, Y) ~ N(0, [[1, rho], [rho, 1]]) falls in
/// [xlo, xhi] x [ylo, yhi]. Limits may be infinite.
double bvn_rect_prob(double xlo, double xhi, double ylo, double yhi, double rho);

/// Per-feature log-likelihood ratio of a (probe, template) pair:
/// 1/2 ((p^2 + t^2) - v' Sigma^-1 v) - 1/2 ln|Sigma| with v = (p, t).
template <typename Scalar>
Scalar llr_continuous(Scalar p, Scalar t, const FeatureModel<Scalar>& model) {
  const GenuineCovariance<Scalar> cov(model.rho());
  const Eigen::Matrix<Scalar, 2, 1> v(p, t);
  const Scalar quad = v.dot(cov.inverse() * v);
  return Scalar(0.5) * ((p * p + t * t) - quad) - Scalar(0.5) * std::log(cov.determinant());
}

/// Sum of per-feature LLRs over a k-dimensional probe/template pair.
template <typename DerivedP, typename DerivedT, typename Models>
typename DerivedP::Scalar comparator_continuous(const Eigen::MatrixBase<DerivedP>& probe,
                                                const Eigen::MatrixBase<DerivedT>& templ,
                                                const Models& models) {
  using Scalar = typename DerivedP::Scalar;
  const auto k = probe.size();
  if (k == 0 || templ.size() != k || static_cast<Eigen::Index>(std::size(models)) != k)
    throw DomainError("comparator inputs must share a nonzero length");
  Scalar sum(0);
  Eigen::Index i = 0;
  for (const auto& model : models) {
    sum += llr_continuous<Scalar>(probe(i), templ(i), model);
    ++i;
  }
  return sum;
}

}  // namespace biomatch
