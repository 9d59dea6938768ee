#include "biomatch/stats.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

#include "biomatch/quadrature.hpp"

namespace biomatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond this the standard normal density is below the smallest normal double.
constexpr double kTail = 38.5;

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Phi(hi) - Phi(lo), evaluated on whichever tail keeps relative precision.
double interval_prob(double lo, double hi) {
  if (lo >= hi) return 0.0;
  if (lo > 0.0) return std::max(0.0, norm_sf(lo) - norm_sf(hi));
  return std::max(0.0, norm_cdf(hi) - norm_cdf(lo));
}

// Acklam's rational approximation; relative error below 1.2e-9.
double acklam(double p) {
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (p < p_low) return tail(std::sqrt(-2.0 * std::log(p)));
  if (p > 1.0 - p_low) return -tail(std::sqrt(-2.0 * std::log1p(-p)));
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_cdf(double x) {
  if (std::isnan(x)) throw DomainError("norm_cdf: NaN input");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_sf(double x) {
  if (std::isnan(x)) throw DomainError("norm_sf: NaN input");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double norm_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_inv_cdf: p must lie in (0, 1)");
  double x = acklam(p);
  // One Newton step; the residual is formed on the tail that keeps precision.
  const double residual = p <= 0.5 ? norm_cdf(x) - p : (1.0 - p) - norm_sf(x);
  const double density = norm_pdf(x);
  if (density > 0.0) x -= residual / density;
  return x;
}

double bvn_rect_prob(double xlo, double xhi, double ylo, double yhi, double rho) {
  if (std::isnan(xlo) || std::isnan(xhi) || std::isnan(ylo) || std::isnan(yhi) || std::isnan(rho))
    throw DomainError("bvn_rect_prob: NaN input");
  if (xlo > xhi || ylo > yhi) throw DomainError("bvn_rect_prob: inverted rectangle");
  if (!(std::abs(rho) < 1.0)) throw DomainError("bvn_rect_prob: |rho| must be < 1");

  xlo = std::max(xlo, -kTail);
  xhi = std::min(xhi, kTail);
  if (xlo >= xhi || ylo >= yhi) return 0.0;
  if (rho == 0.0) return interval_prob(xlo, xhi) * interval_prob(ylo, yhi);

  // Integrate the x-marginal against the conditional law Y | X = x ~ N(rho x, 1 - rho^2).
  const double s = std::sqrt(1.0 - rho * rho);
  auto integrand = [&](double x) {
    const double mean = rho * x;
    const double lo = ylo == -kInf ? -kInf : (ylo - mean) / s;
    const double hi = yhi == kInf ? kInf : (yhi - mean) / s;
    return norm_pdf(x) * interval_prob(lo, hi);
  };

  double mass = detail::integrate_gk15<double>(integrand, xlo, xhi, 1e-300, 1e-13);
  return std::clamp(mass, 0.0, 1.0);
}

}  // namespace biomatch
