#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace biomatch::detail {

/// Adaptive 15-point Gauss-Kronrod integration (globally adaptive bisection).
/// Returns the integral of f over the finite interval [a, b]; the error target is
/// max(epsabs, epsrel * |result|).
template <typename Scalar, typename F>
Scalar integrate_gk15(F&& f, Scalar a, Scalar b, Scalar epsabs, Scalar epsrel, int max_intervals = 2000) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Piece {
    Scalar lo, hi, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };

  auto rule = [&](Scalar lo, Scalar hi) {
    const Scalar center = (lo + hi) / 2;
    const Scalar half = (hi - lo) / 2;
    const Scalar fc = f(center);
    Scalar kronrod = fc * Scalar(wgk[7]);
    Scalar gauss = fc * Scalar(wg[3]);
    for (int j = 0; j < 7; ++j) {
      const Scalar dx = half * Scalar(xgk[j]);
      const Scalar sum = f(center - dx) + f(center + dx);
      kronrod += Scalar(wgk[j]) * sum;
      if (j % 2 == 1) gauss += Scalar(wg[j / 2]) * sum;
    }
    return Piece{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
  };

  if (a == b) return Scalar(0);
  std::priority_queue<Piece> pieces;
  Piece first = rule(a, b);
  Scalar total = first.value;
  Scalar total_error = first.error;
  pieces.push(first);

  for (int n = 1; n < max_intervals; ++n) {
    if (total_error <= std::max(epsabs, epsrel * std::abs(total))) break;
    Piece worst = pieces.top();
    pieces.pop();
    const Scalar mid = (worst.lo + worst.hi) / 2;
    if (!(mid > worst.lo && mid < worst.hi)) {
      pieces.push(worst);
      break;
    }
    Piece left = rule(worst.lo, mid);
    Piece right = rule(mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    pieces.push(left);
    pieces.push(right);
  }

  // Re-sum to shed the drift accumulated by incremental updates.
  Scalar sum = 0;
  while (!pieces.empty()) {
    sum += pieces.top().value;
    pieces.pop();
  }
  return sum;
}

}  // namespace biomatch::detail
