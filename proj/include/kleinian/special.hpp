#pragma once

#include <utility>
#include <vector>

#include "kleinian/common.hpp"
#include "kleinian/quad.hpp"

namespace kleinian {

// Lanczos (g = 7) with reflection for Re z < 1/2.
cplx gamma(cplx z);
// log Gamma on the principal sheet of the Lanczos form; use for ratios.
cplx lgamma(cplx z);
// 1 / Gamma, entire: returns 0 at the poles.
cplx rgamma(cplx z);
// Rising factorial (a)_k.
cplx pochhammer(cplx a, int k);

// True when z is within tol of a nonpositive integer; sets m = -z.
bool near_nonpositive_integer(cplx z, double tol, int& m);

// Gauss 2F1 power series, |z| < 1. Sums until |term| < 1e-16 |sum|
// with a 1e5-term cap; throws numerical_error if the cap is hit.
cplx hyp2f1_series(cplx a, cplx b, cplx c, cplx z);

// Digamma Gamma'/Gamma, by recurrence to Re z >= 15 and the Stirling series.
cplx digamma(cplx z);
// 2F1(a, b; a + b + m; 1 - w) for integer m and 0 < |w| < 1, where the
// z -> 1 - z connection formula degenerates into its logarithmic form.
cplx hyp2f1_log_case(cplx a, cplx b, int m, cplx w);
// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch), cached.
const std::pair<Vec, Vec>& gauss_legendre(int order);
// Same rule refined to binary128 by Newton steps on P_order.
const std::pair<std::vector<qreal>, std::vector<qreal>>& gauss_legendre_q(int order);

// Zonal harmonic of degree p on S^{n-1} normalized to 1 at x = 1:
// Chebyshev T_p for n = 2, Legendre P_p for n = 3, normalized Gegenbauer
// C_p^{(n-2)/2} otherwise.
template <typename T>
T zonal(int p, int n, T x) {
  if (p == 0) return T(1);
  if (n == 2) {
    T a = T(1), b = x;
    for (int k = 1; k < p; ++k) {
      T c = T(2) * x * b - a;
      a = b;
      b = c;
    }
    return b;
  }
  const double alpha = 0.5 * (n - 2);
  T a = T(1), b = T(2 * alpha) * x;
  double norm = 2 * alpha;  // C_1(1)
  for (int k = 1; k < p; ++k) {
    T c = (T(2 * (k + alpha)) * x * b - T(k + 2 * alpha - 1) * a) / T(k + 1);
    a = b;
    b = c;
    norm = norm * (k + 2 * alpha) / (k + 1);
  }
  return b / T(norm);
}

// Dimension of the degree-p harmonic polynomials on R^n.
long harmonic_dim(int p, int n);

}  // namespace kleinian
