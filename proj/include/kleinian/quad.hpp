#pragma once

// Binary128 scalars (GCC libquadmath) for the few quadratures whose result is
// a tiny component of O(1) integrands.
#include <quadmath.h>

namespace kleinian {

using qreal = __float128;

struct qcplx {
  qreal re = 0;
  qreal im = 0;
};

inline qcplx operator*(qcplx a, qcplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }

// exp(s log a) for real a > 0 and complex s given in double.
inline qcplx qpow(qreal a, double s_re, double s_im) {
  const qreal l = logq(a);
  const qreal m = expq(qreal(s_re) * l);
  const qreal ph = qreal(s_im) * l;
  return {m * cosq(ph), m * sinq(ph)};
}

}  // namespace kleinian
