#include "kleinian/harmonic.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <type_traits>

#include "kleinian/special.hpp"

namespace kleinian {

namespace {

void check_n(int n) {
  if (n < 2) throw config_error("harmonic: n must be at least 2");
}

// Gamma(a) / Gamma(b), via log-gamma once the magnitudes get large.
cplx gamma_ratio(cplx a, cplx b) {
  if (std::abs(a) + std::abs(b) < 60.0) return gamma(a) * rgamma(b);
  return std::exp(lgamma(a) - lgamma(b));
}

// One quadrature rule on S^{n-1}, points as columns, in double or binary128.
template <typename T>
struct Rule {
  int n = 0;
  std::vector<T> pts;  // n * count, column-major
  std::vector<T> w;
  std::size_t size() const { return w.size(); }
  const T* point(std::size_t i) const { return pts.data() + i * static_cast<std::size_t>(n); }
};

template <typename T>
T t_cos(T x) {
  if constexpr (std::is_same_v<T, qreal>) return cosq(x); else return std::cos(x);
}
template <typename T>
T t_sin(T x) {
  if constexpr (std::is_same_v<T, qreal>) return sinq(x); else return std::sin(x);
}
template <typename T>
T t_sqrt(T x) {
  if constexpr (std::is_same_v<T, qreal>) return sqrtq(x); else return std::sqrt(x);
}
template <typename T>
T t_pi() {
  if constexpr (std::is_same_v<T, qreal>) return M_PIq; else return kPi;
}

// n = 2: trapezoid. n = 3: Gauss-Legendre in the polar angle about `pole`
// (a unit vector) times trapezoid in azimuth.
template <typename T>
Rule<T> make_rule(int n, int order, const Vec& pole) {
  Rule<T> r;
  r.n = n;
  if (n == 2) {
    r.pts.resize(2 * static_cast<std::size_t>(order));
    r.w.assign(static_cast<std::size_t>(order), T(1) / T(order));
    for (int i = 0; i < order; ++i) {
      const T th = 2 * t_pi<T>() * T(i) / T(order);
      r.pts[2 * static_cast<std::size_t>(i)] = t_cos(th);
      r.pts[2 * static_cast<std::size_t>(i) + 1] = t_sin(th);
    }
    return r;
  }
  if (n != 3) throw config_error("poisson: only n = 2 and n = 3 are supported");
  // Householder frame taking e1 to the pole, built in T: a frame orthogonal
  // only to double precision leaks low modes into tiny high K-type components.
  T d[3] = {T(pole(0)), T(pole(1)), T(pole(2))};
  const T dn = t_sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  for (auto& v : d) v /= dn;
  const T sgn = d[0] > 0 ? T(1) : T(-1);
  T v[3] = {d[0] - sgn, d[1], d[2]};
  const T vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  T F[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) F[i][j] = (i == j ? T(1) : T(0)) - (vv > 0 ? 2 * v[i] * v[j] / vv : T(0));
  for (int i = 0; i < 3; ++i) F[i][0] *= sgn;

  std::vector<T> x, wx;
  if constexpr (std::is_same_v<T, qreal>) {
    const auto& q = gauss_legendre_q(order);
    x = q.first;
    wx = q.second;
  } else {
    const auto& q = gauss_legendre(order);
    x.assign(q.first.data(), q.first.data() + order);
    wx.assign(q.second.data(), q.second.data() + order);
  }
  const int naz = 2 * order;
  const std::size_t count = static_cast<std::size_t>(order) * static_cast<std::size_t>(naz);
  r.pts.resize(3 * count);
  r.w.resize(count);
  for (int i = 0; i < order; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const T s = t_sqrt(std::max(T(0), 1 - x[ii] * x[ii]));
    for (int j = 0; j < naz; ++j) {
      const T ph = 2 * t_pi<T>() * T(j) / T(naz);
      const T y[3] = {x[ii], s * t_cos(ph), s * t_sin(ph)};
      const std::size_t k = ii * static_cast<std::size_t>(naz) + static_cast<std::size_t>(j);
      for (int a = 0; a < 3; ++a) r.pts[3 * k + static_cast<std::size_t>(a)] = F[a][0] * y[0] + F[a][1] * y[1] + F[a][2] * y[2];
      r.w[k] = wx[ii] / T(2 * naz);
    }
  }
  return r;
}

struct QuadResult {
  cplx value;
  double abs_mass;
};

// Poisson kernel a(g^{-1} k)^{-(lambda+rho)} f(k) summed over one rule.
QuadResult poisson_sum(const BoundarySection& f, const Mat& g, const Rule<double>& rule) {
  const int n = f.n;
  const cplx s = -f.weight - rho_of(n);
  const Vec col = g.col(0).tail(n);
  std::vector<cplx> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) {
    const Eigen::Map<const Vec> x(rule.point(i), n);
    const double a = g(0, 0) - col.dot(x);
    terms[i] = rule.w[i] * std::exp(s * std::log(a)) * f.eval(x);
  });
  CompensatedSum<cplx> acc;
  double mass = 0.0;
  for (const auto& t : terms) {
    acc.add(t);
    mass += std::abs(t);
  }
  return {acc.value(), mass};
}

QuadResult poisson_sum(const BoundarySection& f, const Mat& g, const Rule<qreal>& rule) {
  const int n = f.n;
  const cplx s = -f.weight - rho_of(n);
  std::vector<qcplx> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) {
    const qreal* x = rule.point(i);
    qreal a = g(0, 0);
    for (int j = 0; j < n; ++j) a -= qreal(g(j + 1, 0)) * x[j];
    const qcplx k = qpow(a, s.real(), s.imag());
    const qcplx v = k * f.eval_q(x);
    terms[i] = {rule.w[i] * v.re, rule.w[i] * v.im};
  });
  qreal re = 0, im = 0;
  double mass = 0.0;
  for (const auto& t : terms) {
    re += t.re;
    im += t.im;
    mass += std::hypot(static_cast<double>(t.re), static_cast<double>(t.im));
  }
  return {cplx(static_cast<double>(re), static_cast<double>(im)), mass};
}

// Pfaff-transformed hypergeometric factor of Phi, with the z -> 1 - z
// connection formula once r^2 is close to 1.
cplx phi_hypergeometric(cplx mu, int p, double rho, double r2, double z1) {
  const cplx a = mu + 0.5, b = mu + double(p) + rho, c = double(p) + rho + 0.5;
  const cplx cab = c - a - b;  // = -2 mu
  if (r2 < 0.9) return hyp2f1_series(a, b, c, r2);
  if (std::abs(cab - std::round(cab.real())) < 1e-8)
    return hyp2f1_log_case(a, b, static_cast<int>(std::round(cab.real())), z1);
  const cplx t1 = gamma(c) * gamma(cab) * rgamma(c - a) * rgamma(c - b) * hyp2f1_series(a, b, 1.0 - cab, z1);
  const cplx t2 = std::pow(cplx(z1), cab) * gamma(c) * gamma(-cab) * rgamma(a) * rgamma(b) *
                  hyp2f1_series(c - a, c - b, 1.0 + cab, z1);
  return t1 + t2;
}

// Raw radial integral I_p(lambda) = int_0^{pi/2} sin^{-2 lambda - 1} b cos^{n-2} b psi_p(cos 2b) db,
// continued meromorphically: the piece [0, b1] is integrated term by term
// from the Taylor series of the regular factor, read off a DFT on a circle.
struct RadialPieces {
  cplx value;
  cplx h0;  // regular factor at b = 0
};

RadialPieces radial_integral(cplx lambda, int p, int n) {
  const double b1 = std::min(0.5, 1.5 / (p + 1));
  const double R = 2.4 * b1;
  constexpr int N = 64;
  const cplx e = -2.0 * lambda - 1.0;
  auto regular = [&](cplx b) {
    cplx v = std::exp(e * std::log(std::sin(b) / b));
    for (int k = 0; k < n - 2; ++k) v *= std::cos(b);
    return v * zonal<cplx>(p, n, std::cos(2.0 * b));
  };
  std::vector<cplx> samples(N);
  for (int k = 0; k < N; ++k) samples[static_cast<std::size_t>(k)] = regular(std::polar(R, 2.0 * kPi * k / N));
  cplx lower = 0.0, h0 = 0.0;
  for (int j = 0; 2 * j < N; ++j) {
    cplx hj = 0.0;
    for (int k = 0; k < N; ++k)
      hj += samples[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * kPi * (2 * j) * k / N);
    hj /= double(N) * std::pow(R, 2 * j);
    if (j == 0) h0 = hj;
    const cplx ex = 2.0 * double(j) - 2.0 * lambda;
    if (std::abs(ex) < 1e-12) throw PoleError("knapp-stein: pole", lambda, 1);
    lower += hj * std::exp(ex * std::log(b1)) / ex;
  }
  // psi_p(cos 2b) has p oscillations on the upper piece
  const auto& [x, w] = gauss_legendre(128 * ((255 + 2 * p) / 128));
  cplx upper = 0.0;
  const double mid = 0.5 * (kPi / 2 + b1), half = 0.5 * (kPi / 2 - b1);
  for (int i = 0; i < x.size(); ++i) {
    const double b = mid + half * x(i);
    double cs = 1.0;
    for (int k = 0; k < n - 2; ++k) cs *= std::cos(b);
    upper += w(i) * half * std::exp(e * std::log(std::sin(b))) * cs * zonal(p, n, std::cos(2.0 * b));
  }
  return {lower + upper, h0};
}

bool near_natural(cplx lambda, double tol) {
  if (lambda.real() < -tol) return false;
  return std::abs(lambda - std::round(lambda.real())) < tol;
}

cplx jhat_direct(cplx lambda, int p, int n) { return knapp_stein_constant(n) * radial_integral(lambda, p, n).value; }

}  // namespace

BoundarySection pi_lambda(const GroupElement& g, const BoundarySection& f) {
  const int n = f.n;
  if (g.n() != n) throw config_error("pi_lambda: dimension mismatch");
  const cplx ex = f.weight - rho_of(n);
  const GroupElement gi = g.inverse();
  BoundarySection out;
  out.n = n;
  out.weight = f.weight;
  out.eval = [gi, ex, f](const Vec& x) -> cplx {
    const Mat& m = gi.matrix();
    const Vec y = m.col(0) + m.rightCols(x.size()) * x;  // g^{-1} (1, x)
    return std::exp(ex * std::log(y(0))) * f.eval(y.tail(x.size()) / y(0));
  };
  if (f.eval_q) {
    out.eval_q = [gi, ex, f, n](const qreal* x) -> qcplx {
      const Mat& m = gi.matrix();
      std::vector<qreal> y(static_cast<std::size_t>(n + 1));
      for (int i = 0; i <= n; ++i) {
        qreal v = m(i, 0);
        for (int j = 0; j < n; ++j) v += qreal(m(i, j + 1)) * x[j];
        y[static_cast<std::size_t>(i)] = v;
      }
      for (int i = 1; i <= n; ++i) y[static_cast<std::size_t>(i)] /= y[0];
      return qpow(y[0], ex.real(), ex.imag()) * f.eval_q(y.data() + 1);
    };
  }
  return out;
}

cplx poisson(const BoundarySection& f, const GroupElement& g, const PoissonOptions& opt) {
  const int n = f.n;
  if (g.n() != n) throw config_error("poisson: dimension mismatch");
  Vec pole = g.matrix().col(0).tail(n);
  if (pole.norm() < 1e-300) pole = Vec::Unit(n, 0);
  const int cap = n == 2 ? opt.max_order : std::min(opt.max_order, 1024);
  // Double precision first; sections with a binary128 evaluator are redone in
  // binary128 when the sum cancels heavily (a tiny component of O(1) terms).
  auto converge = [&](bool quad, int order) -> std::pair<QuadResult, int> {
    const double floor = quad ? 1e-30 : 64 * 1.1e-16;
    auto run = [&](int o) {
      if (quad) return poisson_sum(f, g.matrix(), make_rule<qreal>(n, o, pole));
      return poisson_sum(f, g.matrix(), make_rule<double>(n, o, pole));
    };
    QuadResult prev = run(order);
    while (order * 2 <= cap) {
      order *= 2;
      const QuadResult cur = run(order);
      const double diff = std::abs(cur.value - prev.value);
      if (diff <= std::max(opt.tol * std::abs(cur.value), floor * cur.abs_mass)) return {cur, order};
      prev = cur;
    }
    throw numerical_error("poisson: quadrature did not converge at order " + std::to_string(order));
  };
  const auto [res, order] = converge(false, opt.start_order);
  if (!f.eval_q || std::abs(res.value) > 1e-3 * res.abs_mass) return res.value;
  return converge(true, std::max(opt.start_order, order / 2)).first.value;
}

cplx spherical_fn_constant(cplx mu, int p, int n) {
  check_n(n);
  const double rho = rho_of(n);
  return pochhammer(mu + rho, p) / pochhammer(cplx(rho + 0.5), p);
}

cplx spherical_fn(cplx mu, int p, double a_log, int n) {
  check_n(n);
  if (a_log < 0.0) throw precondition_error("spherical_fn: a_log must be nonnegative");
  if (p < 0) throw precondition_error("spherical_fn: p must be nonnegative");
  const double rho = rho_of(n);
  const double r = std::tanh(0.5 * a_log);
  const double one_minus = 1.0 / (std::cosh(0.5 * a_log) * std::cosh(0.5 * a_log));  // 1 - r^2
  const cplx pre = spherical_fn_constant(mu, p, n) * std::exp((rho + mu) * std::log(one_minus)) * std::pow(r, p);
  if (pre == 0.0) return 0.0;
  return pre * phi_hypergeometric(mu, p, rho, r * r, one_minus);
}

cplx c_function(cplx lambda, int n) {
  check_n(n);
  const double rho = rho_of(n);
  const cplx k = gamma(cplx(2.0 * rho)) / gamma(cplx(rho));
  if (n % 2 == 1) {
    // Gamma(lambda) / Gamma(lambda + rho) = 1 / (lambda (lambda+1) ... (lambda+rho-1))
    cplx d = 1.0;
    for (int j = 0; j < static_cast<int>(rho); ++j) {
      if (std::abs(lambda + double(j)) < 1e-12) throw PoleError("c-function: pole", lambda, 1);
      d *= lambda + double(j);
    }
    return k / d;
  }
  int m;
  if (near_nonpositive_integer(lambda, 1e-12, m)) throw PoleError("c-function: pole", lambda, 1);
  return k * gamma_ratio(lambda, lambda + rho);
}

cplx plancherel(cplx lambda, int n) {
  const double rho = rho_of(n);
  int m;
  const bool pole_plus = near_nonpositive_integer(rho + lambda, 1e-12, m);
  const bool pole_minus = near_nonpositive_integer(rho - lambda, 1e-12, m);
  const cplx g2 = gamma(cplx(rho)) / gamma(cplx(2.0 * rho));
  if (!pole_plus && !pole_minus) {
    // Gamma(rho+l) Gamma(rho-l) / (Gamma(l) Gamma(-l)), with 1/Gamma entire
    return g2 * g2 * gamma(rho + lambda) * gamma(rho - lambda) * rgamma(lambda) * rgamma(-lambda);
  }
  // Gamma(rho+l)/Gamma(l) is a polynomial when rho is an integer; otherwise a pole.
  if (n % 2 == 1) {
    cplx a = 1.0, b = 1.0;
    for (int j = 0; j < static_cast<int>(rho); ++j) {
      a *= lambda + double(j);
      b *= -lambda + double(j);
    }
    return g2 * g2 * a * b;
  }
  throw PoleError("plancherel: pole", lambda, 1);
}

double knapp_stein_constant(int n) {
  check_n(n);
  static std::map<int, double> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  const double c = c_function(1.0, n).real() / radial_integral(-1.0, 0, n).value.real();
  std::lock_guard<std::mutex> lock(mu);
  cache[n] = c;
  return c;
}

KTypeSpectrum knapp_stein_spectrum(cplx lambda, int p_max, int n) {
  check_n(n);
  if (near_natural(lambda, 1e-10)) throw PoleError("knapp-stein: pole at a natural number", lambda, 1);
  KTypeSpectrum out;
  out.p_max = p_max;
  out.values.resize(static_cast<std::size_t>(p_max + 1));
  if (lambda.real() <= 0.0) {
    for (int p = 0; p <= p_max; ++p) out.values[static_cast<std::size_t>(p)] = jhat_direct(lambda, p, n);
    return out;
  }
  const cplx cc = c_function(lambda, n) * c_function(-lambda, n);
  const KTypeSpectrum other = knapp_stein_spectrum(-lambda, p_max, n);
  for (int p = 0; p <= p_max; ++p) {
    const cplx d = other[p];
    // 0/0 at isolated points (n = 2, lambda in 1/2 + N_0): fall back to the
    // continued integral.
    if (std::abs(d) < 1e-12 * std::max(1.0, std::abs(other[0])))
      out.values[static_cast<std::size_t>(p)] = jhat_direct(lambda, p, n);
    else
      out.values[static_cast<std::size_t>(p)] = cc / d;
  }
  return out;
}

KTypeSpectrum knapp_stein_continued(cplx lambda, int p_max, int n) {
  check_n(n);
  if (near_natural(lambda, 1e-10)) throw PoleError("knapp-stein: pole at a natural number", lambda, 1);
  KTypeSpectrum out;
  out.p_max = p_max;
  for (int p = 0; p <= p_max; ++p) out.values.push_back(jhat_direct(lambda, p, n));
  return out;
}

KTypeSpectrum normalized_spectrum(cplx lambda, int p_max, int n) {
  check_n(n);
  KTypeSpectrum out;
  out.p_max = p_max;
  out.values.resize(static_cast<std::size_t>(p_max + 1));
  if (std::abs(lambda) < 1e-7) {
    // ratio of residues at the common simple pole lambda = 0
    const double rho = rho_of(n);
    const double rc = (gamma(cplx(2.0 * rho)) / (gamma(cplx(rho)) * gamma(cplx(rho)))).real();
    for (int p = 0; p <= p_max; ++p)
      out.values[static_cast<std::size_t>(p)] = knapp_stein_constant(n) * radial_integral(-0.5, p, n).h0 / (2.0 * rc);
    return out;
  }
  if (lambda.real() <= 0.0) {
    const KTypeSpectrum j = knapp_stein_spectrum(lambda, p_max, n);
    const cplx c = c_function(-lambda, n);
    for (int p = 0; p <= p_max; ++p) out.values[static_cast<std::size_t>(p)] = j[p] / c;
    return out;
  }
  const KTypeSpectrum j = knapp_stein_spectrum(-lambda, p_max, n);
  const cplx c = c_function(lambda, n);
  for (int p = 0; p <= p_max; ++p) {
    if (std::abs(j[p]) < 1e-12 * std::max(1.0, std::abs(j[0])))
      throw PoleError("normalized intertwiner: pole", lambda, 1);
    out.values[static_cast<std::size_t>(p)] = c / j[p];
  }
  return out;
}

KTypeSpectrum normalized_spectrum_closed_form(cplx lambda, int p_max, int n) {
  check_n(n);
  const double rho = rho_of(n);
  KTypeSpectrum out;
  out.p_max = p_max;
  // j_0 = 1, j_{p+1} = j_p (p + rho + lambda) / (p + rho - lambda)
  cplx v = 1.0;
  for (int p = 0; p <= p_max; ++p) {
    out.values.push_back(v);
    const cplx den = double(p) + rho - lambda;
    if (std::abs(den) < 1e-14) throw PoleError("normalized intertwiner: pole", lambda, 1);
    v *= (double(p) + rho + lambda) / den;
  }
  return out;
}

BoundarySection apply_spectrum(const KTypeSpectrum& spec, const BoundarySection& f, cplx weight, int order) {
  CVec c;
  int pmax = spec.p_max;
  if (f.coefficients && f.p_max <= spec.p_max) {
    c = *f.coefficients;
    pmax = f.p_max;
  } else {
    if (order <= 0) order = f.n == 2 ? 4 * (pmax + 1) : 2 * (pmax + 1);
    c = project(f, pmax, order);
  }
  const HarmonicBasis basis(f.n, pmax);
  for (std::size_t k = 0; k < basis.size(); ++k) c(static_cast<Eigen::Index>(k)) *= spec[basis.index()[k].p];
  return section_from_coefficients(f.n, weight, pmax, c);
}

double laplacian_residual(const BoundarySection& f, const GroupElement& g, double h) {
  const int n = f.n;
  const double rho = rho_of(n);
  PoissonOptions opt;
  opt.tol = 1e-15;
  const cplx u0 = poisson(f, g, opt);
  const cplx lam = f.weight;
  cplx lap = 0.0;
  for (int axis = 1; axis <= n; ++axis) {
    auto u = [&](double s) { return poisson(f, g * boost(n, s, axis), opt); };
    lap += (-u(2 * h) + 16.0 * u(h) - 30.0 * u0 + 16.0 * u(-h) - u(-2 * h)) / (12.0 * h * h);
  }
  return std::abs(-lap + (lam * lam - rho * rho) * u0) / std::max(std::abs(u0), 1e-300);
}

}  // namespace kleinian
