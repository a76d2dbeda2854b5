#include "kleinian/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace kleinian {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos_series(cplx z) {  // z already shifted by -1
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  return x;
}

}  // namespace

bool near_nonpositive_integer(cplx z, double tol, int& m) {
  if (z.real() > tol) return false;
  const double r = std::round(z.real());
  if (std::abs(z - cplx(r, 0.0)) < tol) {
    m = static_cast<int>(-r);
    return true;
  }
  return false;
}

cplx gamma(cplx z) {
  int m;
  if (near_nonpositive_integer(z, 1e-14, m))
    throw PoleError("gamma: pole", z, 1);
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma(1.0 - z));
  z -= 1.0;
  const cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_series(z);
}

cplx lgamma(cplx z) {
  int m;
  if (near_nonpositive_integer(z, 1e-14, m))
    throw PoleError("lgamma: pole", z, 1);
  if (z.real() < 0.5) return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma(1.0 - z);
  z -= 1.0;
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

cplx rgamma(cplx z) {
  int m;
  if (near_nonpositive_integer(z, 1e-14, m)) return 0.0;
  if (z.real() < 0.5) return std::sin(kPi * z) / kPi * gamma(1.0 - z);
  return 1.0 / gamma(z);
}

cplx pochhammer(cplx a, int k) {
  cplx r = 1.0;
  for (int j = 0; j < k; ++j) r *= a + double(j);
  return r;
}

cplx hyp2f1_series(cplx a, cplx b, cplx c, cplx z) {
  if (std::abs(z) >= 1.0) throw numerical_error("hyp2f1: series argument outside the unit disk");
  cplx term = 1.0, sum = 1.0;
  for (int k = 0; k < 100000; ++k) {
    term *= (a + double(k)) * (b + double(k)) / ((c + double(k)) * double(k + 1)) * z;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum) && k > 2) return sum;
    if (term == 0.0) return sum;
  }
  throw numerical_error("hyp2f1: series did not converge within 1e5 terms");
}

cplx digamma(cplx z) {
  int m;
  if (near_nonpositive_integer(z, 1e-14, m)) throw PoleError("digamma: pole", z, 1);
  if (z.real() < 0.5) return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  cplx acc = 0.0;
  while (z.real() < 15.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const cplx w = 1.0 / (z * z);
  return acc + std::log(z) - 0.5 / z -
         w * (1.0 / 12 - w * (1.0 / 120 - w * (1.0 / 252 - w * (1.0 / 240 - w / 132.0))));
}

cplx hyp2f1_log_case(cplx a, cplx b, int m, cplx w) {
  if (std::abs(w) >= 1.0 || w == 0.0) throw numerical_error("hyp2f1: log case needs 0 < |1 - z| < 1");
  const cplx c = a + b + double(m);
  int na = -1, nb = -1;
  const bool ta = near_nonpositive_integer(a, 1e-14, na), tb = near_nonpositive_integer(b, 1e-14, nb);
  if (ta || tb) {
    // terminating: the log terms cancel against the poles of psi
    const int terms = ta && tb ? std::min(na, nb) : (ta ? na : nb);
    const cplx z = 1.0 - w;
    cplx term = 1.0, sum = 1.0;
    for (int j = 0; j < terms; ++j) {
      term *= (a + double(j)) * (b + double(j)) / ((c + double(j)) * double(j + 1)) * z;
      sum += term;
    }
    return sum;
  }
  const int k = std::abs(m);
  // m >= 0 expands around a + m, b + m; m < 0 around a, b
  const cplx a0 = m >= 0 ? a : a - double(k), b0 = m >= 0 ? b : b - double(k);
  const cplx a1 = a0 + double(k), b1 = b0 + double(k);
  const cplx gc = gamma(c);
  cplx finite = 0.0;
  if (k > 0) {
    cplx term = 1.0;
    for (int j = 0; j < k; ++j) {
      finite += term;
      if (j + 1 < k) term *= (a0 + double(j)) * (b0 + double(j)) / (double(j + 1) * double(1 - k + j)) * w;
    }
    finite *= gamma(cplx(k)) * gc;
    finite *= rgamma(a1) * rgamma(b1) * (m >= 0 ? 1.0 : std::pow(w, -double(k)));
  }
  const cplx pre = (k % 2 ? -1.0 : 1.0) * gc * rgamma(a0) * rgamma(b0) * (m >= 0 ? std::pow(w, double(k)) : 1.0);
  if (pre == 0.0) return finite;
  const cplx lw = std::log(w);
  cplx coef = 1.0 / std::tgamma(k + 1.0), sum = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const cplx t = coef * (lw - digamma(double(n + 1)) - digamma(double(n + k + 1)) + digamma(a1 + double(n)) +
                           digamma(b1 + double(n)));
    sum += t;
    if (n > k + 2 && std::abs(t) < 1e-17 * std::abs(sum)) return finite - pre * sum;
    coef *= (a1 + double(n)) * (b1 + double(n)) / (double(n + 1) * double(n + k + 1)) * w;
    if (coef == 0.0) return finite - pre * sum;
  }
  throw numerical_error("hyp2f1: log-case series did not converge within 1e5 terms");
}

const std::pair<Vec, Vec>& gauss_legendre(int order) {
  static std::map<int, std::pair<Vec, Vec>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Mat T = Mat::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    T(k - 1, k) = T(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(T);
  Vec x = es.eigenvalues();
  Vec w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

const std::pair<std::vector<qreal>, std::vector<qreal>>& gauss_legendre_q(int order) {
  static std::map<int, std::pair<std::vector<qreal>, std::vector<qreal>>> cache;
  static std::mutex mu;
  const Vec x0 = gauss_legendre(order).first;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  std::vector<qreal> x(static_cast<std::size_t>(order)), w(x.size());
  for (int i = 0; i < order; ++i) {
    qreal t = x0(i), dp = 1;
    for (int it2 = 0; it2 < 5; ++it2) {
      qreal p0 = 1, p1 = t;
      for (int k = 2; k <= order; ++k) {
        const qreal p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1;
      dp = order * (t * p1 - p0) / (t * t - 1);
      t -= p1 / dp;
    }
    x[static_cast<std::size_t>(i)] = t;
    w[static_cast<std::size_t>(i)] = 2 / ((1 - t * t) * dp * dp);
  }
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

long harmonic_dim(int p, int n) {
  auto binom = [](long a, long b) -> long {
    if (b < 0 || a < b) return 0;
    long r = 1;
    for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  return binom(p + n - 1, n - 1) - binom(p + n - 3, n - 1);
}

}  // namespace kleinian
