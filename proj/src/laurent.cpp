#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "kleinian/gammaops.hpp"

namespace kleinian {

namespace {

bool finite(const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}


struct Contour {
  std::vector<CMat> a;        // a_k, k = lo .. hi
  std::vector<double> scaled;  // |a_k| r^k
  int lo = 0;
};

// Trapezoid Laurent coefficients on |z - center| = r; empty on failure.
std::optional<Contour> contour(const MeromorphicFamily& f, cplx center, double r, int N, std::string& why) {
  std::vector<CMat> vals(static_cast<std::size_t>(N));
  try {
    for (int n = 0; n < N; ++n) {
      vals[static_cast<std::size_t>(n)] = f.eval(center + std::polar(r, 2.0 * kPi * (n + 0.5) / N));
      if (!finite(vals[static_cast<std::size_t>(n)])) {
        why = "non-finite value on the contour";
        return std::nullopt;
      }
    }
  } catch (const PoleError& e) {
    why = e.what();
    return std::nullopt;
  }
  Contour c;
  c.lo = -N / 2;
  for (int k = c.lo; k < N + c.lo; ++k) {
    CMat s = CMat::Zero(vals[0].rows(), vals[0].cols());
    for (int n = 0; n < N; ++n) s += vals[static_cast<std::size_t>(n)] * std::polar(1.0 / N, -2.0 * kPi * k * (n + 0.5) / N);
    c.scaled.push_back(s.norm());
    c.a.push_back(s * std::pow(r, -k));
  }
  const double top = *std::max_element(c.scaled.begin(), c.scaled.end());
  if (top > 0 && std::max(c.scaled.front(), c.scaled.back()) > 1e-6 * top) {
    why = "contour samples alias";
    return std::nullopt;
  }
  return c;
}

}  // namespace

LaurentResult laurent(const MeromorphicFamily& f, cplx center, int k_min, int k_max, const LaurentOptions& opt) {
  if (k_min > k_max) throw config_error("laurent: empty coefficient range");
  const int N = opt.nodes;
  if (N < 8 || k_max - k_min + 1 > N / 2 || k_min < -N / 2 || k_max >= N / 2)
    throw config_error("laurent: too few contour nodes for the coefficient range");
  double r = opt.radius > 0 ? opt.radius : f.radius;
  std::string why;
  for (int attempt = 0; attempt <= opt.max_shrinks; ++attempt, r *= 0.5) {
    std::optional<Contour> c = contour(f, center, r, N, why);
    if (!c) continue;
    for (int move = 0; opt.locate_pole && move < opt.max_moves; ++move) {
      const CMat& am1 = c->a[static_cast<std::size_t>(-1 - c->lo)];
      const CMat& am2 = c->a[static_cast<std::size_t>(-2 - c->lo)];
      const double n1 = am1.squaredNorm();
      if (n1 == 0.0) break;
      const cplx shift = (am1.conjugate().cwiseProduct(am2)).sum() / n1;
      if (std::abs(shift) < 1e-10 * r || std::abs(shift) > 0.5 * r) break;
      std::optional<Contour> moved = contour(f, center + shift, r, N, why);
      if (!moved) break;
      center += shift;
      c = std::move(moved);
    }
    LaurentResult out;
    out.k_min = k_min;
    out.center = center;
    out.radius = r;
    for (int k = k_min; k <= k_max; ++k) out.coeffs.push_back(c->a[static_cast<std::size_t>(k - c->lo)]);
    const double top = *std::max_element(c->scaled.begin(), c->scaled.end());
    for (int j = -c->lo; j >= 1; --j)
      if (c->scaled[static_cast<std::size_t>(-j - c->lo)] > opt.noise_floor * top) {
        out.pole_order = j;
        break;
      }
    return out;
  }
  throw numerical_error("laurent: contour failed after shrinking (" + why + ")");
}

PSResult patterson_sullivan(GeometryPtr geo, const PSOptions& opt) {
  if (geo->trivial) throw numerical_error("patterson-sullivan: no pole detected (trivial group)");
  const int nc = static_cast<int>(geo->circles.size());
  const int basis = opt.basis_size > 0 ? opt.basis_size : nc;
  const int per = modes_per_circle(*geo, basis);
  const int K = opt.fourier_modes;
  CVec one = CVec::Zero(basis);
  for (int j = 0; j < nc; ++j) one(j * per + per / 2) = std::sqrt(geo->circles[static_cast<std::size_t>(j)].length);
  ScatterOptions so = opt.scatter;
  so.delta_hat = opt.delta_hat;
  so.normalized = false;

  MeromorphicFamily fam;
  fam.center = opt.delta_hat;
  fam.radius = opt.radius;
  fam.eval = [&](cplx lam) -> CMat {
    if (lam.real() > opt.delta_hat + 0.25 && 0.5 + lam.real() > 0.3)
      return ext_fourier_matrix(lam, geo, basis, opt.max_len, K, so) * one;
    return ext_continued(lam, geo, basis, opt.max_len, K, so).matrix * one;
  };
  LaurentOptions lo;
  lo.nodes = opt.nodes;
  lo.locate_pole = true;
  const LaurentResult L = laurent(fam, opt.delta_hat, -2, 1, lo);
  if (L.pole_order < 1) throw numerical_error("patterson-sullivan: no pole detected");

  PSResult out;
  out.center = L.center;
  out.pole_order = L.pole_order;
  out.fourier = L[-1].col(0);
  out.total_mass = 2.0 * kPi * out.fourier(K);
  // smoothed indicator of the complement of the disks
  const double sigma = 6.0 / std::max(K, 1);
  cplx outside = 0.0;
  for (int k = -K; k <= K; ++k) {
    cplx hat = k == 0 ? cplx(1.0) : cplx(0.0);
    for (const Disk& d : geo->group.disks) {
      const double c = std::atan2(d.center.coords(1), d.center.coords(0));
      hat -= k == 0 ? cplx(d.radius / kPi) : std::polar(std::sin(k * d.radius) / (kPi * k), -k * c);
    }
    hat *= std::exp(-0.5 * (k * sigma) * (k * sigma));
    outside += 2.0 * kPi * hat * out.fourier(-k + K);
  }
  out.outside_fraction = std::abs(outside) / std::abs(out.total_mass);
  return out;
}

}  // namespace kleinian
