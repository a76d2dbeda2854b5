#include "kleinian/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "kleinian/special.hpp"

namespace kleinian {

namespace {

void check_dim(int n) {
  if (n != 2 && n != 3) throw config_error("sphere: only n = 2 and n = 3 are supported");
}

// sqrt((p-m)!/(p+m)!) P_p^m(x) for p = m..p_max, stable upward recurrence.
template <typename T>
std::vector<T> scaled_legendre(int m, int p_max, T x) {
  std::vector<T> out(static_cast<std::size_t>(std::max(p_max - m + 1, 0)), T(0));
  if (p_max < m) return out;
  const T s = std::sqrt(std::max(T(0), T(1) - x * x));
  T pmm = 1;
  for (int i = 1; i <= m; ++i) pmm *= -std::sqrt(T(2 * i - 1) / T(2 * i)) * s;
  out[0] = pmm;
  if (p_max == m) return out;
  out[1] = x * std::sqrt(T(2 * m + 1)) * pmm;
  for (int p = m + 2; p <= p_max; ++p) {
    const T a = x * T(2 * p - 1) / std::sqrt(T(p * p - m * m));
    const T b = std::sqrt(T((p + m - 1) * (p - m - 1)) / T((p - m) * (p + m)));
    out[static_cast<std::size_t>(p - m)] =
        a * out[static_cast<std::size_t>(p - m - 1)] - b * out[static_cast<std::size_t>(p - m - 2)];
  }
  return out;
}

template <typename T>
VectorX<std::complex<T>> basis_values(int n, int p_max, const std::vector<KTypeIndex>& index,
                                      const VectorX<T>& x) {
  VectorX<std::complex<T>> out(static_cast<Eigen::Index>(index.size()));
  if (n == 2) {
    const T th = std::atan2(x(1), x(0));
    for (std::size_t k = 0; k < index.size(); ++k)
      out(static_cast<Eigen::Index>(k)) = std::polar(T(1), T(index[k].q) * th);
    return out;
  }
  const T ph = std::atan2(x(2), x(1));
  std::vector<std::vector<T>> leg;
  for (int m = 0; m <= p_max; ++m) leg.push_back(scaled_legendre<T>(m, p_max, std::clamp(x(0), T(-1), T(1))));
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto [p, q] = index[k];
    const int m = std::abs(q);
    out(static_cast<Eigen::Index>(k)) = std::sqrt(T(2 * p + 1)) *
                                        leg[static_cast<std::size_t>(m)][static_cast<std::size_t>(p - m)] *
                                        std::polar(T(1), T(q) * ph);
  }
  return out;
}

}  // namespace

SphereGrid make_sphere_grid(int n, int order, const Mat* frame) {
  check_dim(n);
  if (order < 1) throw config_error("sphere grid: order must be positive");
  SphereGrid g;
  g.n = n;
  g.order = order;
  if (n == 2) {
    g.points.resize(2, order);
    g.weights = Vec::Constant(order, 1.0 / order);
    for (int i = 0; i < order; ++i) {
      const double th = 2.0 * kPi * i / order;
      g.points(0, i) = std::cos(th);
      g.points(1, i) = std::sin(th);
    }
  } else {
    const auto& [x, w] = gauss_legendre(order);
    const int naz = 2 * order;
    g.points.resize(3, order * naz);
    g.weights.resize(order * naz);
    for (int i = 0; i < order; ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - x(i) * x(i)));
      for (int j = 0; j < naz; ++j) {
        const double ph = 2.0 * kPi * j / naz;
        const int k = i * naz + j;
        g.points(0, k) = x(i);
        g.points(1, k) = s * std::cos(ph);
        g.points(2, k) = s * std::sin(ph);
        g.weights(k) = 0.5 * w(i) / naz;
      }
    }
  }
  if (frame) g.points = (*frame) * g.points;
  return g;
}

HarmonicBasis::HarmonicBasis(int n, int p_max) : n_(n), p_max_(p_max) {
  check_dim(n);
  if (p_max < 0) throw config_error("harmonic basis: p_max must be nonnegative");
  for (int p = 0; p <= p_max; ++p) {
    if (n == 2) {
      index_.push_back({p, p});
      if (p > 0) index_.push_back({p, -p});
    } else {
      for (int q = -p; q <= p; ++q) index_.push_back({p, q});
    }
  }
}

CVec HarmonicBasis::evaluate(const Vec& x) const { return basis_values<double>(n_, p_max_, index_, x); }

BoundarySection section_from_function(int n, cplx weight, std::function<cplx(const Vec&)> f) {
  check_dim(n);
  BoundarySection s;
  s.n = n;
  s.weight = weight;
  s.eval = std::move(f);
  return s;
}

BoundarySection section_from_coefficients(int n, cplx weight, int p_max, CVec coeffs) {
  auto basis = std::make_shared<HarmonicBasis>(n, p_max);
  if (static_cast<std::size_t>(coeffs.size()) != basis->size())
    throw config_error("section: coefficient count does not match the band limit");
  BoundarySection s;
  s.n = n;
  s.weight = weight;
  s.p_max = p_max;
  s.coefficients = coeffs;
  s.eval = [basis, c = coeffs](const Vec& x) -> cplx { return basis->evaluate(x).cwiseProduct(c).sum(); };
  return s;
}

BoundarySection spherical_vector(int n, cplx weight) {
  CVec c = CVec::Zero(1);
  c(0) = 1.0;
  return section_from_coefficients(n, weight, 0, c);
}

BoundarySection zonal_section(int n, cplx weight, int p) {
  const HarmonicBasis basis(n, p);
  CVec c = CVec::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto [pk, q] = basis.index()[k];
    if (pk != p) continue;
    if (n == 2) c(static_cast<Eigen::Index>(k)) = p == 0 ? 1.0 : 0.5;
    else if (q == 0) c(static_cast<Eigen::Index>(k)) = 1.0 / std::sqrt(2.0 * p + 1.0);
  }
  BoundarySection s = section_from_coefficients(n, weight, p, c);
  s.eval = [n, p](const Vec& x) -> cplx { return zonal(p, n, x(0)); };
  s.eval_q = [n, p](const qreal* x) -> qcplx { return {zonal<qreal>(p, n, x[0]), 0}; };
  return s;
}

CVec sample(const BoundarySection& f, const SphereGrid& grid) {
  CVec out(static_cast<Eigen::Index>(grid.size()));
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    out(k) = f(grid.points.col(k));
  });
  return out;
}

namespace {

CVec project_samples(const HarmonicBasis& basis, const SphereGrid& grid, const CVec& samples) {
  CVec c = CVec::Zero(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(grid.size()); ++k)
    c += grid.weights(k) * samples(k) * basis.evaluate(grid.points.col(k)).conjugate();
  return c;
}

}  // namespace

CVec project(const BoundarySection& f, int p_max, int order) {
  const HarmonicBasis basis(f.n, p_max);
  const SphereGrid grid = make_sphere_grid(f.n, order);
  return project_samples(basis, grid, sample(f, grid));
}

BoundarySection section_from_samples(int n, cplx weight, const SphereGrid& grid, const CVec& samples,
                                     int p_max) {
  const HarmonicBasis basis(n, p_max);
  return section_from_coefficients(n, weight, p_max, project_samples(basis, grid, samples));
}

}  // namespace kleinian
