#pragma once

#include <vector>

#include "kleinian/common.hpp"

namespace kleinian {

constexpr double kMembershipTol = 1e-9;
constexpr int kReprojectEvery = 32;

// diag(-1, 1, ..., 1) of size n+1.
template <typename Scalar = double>
MatrixX<Scalar> minkowski_metric(int n) {
  MatrixX<Scalar> J = MatrixX<Scalar>::Identity(n + 1, n + 1);
  J(0, 0) = Scalar(-1);
  return J;
}

// ||g^T J g - J||_inf
template <typename Derived>
typename Derived::RealScalar lorentz_defect(const Eigen::MatrixBase<Derived>& g) {
  using S = typename Derived::Scalar;
  const int n = static_cast<int>(g.rows()) - 1;
  const MatrixX<S> J = minkowski_metric<S>(n);
  return (g.transpose() * J * g - J).cwiseAbs().maxCoeff();
}

// Defect scaled by |g|_max^2: the rounding floor of g^T J g grows like |g|^2,
// so long words need a relative test.
double relative_defect(const Mat& g);

// <x, y> = -x0 y0 + sum xi yi
template <typename A, typename B>
typename A::Scalar minkowski_dot(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

class GroupElement {
 public:
  GroupElement() = default;
  // Validates membership in SO(1,n)_0 unless check is false.
  explicit GroupElement(Mat m, bool check = true);

  static GroupElement identity(int n);

  const Mat& matrix() const { return m_; }
  int n() const { return static_cast<int>(m_.rows()) - 1; }
  double operator()(int i, int j) const { return m_(i, j); }

  // J g^T J, exact for group elements.
  GroupElement inverse() const;
  double defect() const { return relative_defect(m_); }

 private:
  Mat m_;
};

GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement operator*(const GroupElement& g, const GroupElement& h);

// Pulls a near-Lorentz matrix back onto the group: g <- g (J g^T J g)^{-1/2},
// evaluated by Newton-Schulz steps.
Mat reproject(const Mat& g);

// exp(t H) with H the unit boost generator mixing e_0 and e_axis (axis >= 1).
GroupElement boost(int n, double t, int axis = 1);
// Rotation by theta in the spatial plane (i, j), 1 <= i, j <= n.
GroupElement rotation(int n, int i, int j, double theta);
// Block embedding SO(1,n) -> SO(1,m), m >= n, fixing the extra basis vectors.
GroupElement embed(const GroupElement& g, int m);
// Unipotent element of N fixing the null vector e0 + e1; v has length n-1.
GroupElement n_element(const Vec& v);

double cartan_radial(const GroupElement& g);

struct IwasawaFactors {
  GroupElement kappa;
  double a_log = 0.0;
  GroupElement n_part;
};

IwasawaFactors iwasawa(const GroupElement& g);

enum class ElementKind { identity, elliptic, parabolic, hyperbolic };

const char* to_string(ElementKind k);

struct ElementClassData {
  double length = 0.0;
  // One angle in [0, pi] per conjugate pair of unit eigenvalues of m(g).
  std::vector<double> angles;
  ElementKind kind = ElementKind::identity;
};

ElementClassData classify(const GroupElement& g);

// Phases of the n-1 eigenvalues of m(g): +-angles, plus 0 when n-1 is odd.
std::vector<double> rotation_phases(const ElementClassData& d, int n);

struct BoundaryPoint {
  Vec coords;
  BoundaryPoint() = default;
  explicit BoundaryPoint(Vec x);
  int n() const { return static_cast<int>(coords.size()); }
};

// The base point b0 = e1 of the boundary sphere.
BoundaryPoint base_boundary_point(int n);

// g . b
BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b);
// log a(g^{-1} k_b) = log (g^{-1}(1, b))_0
double cocycle(const GroupElement& g, const BoundaryPoint& b);
// (g . b, log a(g^{-1} k_b))
std::pair<BoundaryPoint, double> boundary_action(const GroupElement& g,
                                                 const BoundaryPoint& b);
// Euclidean derivative norm |dg(b)| of the conformal action, 1 / (g(1, b))_0.
double conformal_factor(const GroupElement& g, const BoundaryPoint& b);

// A rotation k in K with k . b0 = b.
GroupElement rotation_to(const BoundaryPoint& b);

// Geodesic (angular) distance on the sphere.
double sphere_distance(const Vec& x, const Vec& y);

}  // namespace kleinian
