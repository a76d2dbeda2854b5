#include "kleinian/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kleinian {

namespace {

void check_membership(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 3)
    throw precondition_error("group element must be square of size >= 3");
  if (!m.allFinite()) throw precondition_error("group element has non-finite entries");
  const double d = relative_defect(m);
  if (d >= kMembershipTol)
    throw precondition_error("matrix does not preserve the Lorentz form (defect " +
                             std::to_string(d) + ")");
  if (m(0, 0) < 1.0 - kMembershipTol)
    throw precondition_error("matrix is not time-orientation preserving");
  if (std::abs(m.determinant() - 1.0) > 1e-6)
    throw precondition_error("matrix has determinant != 1");
}

}  // namespace

double relative_defect(const Mat& g) {
  const double s = g.cwiseAbs().maxCoeff();
  return lorentz_defect(g) / (s * s);
}

GroupElement::GroupElement(Mat m, bool check) : m_(std::move(m)) {
  if (check) check_membership(m_);
}

GroupElement GroupElement::identity(int n) {
  return GroupElement(Mat::Identity(n + 1, n + 1), false);
}

GroupElement GroupElement::inverse() const {
  Mat inv = m_.transpose();
  inv.row(0) *= -1.0;
  inv.col(0) *= -1.0;
  return GroupElement(std::move(inv), false);
}

Mat reproject(const Mat& g) {
  const int n = static_cast<int>(g.rows()) - 1;
  const Mat J = minkowski_metric(n);
  const Mat I = Mat::Identity(n + 1, n + 1);
  Mat x = g;
  for (int it = 0; it < 6; ++it) {
    const Mat h = J * x.transpose() * J * x;
    if ((h - I).cwiseAbs().maxCoeff() < 1e-15 * x.cwiseAbs().maxCoeff()) break;
    x = x * (3.0 * I - h) * 0.5;
  }
  return x;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  if (g.n() != h.n()) throw precondition_error("compose: dimension mismatch");
  Mat p = g.matrix() * h.matrix();
  if (relative_defect(p) >= kMembershipTol) {
    p = reproject(p);
    if (relative_defect(p) >= kMembershipTol)
      throw numerical_error("compose: membership lost after re-projection");
  }
  return GroupElement(std::move(p), false);
}

GroupElement operator*(const GroupElement& g, const GroupElement& h) { return compose(g, h); }

GroupElement boost(int n, double t, int axis) {
  if (axis < 1 || axis > n) throw precondition_error("boost: axis out of range");
  Mat m = Mat::Identity(n + 1, n + 1);
  m(0, 0) = m(axis, axis) = std::cosh(t);
  m(0, axis) = m(axis, 0) = std::sinh(t);
  return GroupElement(std::move(m), false);
}

GroupElement rotation(int n, int i, int j, double theta) {
  if (i < 1 || j < 1 || i > n || j > n || i == j)
    throw precondition_error("rotation: bad plane");
  Mat m = Mat::Identity(n + 1, n + 1);
  const double c = std::cos(theta), s = std::sin(theta);
  m(i, i) = c;
  m(j, j) = c;
  m(i, j) = -s;
  m(j, i) = s;
  return GroupElement(std::move(m), false);
}

GroupElement embed(const GroupElement& g, int m) {
  if (m < g.n()) throw precondition_error("embed: target dimension too small");
  Mat e = Mat::Identity(m + 1, m + 1);
  e.topLeftCorner(g.n() + 1, g.n() + 1) = g.matrix();
  return GroupElement(std::move(e), false);
}

GroupElement n_element(const Vec& v) {
  const int n = static_cast<int>(v.size()) + 1;
  Mat X = Mat::Zero(n + 1, n + 1);
  for (int j = 2; j <= n; ++j) {
    const double vj = v(j - 2);
    X(0, j) = vj;
    X(1, j) = vj;
    X(j, 0) = vj;
    X(j, 1) = -vj;
  }
  Mat m = Mat::Identity(n + 1, n + 1) + X + 0.5 * X * X;
  return GroupElement(std::move(m), false);
}

double cartan_radial(const GroupElement& g) {
  if (g(0, 0) < 1.0 - kMembershipTol)
    throw precondition_error("cartan_radial: element not in the identity component");
  // asinh of the spatial part of g e0 is accurate near the identity
  return std::asinh(g.matrix().col(0).tail(g.n()).norm());
}

IwasawaFactors iwasawa(const GroupElement& g) {
  const int n = g.n();
  // e = (g xi+)_0. When g01 < 0 the direct sum cancels; the unit-timelike
  // row identity g00^2 - g01^2 - sum g0j^2 = 1 gives it without cancellation.
  const double e = g(0, 1) >= 0.0
                       ? g(0, 0) + g(0, 1)
                       : (1.0 + g.matrix().row(0).tail(n - 1).squaredNorm()) / (g(0, 0) - g(0, 1));
  if (!(e > 1e-300) || !std::isfinite(e))
    throw numerical_error("iwasawa: degenerate A-component");
  IwasawaFactors f;
  f.a_log = std::log(e);
  Vec v(n - 1);
  for (int j = 2; j <= n; ++j) v(j - 2) = g(0, j) / e;
  f.n_part = n_element(v);
  // Columns of kappa from g xi+ = e (1, k e1) and g e_j = (g0j, k e_j) + g0j (0, k e1):
  // avoids the cancellation in g n(-v) a^{-1}.
  const Mat& m = g.matrix();
  Mat kc = Mat::Identity(n + 1, n + 1);
  Vec ke1;
  if (g(0, 1) >= 0.0) {
    ke1 = (m.col(0).tail(n) + m.col(1).tail(n)) / e;
  } else {
    // same vector read off g xi-, which does not cancel in this regime
    ke1 = -(m.col(0).tail(n) - m.col(1).tail(n));
    for (int j = 2; j <= n; ++j) ke1 += 2.0 * v(j - 2) * m.col(j).tail(n);
    ke1 /= (g(0, 0) - g(0, 1));
  }
  kc.col(1).tail(n) = ke1;
  for (int j = 2; j <= n; ++j) kc.col(j).tail(n) = m.col(j).tail(n) - m(0, j) * ke1;
  f.kappa = GroupElement(std::move(kc), false);
  const Mat rec = f.kappa.matrix() * boost(n, f.a_log).matrix() * f.n_part.matrix();
  const double gmax = g.matrix().cwiseAbs().maxCoeff();
  if ((rec - g.matrix()).cwiseAbs().maxCoeff() > 1e-8 * gmax)
    throw numerical_error("iwasawa: ill-conditioned input");
  return f;
}

const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::identity: return "identity";
    case ElementKind::elliptic: return "elliptic";
    case ElementKind::parabolic: return "parabolic";
    case ElementKind::hyperbolic: return "hyperbolic";
  }
  return "?";
}

namespace {

std::vector<double> pair_angles(std::vector<double> args, int count) {
  // args are |arg| of the unit-circle eigenvalues; drop the unpaired +1 if odd
  std::sort(args.begin(), args.end(), std::greater<>());
  if (args.size() % 2 == 1) args.pop_back();
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < args.size(); i += 2) out.push_back(0.5 * (args[i] + args[i + 1]));
  out.resize(static_cast<std::size_t>(count), 0.0);
  return out;
}

}  // namespace

ElementClassData classify(const GroupElement& g) {
  const int n = g.n();
  const int npairs = (n - 1) / 2;
  Eigen::EigenSolver<Mat> es(g.matrix(), false);
  if (es.info() != Eigen::Success) throw numerical_error("classify: eigen solver failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n + 1);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });

  ElementClassData d;
  const double top = std::abs(ev.front());
  auto hyperbolic = [&] {
    d.kind = ElementKind::hyperbolic;
    d.length = std::log(top);
    std::vector<double> args;
    for (int i = 1; i < n; ++i) args.push_back(std::abs(std::arg(ev[i])));
    d.angles = pair_angles(std::move(args), npairs);
    return d;
  };
  if (top - 1.0 > 1e-4) return hyperbolic();

  const Mat I = Mat::Identity(n + 1, n + 1);
  const Mat D = g.matrix() - I;
  const double scale = std::max(1.0, g.matrix().cwiseAbs().maxCoeff());
  if (D.cwiseAbs().maxCoeff() < 1e-12 * scale) {
    d.kind = ElementKind::identity;
    d.angles.assign(static_cast<std::size_t>(npairs), 0.0);
    return d;
  }
  // A Jordan block at eigenvalue 1 (rank drop of D^2 vs D) means parabolic;
  // a Jordan block splits the eigenvalues by ~eps^{1/3}, which the gap test
  // alone would read as a short hyperbolic element.
  auto rank_of = [&](const Mat& A, bool& ambiguous) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i) {
      const double rel = s(i) / scale;
      if (rel > 1e-6) ++r;
      else if (rel > 1e-10) ambiguous = true;
    }
    return r;
  };
  bool ambiguous = false;
  const int r1 = rank_of(D, ambiguous);
  const int r2 = rank_of(D * D, ambiguous);
  if (ambiguous)
    throw numerical_error("classify: near-degenerate element (parabolic/elliptic ambiguity)");
  if (r2 < r1) {
    d.kind = ElementKind::parabolic;
  } else {
    if (top - 1.0 > 1e-8) return hyperbolic();
    d.kind = ElementKind::elliptic;
  }
  std::vector<double> args;
  for (const auto& z : ev) args.push_back(std::abs(std::arg(z)));
  // drop the two eigenvalues belonging to the A-part (closest to 1)
  std::sort(args.begin(), args.end());
  args.erase(args.begin(), args.begin() + 2);
  d.angles = pair_angles(std::move(args), npairs);
  return d;
}

std::vector<double> rotation_phases(const ElementClassData& d, int n) {
  std::vector<double> ph;
  for (double a : d.angles) {
    ph.push_back(a);
    ph.push_back(-a);
  }
  if ((n - 1) % 2 == 1) ph.push_back(0.0);
  return ph;
}

BoundaryPoint::BoundaryPoint(Vec x) : coords(std::move(x)) {
  const double r = coords.norm();
  if (std::abs(r - 1.0) > 1e-9) throw precondition_error("boundary point is not a unit vector");
}

BoundaryPoint base_boundary_point(int n) {
  Vec x = Vec::Zero(n);
  x(0) = 1.0;
  return BoundaryPoint(std::move(x));
}

namespace {

Vec lift(const Vec& b) {
  Vec y(b.size() + 1);
  y(0) = 1.0;
  y.tail(b.size()) = b;
  return y;
}

}  // namespace

BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b) {
  const Vec y = g.matrix() * lift(b.coords);
  BoundaryPoint out;
  out.coords = y.tail(g.n()) / y(0);
  out.coords.normalize();
  return out;
}

double cocycle(const GroupElement& g, const BoundaryPoint& b) {
  // (g^{-1} y)_0 = -<g e0, y> for y = (1, b)
  const Vec& c = g.matrix().col(0);
  const double v = c(0) - c.tail(g.n()).dot(b.coords);
  return std::log(v);
}

std::pair<BoundaryPoint, double> boundary_action(const GroupElement& g, const BoundaryPoint& b) {
  return {act(g, b), cocycle(g, b)};
}

double conformal_factor(const GroupElement& g, const BoundaryPoint& b) {
  const double y0 = g(0, 0) + g.matrix().row(0).tail(g.n()).dot(b.coords);
  return 1.0 / y0;
}

GroupElement rotation_to(const BoundaryPoint& b) {
  const int n = b.n();
  Vec e1 = Vec::Zero(n);
  e1(0) = 1.0;
  const Vec u = e1 - b.coords;
  const double un = u.norm();
  Mat k = Mat::Identity(n, n);
  if (un > 1e-15) {
    const Vec w = u / un;
    k = Mat::Identity(n, n) - 2.0 * w * w.transpose();
    k.col(n - 1) *= -1.0;  // restore det +1, keeps k e1 = b
  }
  Mat m = Mat::Identity(n + 1, n + 1);
  m.bottomRightCorner(n, n) = k;
  return GroupElement(std::move(m), false);
}

double sphere_distance(const Vec& x, const Vec& y) {
  const double chord = (x - y).norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

}  // namespace kleinian
