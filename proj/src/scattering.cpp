#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/SVD>

#include "kleinian/gammaops.hpp"
#include "kleinian/special.hpp"

namespace kleinian {

namespace {

using V3 = Eigen::Vector3d;

double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}


// ---------------------------------------------------------------------------
// Components of Omega: c C_j with c a minimal representative of Gamma / <gamma_j>.

bool shorter(const Word& a, const Word& b) {
  return a.size() != b.size() ? a.size() < b.size() : word_less(a, b);
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return reduce(w);
}

bool is_coset_rep(const Word& c, const Word& gamma, const Word& gamma_inv) {
  return shorter(c, concat(c, gamma)) && shorter(c, concat(c, gamma_inv));
}

Word coset_rep(Word c, const Word& gamma, const Word& gamma_inv) {
  c = reduce(c);
  for (;;) {
    Word best = c;
    for (const Word* s : {&gamma, &gamma_inv}) {
      Word d = concat(c, *s);
      if (shorter(d, best)) best = d;
    }
    if (best == c) return c;
    c = best;
  }
}

struct Component {
  int circle = 0;
  int level = 0;
  long key = 0;  // prefix code used for clustering
  V3 A, B, C;    // c v_plus, c v_minus, sigma kappa c e_perp
  double v0 = 0.0, jac_peak = 0.0;
  double center = 0.0, half_width = 0.0;
  int own_for = -1;  // arc whose nodes skip this component
};

long prefix_code(const Word& w, int d) {
  long k = static_cast<long>(std::min<std::size_t>(w.size(), static_cast<std::size_t>(d)));
  for (std::size_t i = 0; i < w.size() && i < static_cast<std::size_t>(d); ++i) k = k * 64 + (w[i] + 32);
  return k;
}

void finish_component(Component& c, const BoundaryCircle& circ) {
  const double a = c.A(0), b = c.B(0);
  c.v0 = 0.5 * std::log(b / a);
  const double zmin = 2.0 * std::sqrt(a * b) + c.C(0);
  c.jac_peak = circ.kappa / zmin;
  const V3 pa = c.A / a, pb = c.B / b;
  const double chord = (pa.tail<2>() - pb.tail<2>()).norm();
  if (chord < 1.0) {
    // small arcs: the endpoints are too close for a ccw difference of angles
    const Eigen::Vector2d mid = pa.tail<2>() + pb.tail<2>();
    c.center = std::atan2(mid(1), mid(0));
    c.half_width = std::asin(0.5 * chord);
  } else {
    const double tm = std::atan2(pb(2), pb(1)), tp = std::atan2(pa(2), pa(1));
    double w = std::fmod(tp - tm, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    c.center = tm + 0.5 * w;
    c.half_width = 0.5 * w;
  }
}

struct ComponentSet {
  std::vector<Component> comps;
  std::vector<double> level_mass;  // estimated sum of component masses per level
};

double mass_estimate(double jac_peak, double alpha) { return std::pow(2.0 * jac_peak, alpha) * (2.0 / alpha); }

ComponentSet enumerate_components(const QuotientGeometry& geo, int max_len, double alpha, double prune_tol,
                                  int cluster_depth) {
  const std::size_t nc = geo.circles.size();
  std::vector<Word> gw(nc), gi(nc);
  std::vector<V3> vp(nc), vm(nc), ve(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    gw[j] = geo.circles[j].word;
    gi[j] = inverse(gw[j]);
    vp[j] = geo.circles[j].v_plus;
    vm[j] = geo.circles[j].v_minus;
    ve[j] = geo.circles[j].sigma * geo.circles[j].kappa * geo.circles[j].e_perp;
  }
  // components holding the arcs
  std::map<std::pair<int, Word>, int> own;
  for (std::size_t i = 0; i < geo.arcs.size(); ++i) {
    const int j = geo.arcs[i].circle;
    own[{j, coset_rep(inverse(geo.arcs[i].chart_word), gw[static_cast<std::size_t>(j)],
                      gi[static_cast<std::size_t>(j)])}] = static_cast<int>(i);
  }
  ComponentSet out;
  out.level_mass.assign(static_cast<std::size_t>(max_len) + 1, 0.0);
  walk_words(geo.group, max_len, [&](const Word& w, const GroupElement& x) {
    const Eigen::Matrix3d m = x.matrix();
    if (w.size() >= 2 && mass_estimate(4.0 / m(0, 0), alpha) * 3.0 < prune_tol) return false;
    for (std::size_t j = 0; j < nc; ++j) {
      if (!is_coset_rep(w, gw[j], gi[j])) continue;
      Component c;
      c.circle = static_cast<int>(j);
      c.level = static_cast<int>(w.size());
      c.key = prefix_code(w, cluster_depth);
      c.A = m * vp[j];
      c.B = m * vm[j];
      c.C = m * ve[j];
      finish_component(c, geo.circles[j]);
      if (auto it = own.find({static_cast<int>(j), w}); it != own.end()) c.own_for = it->second;
      out.level_mass[static_cast<std::size_t>(c.level)] += mass_estimate(c.jac_peak, alpha);
      out.comps.push_back(c);
    }
    return true;
  });
  if (static_cast<int>(own.size()) != static_cast<int>(geo.arcs.size()))
    throw numerical_error("gammaops: arcs share a component");
  for (const auto& [k, arc] : own) {
    bool found = false;
    for (const Component& c : out.comps) found = found || c.own_for == arc;
    if (!found) throw config_error("gammaops: max_len too small to reach the arc components");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sources: a set of components collapsed either onto their own quadrature
// nodes (direct) or onto p Chebyshev points of an enclosing arc.

struct Source {
  Mat points;  // 2 x P
  CMat weights;  // P x basis_size
  int own_for = -1;
};

struct Group {
  std::vector<std::size_t> members;
  double center = 0.0, half_width = 0.0, mass = 0.0;
  int own_for = -1;
};

// Returns p > 0 for Chebyshev compression, 0 for direct quadrature.
using Policy = std::function<int(double center, double half_width, double mass)>;

struct QuadSpec {
  cplx lambda;
  int M = 0;
  int per = 0;
  double tol = 1e-13;
  int osc = 0;  // oscillation (Fourier modes) the direct nodes must resolve
};

template <typename Body>
void component_quadrature(const Component& c, const BoundaryCircle& circ, const QuadSpec& q, bool direct, Body&& body) {
  const double alpha = 0.5 + q.lambda.real();
  const double xi = 2.0 * kPi * q.M / circ.length;
  double h = 2.0 * kPi / (xi + 18.0);
  if (direct && q.osc > 0) h = std::min(h, 2.0 * kPi / (xi + 1.5 * q.osc * c.jac_peak + 35.0));
  const double mass = mass_estimate(c.jac_peak, alpha);
  const double V = (std::log(std::max(mass, q.tol) / q.tol) + 4.0) / alpha;
  const long K = static_cast<long>(std::ceil(V / h));
  const cplx expo = -0.5 - q.lambda;
  const double inv_sqrt_len = 1.0 / std::sqrt(circ.length);
  const cplx step = std::polar(1.0, 2.0 * kPi * h / circ.length);
  // shift the grid to the peak; the sum is over an infinite lattice so any
  // offset is admissible
  const double eh = std::exp(h);
  double ep = std::exp(c.v0 - K * h), em = 1.0 / ep;
  cplx mode1 = std::polar(1.0, 2.0 * kPi * (c.v0 - K * h) / circ.length);
  for (long k = -K; k <= K; ++k) {
    const V3 Z = ep * c.A + em * c.B + c.C;
    const double base_log = std::log(Z(0) / circ.kappa);
    const cplx base = h * inv_sqrt_len * std::exp(expo * base_log);
    body(Z, base, mode1);
    ep *= eh;
    em /= eh;
    mode1 *= step;
    if ((k & 63) == 0) {
      // limit drift of the recurrences
      const double v = c.v0 + (k + 1) * h;
      ep = std::exp(v);
      em = std::exp(-v);
      mode1 = std::polar(1.0, 2.0 * kPi * v / circ.length);
    }
  }
}

void cheb_nodes(int p, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(p));
  w.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const double t = (2 * i + 1) * kPi / (2 * p);
    x[static_cast<std::size_t>(i)] = std::cos(t);
    w[static_cast<std::size_t>(i)] = (i % 2 ? -1.0 : 1.0) * std::sin(t);
  }
}

void lagrange(double s, const std::vector<double>& x, const std::vector<double>& w, double* out) {
  const std::size_t p = x.size();
  double den = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double d = s - x[i];
    if (d == 0.0) {
      for (std::size_t k = 0; k < p; ++k) out[k] = k == i ? 1.0 : 0.0;
      return;
    }
    out[i] = w[i] / d;
    den += out[i];
  }
  for (std::size_t i = 0; i < p; ++i) out[i] /= den;
}

Source build_source(const Group& g, const std::vector<Component>& comps, const QuotientGeometry& geo, const QuadSpec& q,
                    int p) {
  Source s;
  s.own_for = g.own_for;
  const int B = q.per * static_cast<int>(geo.circles.size());
  auto add_modes = [&](CVec& row_out, int circle, const cplx& base, const cplx& mode1) {
    // e^{2 pi i m v / l}, m = -M..M
    cplx up = 1.0, down = 1.0;
    const cplx inv = std::conj(mode1);
    const int off = circle * q.per + q.M;
    row_out(off) += base;
    for (int m = 1; m <= q.M; ++m) {
      up *= mode1;
      down *= inv;
      row_out(off + m) += base * up;
      row_out(off - m) += base * down;
    }
  };
  if (p == 0) {
    std::vector<Eigen::Vector2d> pts;
    std::vector<CVec> rows;
    for (std::size_t idx : g.members) {
      const Component& c = comps[idx];
      const BoundaryCircle& circ = geo.circles[static_cast<std::size_t>(c.circle)];
      component_quadrature(c, circ, q, true, [&](const V3& Z, const cplx& base, const cplx& mode1) {
        pts.emplace_back(Z(1) / Z(0), Z(2) / Z(0));
        CVec r = CVec::Zero(B);
        add_modes(r, c.circle, base, mode1);
        rows.push_back(std::move(r));
      });
    }
    s.points.resize(2, static_cast<Eigen::Index>(pts.size()));
    s.weights.resize(static_cast<Eigen::Index>(pts.size()), B);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s.points.col(static_cast<Eigen::Index>(i)) = pts[i];
      s.weights.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return s;
  }
  std::vector<double> x, w;
  cheb_nodes(p, x, w);
  s.points.resize(2, p);
  for (int i = 0; i < p; ++i) {
    const double th = g.center + g.half_width * x[static_cast<std::size_t>(i)];
    s.points.col(i) << std::cos(th), std::sin(th);
  }
  s.weights = CMat::Zero(p, B);
  std::vector<double> L(static_cast<std::size_t>(p));
  CVec modes(B);
  for (std::size_t idx : g.members) {
    const Component& c = comps[idx];
    const BoundaryCircle& circ = geo.circles[static_cast<std::size_t>(c.circle)];
    CMat local = CMat::Zero(p, q.per);
    component_quadrature(c, circ, q, false, [&](const V3& Z, const cplx& base, const cplx& mode1) {
      const double th = std::atan2(Z(2), Z(1));
      const double sv = std::clamp(wrap_pi(th - g.center) / g.half_width, -1.0, 1.0);
      lagrange(sv, x, w, L.data());
      modes.setZero();
      add_modes(modes, 0, base, mode1);
      for (int i = 0; i < p; ++i)
        if (L[static_cast<std::size_t>(i)] != 0.0) local.row(i) += L[static_cast<std::size_t>(i)] * modes.head(q.per).transpose();
    });
    s.weights.middleCols(c.circle * q.per, q.per) += local;
  }
  return s;
}

// Groups components by prefix; each group is compressed when the policy allows,
// otherwise split into single components.
std::vector<Source> build_sources(const ComponentSet& set, const QuotientGeometry& geo, const QuadSpec& q,
                                  const Policy& policy) {
  const double alpha = 0.5 + q.lambda.real();
  std::vector<Group> groups;
  std::map<long, std::size_t> by_key;
  for (std::size_t i = 0; i < set.comps.size(); ++i) {
    const Component& c = set.comps[i];
    const double m = mass_estimate(c.jac_peak, alpha);
    if (c.own_for >= 0) {
      Group g;
      g.members = {i};
      g.center = c.center;
      g.half_width = c.half_width;
      g.mass = m;
      g.own_for = c.own_for;
      groups.push_back(g);
      continue;
    }
    auto [it, fresh] = by_key.try_emplace(c.key, groups.size());
    if (fresh) {
      Group g;
      g.center = c.center;
      groups.push_back(g);
    }
    Group& g = groups[it->second];
    g.members.push_back(i);
    g.mass += m;
  }
  // hulls, relative to the first member's center
  for (Group& g : groups) {
    if (g.own_for >= 0) continue;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i : g.members) {
      const Component& c = set.comps[i];
      const double off = wrap_pi(c.center - g.center);
      const double a = off - c.half_width, b = off + c.half_width;
      lo = first ? a : std::min(lo, a);
      hi = first ? b : std::max(hi, b);
      first = false;
    }
    g.center += 0.5 * (lo + hi);
    g.half_width = 0.5 * (hi - lo);
  }
  // policy; failed clusters are split
  std::vector<std::pair<Group, int>> plan;
  for (const Group& g : groups) {
    const int p = g.half_width < 0.5 * kPi ? policy(g.center, g.half_width, g.mass) : 0;
    if (p > 0 || g.members.size() == 1) {
      plan.emplace_back(g, p);
      continue;
    }
    for (std::size_t i : g.members) {
      const Component& c = set.comps[i];
      Group s;
      s.members = {i};
      s.center = c.center;
      s.half_width = c.half_width;
      s.mass = mass_estimate(c.jac_peak, alpha);
      plan.emplace_back(s, c.half_width < 0.5 * kPi ? policy(s.center, s.half_width, s.mass) : 0);
    }
  }
  std::vector<Source> out(plan.size());
  parallel_for(plan.size(), [&](std::size_t i) { out[i] = build_source(plan[i].first, set.comps, geo, q, plan[i].second); });
  return out;
}

int bernstein_order(double a, double mass, double tol) {
  // a = (half_width + distance) / half_width, the real singularity in the s variable
  if (a <= 2.5) return 0;
  const double rho = a + std::sqrt(a * a - 1.0);
  const int p = static_cast<int>(std::ceil(std::log(std::max(mass, tol) / tol) / std::log(rho))) + 1;
  return p > 48 ? 0 : std::max(1, p);
}

int fourier_order(int K, double half_width, double mass, double tol) {
  const double z = 0.5 * K * half_width;
  double term = 2.0 * mass;
  for (int p = 1; p <= 48; ++p) {
    term *= z / p;
    if (term < tol) return p;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct Rows {
  std::vector<Eigen::Vector2d> x;
  std::vector<double> jac, u;
  std::vector<int> arc, circle;
};

Rows core_rows(const QuotientGeometry& geo, int N) {
  // nodes u_1 + (k + 1/2) l / N of each circle, located on their arc
  Rows r;
  for (std::size_t j = 0; j < geo.circles.size(); ++j) {
    const BoundaryCircle& c = geo.circles[j];
    const double u1 = geo.arcs[static_cast<std::size_t>(c.arcs.front())].u_begin;
    for (int k = 0; k < N; ++k) {
      const double u = u1 + (k + 0.5) * c.length / N;
      int ai = c.arcs.back();
      for (int a : c.arcs)
        if (u < geo.arcs[static_cast<std::size_t>(a)].u_end) {
          ai = a;
          break;
        }
      const Vec X = geo.arcs[static_cast<std::size_t>(ai)].chart.inverse().matrix() * c.chart_point(u);
      r.x.emplace_back(X(1) / X(0), X(2) / X(0));
      r.jac.push_back(X(0) / c.kappa);
      r.u.push_back(u);
      r.arc.push_back(ai);
      r.circle.push_back(static_cast<int>(j));
    }
  }
  return r;
}

double angular_gap(const Eigen::Vector2d& x, double center, double half_width) {
  return std::max(0.0, std::abs(wrap_pi(std::atan2(x(1), x(0)) - center)) - half_width);
}

cplx self_multiplier(cplx lam, double xi) {
  // normalized convolution multiplier of (1/2pi)|sinh((u-v)/2)|^{-2 lambda - 1}
  const cplx a = 2.0 * lgamma(0.5 - lam);
  const cplx i(0.0, xi);
  return (std::exp(a + lgamma(0.5 + lam + i) - lgamma(0.5 - lam + i)) +
          std::exp(a + lgamma(0.5 + lam - i) - lgamma(0.5 - lam - i))) /
         (2.0 * kPi);
}

bool direct_region(cplx lambda, const std::optional<double>& delta_hat, double margin) {
  if (0.5 + lambda.real() <= 0.02) return false;
  return delta_hat ? lambda.real() > *delta_hat + margin : lambda.real() >= 0.0;
}

double tail_from_levels(const std::vector<double>& level_mass) {
  const std::size_t L = level_mass.size() - 1;
  if (L < 2 || level_mass[L - 1] <= 0.0) return 0.0;
  const double r = level_mass[L] / level_mass[L - 1];
  if (r >= 0.95) throw numerical_error("gammaops: orbit sum does not converge at this weight");
  return level_mass[L] * r / (1.0 - r);
}

void check_basis(const QuotientGeometry& geo, int basis_size, int& per, int& M) {
  per = modes_per_circle(geo, basis_size);
  M = per / 2;
}

ScatteringData direct_scattering(cplx lambda, GeometryPtr geo, int basis_size, int max_len, const ScatterOptions& opt) {
  int per = 0, M = 0;
  check_basis(*geo, basis_size, per, M);
  const double alpha = 0.5 + lambda.real();
  const int N = opt.nodes_per_circle;
  const Rows rows = core_rows(*geo, N);
  const ComponentSet set = enumerate_components(*geo, max_len, alpha, opt.tol * 1e-3, 2);
  QuadSpec q{lambda, M, per, opt.tol, 0};
  const Policy policy = [&](double center, double hw, double mass) {
    if (opt.force_direct_quadrature) return 0;
    double d = 1e300;
    for (const auto& x : rows.x) d = std::min(d, angular_gap(x, center, hw));
    return bernstein_order((hw + d) / hw, mass, opt.tol);
  };
  const std::vector<Source> sources = build_sources(set, *geo, q, policy);


  // G(row, col) = sum over sources of the chart-form kernel against weights
  const std::size_t R = rows.x.size();
  CMat G = CMat::Zero(static_cast<Eigen::Index>(R), basis_size);
  const cplx expo = -0.5 - lambda;
  parallel_for(R, [&](std::size_t r) {
    const Eigen::Vector2d& x = rows.x[r];
    const cplx pre = std::exp(expo * std::log(0.5 * rows.jac[r])) / (2.0 * kPi);
    CVec acc = CVec::Zero(basis_size);
    for (const Source& s : sources) {
      if (s.own_for == rows.arc[r]) continue;
      for (Eigen::Index k = 0; k < s.points.cols(); ++k) {
        const double t = std::max(1.0 - x.dot(s.points.col(k)), 1e-300);
        acc += std::exp(expo * std::log(t)) * s.weights.row(k).transpose();
      }
    }
    G.row(static_cast<Eigen::Index>(r)) = pre * acc.transpose();
  });

  ScatteringData out;
  out.lambda = lambda;
  out.normalized = opt.normalized;
  out.components = set.comps.size();
  // 1 / c(-lambda), which vanishes at the poles of c(-lambda)
  cplx inv_cm = 1.0;
  if (opt.normalized) {
    try {
      inv_cm = 1.0 / c_function(-lambda, 2);
    } catch (const PoleError&) {
      inv_cm = 0.0;
    }
  }
  out.matrix = CMat::Zero(basis_size, basis_size);
  for (std::size_t r = 0; r < R; ++r) {
    const int j = rows.circle[r];
    const double len = geo->circles[static_cast<std::size_t>(j)].length;
    for (int m = -M; m <= M; ++m) {
      const cplx e = std::polar(len / N / std::sqrt(len), -2.0 * kPi * m * rows.u[r] / len);
      out.matrix.row(j * per + m + M) += e * G.row(static_cast<Eigen::Index>(r)) * inv_cm;
    }
  }
  for (std::size_t j = 0; j < geo->circles.size(); ++j) {
    const double len = geo->circles[j].length;
    for (int m = -M; m <= M; ++m) {
      const auto k = static_cast<Eigen::Index>(j) * per + m + M;
      out.matrix(k, k) += self_multiplier(lambda, 2.0 * kPi * m / len) * (opt.normalized ? cplx(1.0) : c_function(-lambda, 2));
    }
  }
  out.tail_bound = tail_from_levels(set.level_mass);
  return out;
}

ScatteringData trivial_scattering(cplx lambda, const QuotientGeometry& geo, int basis_size, bool normalized) {
  const int p = modes_per_circle(geo, basis_size);
  const KTypeSpectrum spec = normalized ? normalized_spectrum(lambda, p, geo.n) : knapp_stein_spectrum(lambda, p, geo.n);
  const HarmonicBasis basis(geo.n, p);
  ScatteringData out;
  out.lambda = lambda;
  out.normalized = normalized;
  out.matrix = CMat::Zero(basis_size, basis_size);
  for (std::size_t k = 0; k < basis.size(); ++k)
    out.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = spec[basis.index()[k].p];
  return out;
}

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const Vec& s = svd.singularValues();
  return s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : 1e300;
}

}  // namespace

ScatteringData scattering(cplx lambda, GeometryPtr geo, int basis_size, int max_len, const ScatterOptions& opt) {
  if (geo->trivial) return trivial_scattering(lambda, *geo, basis_size, opt.normalized);
  if (direct_region(lambda, opt.delta_hat, opt.margin)) return direct_scattering(lambda, geo, basis_size, max_len, opt);
  if (!direct_region(-lambda, opt.delta_hat, opt.margin))
    throw precondition_error("scattering: neither lambda nor -lambda lies in the convergent region");
  ScatteringData mirror = direct_scattering(-lambda, geo, basis_size, max_len, opt);
  const double cond = condition_number(mirror.matrix);
  if (cond > 1e12) throw PoleError("scattering: near a scattering pole", lambda, 1);
  ScatteringData out = mirror;
  out.lambda = lambda;
  out.continued = true;
  out.matrix = mirror.matrix.partialPivLu().inverse();
  if (!opt.normalized) out.matrix *= c_function(lambda, 2) * c_function(-lambda, 2);
  return out;
}

CVec funnel_multipliers(cplx lambda, const QuotientGeometry& geo, int basis_size) {
  if (geo.trivial) {
    const int p = modes_per_circle(geo, basis_size);
    const KTypeSpectrum spec = knapp_stein_spectrum(lambda, p, geo.n);
    const HarmonicBasis basis(geo.n, p);
    CVec d(basis_size);
    for (std::size_t k = 0; k < basis.size(); ++k) d(static_cast<Eigen::Index>(k)) = spec[basis.index()[k].p];
    return d;
  }
  int per = 0, M = 0;
  check_basis(geo, basis_size, per, M);
  const cplx cm = c_function(-lambda, 2);
  CVec d(basis_size);
  for (std::size_t j = 0; j < geo.circles.size(); ++j)
    for (int m = -M; m <= M; ++m)
      d(static_cast<Eigen::Index>(j) * per + m + M) = cm * self_multiplier(lambda, 2.0 * kPi * m / geo.circles[j].length);
  return d;
}

CMat ext_fourier_matrix(cplx lambda, GeometryPtr geo, int basis_size, int max_len, int K, const ScatterOptions& opt) {
  if (geo->trivial) throw config_error("ext_fourier_matrix: trivial groups use the harmonic basis directly");
  if (K < 0) throw config_error("ext_fourier_matrix: K must be nonnegative");
  if (!direct_region(lambda, opt.delta_hat, opt.margin))
    throw precondition_error("ext_fourier_matrix: convergence margin violated");
  int per = 0, M = 0;
  check_basis(*geo, basis_size, per, M);
  const ComponentSet set = enumerate_components(*geo, max_len, 0.5 + lambda.real(), opt.tol * 1e-3, 2);
  // arcs skip nothing here
  ComponentSet all = set;
  for (Component& c : all.comps) c.own_for = -1;
  QuadSpec q{lambda, M, per, opt.tol, K};
  const Policy policy = [&](double, double hw, double mass) {
    return opt.force_direct_quadrature ? 0 : fourier_order(K, hw, mass, opt.tol);
  };
  const std::vector<Source> sources = build_sources(all, *geo, q, policy);
  const Eigen::Index rows = 2 * K + 1;
  // rows in parallel, each a fixed k
  CMat F = CMat::Zero(rows, basis_size);
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t r) {
    const int k = static_cast<int>(r) - K;
    CVec acc = CVec::Zero(basis_size);
    for (const Source& s : sources)
      for (Eigen::Index i = 0; i < s.points.cols(); ++i) {
        const double th = std::atan2(s.points(1, i), s.points(0, i));
        acc += std::polar(1.0 / (2.0 * kPi), -k * th) * s.weights.row(i).transpose();
      }
    F.row(static_cast<Eigen::Index>(r)) = acc.transpose();
  });
  return F;
}

ExtContinued ext_continued(cplx lambda, GeometryPtr geo, int basis_size, int max_len, int K, const ScatterOptions& opt) {
  ScatterOptions o = opt;
  o.normalized = false;
  const ScatteringData s = direct_scattering(-lambda, geo, basis_size, max_len, o);
  const CMat E = ext_fourier_matrix(-lambda, geo, basis_size, max_len, K, o);
  // n = 2 Gamma-ratio form; the radial quadrature is slow for K in the hundreds
  const KTypeSpectrum jn = normalized_spectrum_closed_form(-lambda, K, 2);
  const cplx cm = c_function(lambda, 2);
  ExtContinued out;
  out.condition = condition_number(s.matrix);
  if (out.condition > 1e12) throw PoleError("ext_continued: near a scattering pole", lambda, 1);
  CMat JE = E;
  for (int k = -K; k <= K; ++k) JE.row(k + K) *= cm * jn[std::abs(k)];
  out.matrix = JE * s.matrix.partialPivLu().inverse();
  return out;
}

}  // namespace kleinian
