#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "kleinian/gammaops.hpp"
#include "kleinian/special.hpp"

namespace kleinian {

namespace {

double mdot(const Vec& a, const Vec& b) { return minkowski_dot(a, b); }

Vec lift(const Vec& x) {
  Vec X(x.size() + 1);
  X(0) = 1.0;
  X.tail(x.size()) = x;
  return X;
}

double wrap(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0 ? a + 2.0 * kPi : a;
}

int disk_letter(int k) { return k % 2 == 0 ? k / 2 + 1 : -(k / 2 + 1); }

double step(double t) { return 0.5 * std::erfc(-6.0 * t); }

double chi(const FundamentalArc& a, double u) {
  const double lo = u - a.u_begin, hi = u - a.u_end;
  if (lo < -a.collar_begin || hi > a.collar_end) return 0.0;
  const double up = lo >= a.collar_begin ? 1.0 : step(lo / a.collar_begin);
  const double down = hi <= -a.collar_end ? 0.0 : step(hi / a.collar_end);
  return up - down;
}

int band_limit_for(int n, int basis_size) {
  for (int p = 0; p < 4096; ++p) {
    const int size = n == 2 ? 2 * p + 1 : (p + 1) * (p + 1);
    if (size == basis_size) return p;
    if (size > basis_size) break;
  }
  throw config_error("basis size is not a full harmonic band for the trivial group");
}

int trivial_band(const QuotientSection& f) {
  // grids of order N resolve products of degree < N (n = 2 uses N / 2)
  return f.geometry->n == 2 ? std::max(0, f.nodes_per_circle / 2 - 1) : std::max(0, f.nodes_per_circle - 1);
}

}  // namespace

Vec BoundaryCircle::chart_point(double u) const {
  return std::exp(u) * v_plus + std::exp(-u) * v_minus + (sigma * kappa) * e_perp;
}

double BoundaryCircle::chart_coordinate(const Vec& X) const {
  return 0.5 * std::log(mdot(X, v_minus) / mdot(X, v_plus));
}

SchottkyGroup trivial_group(int n) {
  if (n != 2 && n != 3) throw config_error("trivial group: n must be 2 or 3");
  SchottkyGroup g;
  g.n = n;
  return g;
}

GeometryPtr quotient_geometry(const SchottkyGroup& g) {
  auto geo = std::make_shared<QuotientGeometry>();
  geo->n = g.n;
  geo->group = g;
  if (g.rank() == 0) {
    if (g.n != 2 && g.n != 3) throw config_error("trivial group: n must be 2 or 3");
    geo->trivial = true;
    return geo;
  }
  if (g.n != 2) throw config_error("gammaops: nontrivial groups are supported for n = 2 only");

  struct Gap {
    double begin, end;
    int start_disk, end_disk;
  };
  const int nd = static_cast<int>(g.disks.size());
  std::vector<int> order(static_cast<std::size_t>(nd));
  for (int k = 0; k < nd; ++k) order[static_cast<std::size_t>(k)] = k;
  auto angle = [&](int k) {
    const Vec& c = g.disks[static_cast<std::size_t>(k)].center.coords;
    return wrap(std::atan2(c(1), c(0)));
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return angle(a) < angle(b); });
  std::vector<Gap> gaps;
  for (int i = 0; i < nd; ++i) {
    const int a = order[static_cast<std::size_t>(i)], b = order[static_cast<std::size_t>((i + 1) % nd)];
    const double begin = angle(a) + g.disks[static_cast<std::size_t>(a)].radius;
    double end = angle(b) - g.disks[static_cast<std::size_t>(b)].radius;
    while (end <= begin) end += 2.0 * kPi;
    if (end - begin >= 2.0 * kPi) throw precondition_error("gammaops: overlapping disks");
    gaps.push_back({begin, end, a, b});
  }
  auto gap_starting_at = [&](int disk) {
    for (std::size_t i = 0; i < gaps.size(); ++i)
      if (gaps[i].start_disk == disk) return static_cast<int>(i);
    throw numerical_error("gammaops: gap gluing failed");
  };
  auto point = [](double th) {
    Vec x(2);
    x << std::cos(th), std::sin(th);
    return x;
  };

  std::vector<bool> seen(gaps.size(), false);
  for (std::size_t start = 0; start < gaps.size(); ++start) {
    if (seen[start]) continue;
    BoundaryCircle circle;
    std::vector<int> members;
    Word letters;
    int cur = static_cast<int>(start);
    while (!seen[static_cast<std::size_t>(cur)]) {
      seen[static_cast<std::size_t>(cur)] = true;
      members.push_back(cur);
      const int s = disk_letter(gaps[static_cast<std::size_t>(cur)].end_disk);
      letters.push_back(s);
      cur = gap_starting_at(SchottkyGroup::disk_index(-s));
    }
    if (cur != static_cast<int>(start)) throw numerical_error("gammaops: gap gluing is not a permutation");
    circle.word = letters;
    circle.gamma = evaluate(g, letters);

    Eigen::EigenSolver<Mat> es(circle.gamma.matrix());
    int imax = 0, imin = 0;
    for (int k = 1; k < 3; ++k) {
      if (es.eigenvalues()(k).real() > es.eigenvalues()(imax).real()) imax = k;
      if (es.eigenvalues()(k).real() < es.eigenvalues()(imin).real()) imin = k;
    }
    circle.length = std::log(es.eigenvalues()(imax).real());
    if (!(circle.length > 1e-9)) throw precondition_error("gammaops: boundary holonomy is not hyperbolic");
    Vec vp = es.eigenvectors().col(imax).real(), vm = es.eigenvectors().col(imin).real();
    circle.v_plus = vp / vp(0);
    circle.v_minus = vm / vm(0);
    const Eigen::Vector3d a = circle.v_plus, b = circle.v_minus;
    Vec e = a.cross(b);
    e(0) = -e(0);  // J (a x b) is Minkowski-orthogonal to a and b
    circle.e_perp = e / std::sqrt(mdot(e, e));
    circle.kappa = std::sqrt(-2.0 * mdot(circle.v_plus, circle.v_minus));

    // Arcs in chart coordinates.
    GroupElement h = GroupElement::identity(2);
    Word hw;
    double u_prev_end = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Gap& gp = gaps[static_cast<std::size_t>(members[i])];
      FundamentalArc arc;
      arc.circle = static_cast<int>(geo->circles.size());
      arc.chart_word = hw;
      arc.chart = h;
      arc.theta_begin = gp.begin;
      arc.theta_end = gp.end;
      const Vec Xb = h.matrix() * lift(point(gp.begin)), Xe = h.matrix() * lift(point(gp.end));
      arc.u_begin = circle.chart_coordinate(Xb);
      arc.u_end = circle.chart_coordinate(Xe);
      if (i == 0) {
        // side of the funnel arc: the chart must reproduce the gap start
        circle.sigma = 1.0;
        const Vec N = circle.chart_point(arc.u_begin);
        if ((N.tail(2) / N(0) - Xb.tail(2) / Xb(0)).norm() > 1e-6) circle.sigma = -1.0;
      } else {
        if (std::abs(arc.u_begin - u_prev_end) > 1e-7)
          throw numerical_error("gammaops: chart coordinates do not glue across a disk");
        arc.u_begin = u_prev_end;
      }
      if (!(arc.u_end > arc.u_begin)) throw numerical_error("gammaops: gap has non-increasing chart coordinate");
      u_prev_end = arc.u_end;
      circle.arcs.push_back(static_cast<int>(geo->arcs.size()));
      geo->arcs.push_back(arc);
      h = h * g.letter(letters[i]);
      hw.push_back(letters[i]);
    }
    FundamentalArc& first = geo->arcs[static_cast<std::size_t>(circle.arcs.front())];
    FundamentalArc& last = geo->arcs[static_cast<std::size_t>(circle.arcs.back())];
    if (std::abs(last.u_end - (first.u_begin + circle.length)) > 1e-7)
      throw numerical_error("gammaops: boundary circle does not close up");
    last.u_end = first.u_begin + circle.length;
    const std::size_t k = circle.arcs.size();
    for (std::size_t i = 0; i < k; ++i) {
      FundamentalArc& a = geo->arcs[static_cast<std::size_t>(circle.arcs[i])];
      FundamentalArc& b = geo->arcs[static_cast<std::size_t>(circle.arcs[(i + 1) % k])];
      const double w = 0.1 * std::min(a.u_end - a.u_begin, b.u_end - b.u_begin);
      a.collar_end = w;
      b.collar_begin = w;
    }
    geo->circles.push_back(std::move(circle));
  }
  return geo;
}

int modes_per_circle(const QuotientGeometry& geo, int basis_size) {
  if (basis_size < 1) throw config_error("basis size must be positive");
  if (geo.trivial) return band_limit_for(geo.n, basis_size);
  const int c = static_cast<int>(geo.circles.size());
  if (basis_size % c != 0 || (basis_size / c) % 2 == 0)
    throw config_error("basis size must be an odd multiple of the number of boundary circles (" + std::to_string(c) +
                       ")");
  return basis_size / c;
}

namespace {

// Grid nodes of every arc, values left empty.
std::vector<ArcSamples> arc_nodes(const QuotientGeometry& geo, int N) {
  std::vector<ArcSamples> out;
  if (N < 2) throw config_error("nodes per circle must be at least 2");
  if (geo.trivial) {
    const SphereGrid grid = make_sphere_grid(geo.n, N);
    const double area = geo.n == 2 ? 2.0 * kPi : 4.0 * kPi;
    ArcSamples a;
    a.points = grid.points;
    a.chart_weights = grid.weights * area;
    a.jacobian = Vec::Ones(grid.weights.size());
    a.u = Vec::Zero(grid.weights.size());
    a.core.assign(grid.size(), true);
    out.push_back(std::move(a));
    return out;
  }
  for (const FundamentalArc& arc : geo.arcs) {
    const BoundaryCircle& c = geo.circles[static_cast<std::size_t>(arc.circle)];
    const FundamentalArc& first = geo.arcs[static_cast<std::size_t>(c.arcs.front())];
    const double du = c.length / N;
    const double lo = arc.u_begin - arc.collar_begin, hi = arc.u_end + arc.collar_end;
    std::vector<double> us;
    const long k0 = static_cast<long>(std::floor((lo - first.u_begin) / du - 0.5)) - 1;
    for (long k = k0;; ++k) {
      const double u = first.u_begin + (static_cast<double>(k) + 0.5) * du;
      if (u > hi) break;
      if (u >= lo) us.push_back(u);
    }
    ArcSamples a;
    const auto m = static_cast<Eigen::Index>(us.size());
    a.u.resize(m);
    a.points.resize(2, m);
    a.chart_weights.resize(m);
    a.jacobian.resize(m);
    a.core.resize(us.size());
    const Mat hinv = arc.chart.inverse().matrix();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double u = us[static_cast<std::size_t>(i)];
      const Vec X = hinv * c.chart_point(u);
      a.u(i) = u;
      a.points.col(i) = X.tail(2) / X(0);
      a.jacobian(i) = X(0) / c.kappa;
      a.chart_weights(i) = chi(arc, u) * du;
      a.core[static_cast<std::size_t>(i)] = u >= arc.u_begin && u < arc.u_end;
    }
    out.push_back(std::move(a));
  }
  return out;
}

cplx jac_pow(double jac, cplx e) { return std::exp(e * std::log(jac)); }

}  // namespace

QuotientSection quotient_section(GeometryPtr geo, cplx weight, const CVec& coeffs, int N) {
  QuotientSection f;
  f.weight = weight;
  f.geometry = geo;
  f.nodes_per_circle = N;
  f.arcs = arc_nodes(*geo, N);
  const double rho = rho_of(geo->n);
  if (geo->trivial) {
    const int p = band_limit_for(geo->n, static_cast<int>(coeffs.size()));
    const HarmonicBasis basis(geo->n, p);
    ArcSamples& a = f.arcs[0];
    a.values.resize(a.points.cols());
    for (Eigen::Index i = 0; i < a.points.cols(); ++i) a.values(i) = basis.evaluate(a.points.col(i)).cwiseProduct(coeffs).sum();
    return f;
  }
  const int per = modes_per_circle(*geo, static_cast<int>(coeffs.size()));
  const int M = per / 2;
  for (std::size_t ai = 0; ai < geo->arcs.size(); ++ai) {
    const int j = geo->arcs[ai].circle;
    const BoundaryCircle& c = geo->circles[static_cast<std::size_t>(j)];
    ArcSamples& a = f.arcs[ai];
    a.values.resize(a.u.size());
    for (Eigen::Index i = 0; i < a.u.size(); ++i) {
      cplx F = 0.0;
      for (int m = -M; m <= M; ++m)
        F += coeffs(j * per + m + M) * std::polar(1.0 / std::sqrt(c.length), 2.0 * kPi * m * a.u(i) / c.length);
      a.values(i) = F * jac_pow(a.jacobian(i), rho - weight);
    }
  }
  return f;
}

CVec quotient_coefficients(const QuotientSection& f, int basis_size) {
  const QuotientGeometry& geo = *f.geometry;
  const double rho = rho_of(geo.n);
  if (geo.trivial) {
    const int p = band_limit_for(geo.n, basis_size);
    const HarmonicBasis basis(geo.n, p);
    const ArcSamples& a = f.arcs[0];
    const double area = a.chart_weights.sum();
    CVec c = CVec::Zero(basis_size);
    for (Eigen::Index i = 0; i < a.points.cols(); ++i)
      c += (a.chart_weights(i) / area) * a.values(i) * basis.evaluate(a.points.col(i)).conjugate();
    return c;
  }
  const int per = modes_per_circle(geo, basis_size);
  const int M = per / 2;
  CVec c = CVec::Zero(basis_size);
  for (std::size_t ai = 0; ai < geo.arcs.size(); ++ai) {
    const int j = geo.arcs[ai].circle;
    const BoundaryCircle& circ = geo.circles[static_cast<std::size_t>(j)];
    const ArcSamples& a = f.arcs[ai];
    const double du = circ.length / f.nodes_per_circle;
    for (Eigen::Index i = 0; i < a.u.size(); ++i) {
      if (!a.core[static_cast<std::size_t>(i)]) continue;
      const cplx F = a.values(i) / jac_pow(a.jacobian(i), rho - f.weight);
      for (int m = -M; m <= M; ++m)
        c(j * per + m + M) += du * F * std::polar(1.0 / std::sqrt(circ.length), -2.0 * kPi * m * a.u(i) / circ.length);
    }
  }
  return c;
}

QuotientSection restrict_section(const BoundarySection& h, GeometryPtr geo, int N) {
  if (h.n != geo->n) throw config_error("restriction: dimension mismatch");
  QuotientSection f;
  f.weight = h.weight;
  f.geometry = geo;
  f.nodes_per_circle = N;
  f.arcs = arc_nodes(*geo, N);
  for (ArcSamples& a : f.arcs) {
    a.values.resize(a.points.cols());
    parallel_for(static_cast<std::size_t>(a.points.cols()), [&](std::size_t i) {
      const auto k = static_cast<Eigen::Index>(i);
      a.values(k) = h(a.points.col(k));
    });
  }
  return f;
}

cplx arc_pairing(const QuotientSection& f, const QuotientSection& g) {
  if (f.geometry != g.geometry || f.nodes_per_circle != g.nodes_per_circle)
    throw config_error("pairing: sections live on different grids");
  CompensatedSum<cplx> s;
  for (std::size_t ai = 0; ai < f.arcs.size(); ++ai) {
    const ArcSamples &a = f.arcs[ai], &b = g.arcs[ai];
    for (Eigen::Index i = 0; i < a.values.size(); ++i) s.add(a.chart_weights(i) / a.jacobian(i) * a.values(i) * b.values(i));
  }
  return s.value();
}

namespace {

void check_margin(cplx sum_weight, const OrbitSumOptions& opt, const char* what) {
  // orbit sums of pi^{-mu} converge for Re mu > delta_hat
  if (opt.delta_hat && !(sum_weight.real() > *opt.delta_hat + opt.margin))
    throw precondition_error(std::string(what) + ": convergence margin violated (Re " + std::to_string(sum_weight.real()) +
                             " <= delta_hat + margin)");
}

}  // namespace

PushdownResult pushdown(const BoundarySection& f, GeometryPtr geo, int max_len, int N, const OrbitSumOptions& opt) {
  if (max_len < 0) throw config_error("pushdown: max_len must be nonnegative");
  check_margin(-f.weight, opt, "pushdown");
  PushdownResult out;
  QuotientSection& q = out.section;
  q.weight = f.weight;
  q.geometry = geo;
  q.nodes_per_circle = N;
  q.arcs = arc_nodes(*geo, N);
  const double rho = rho_of(geo->n);
  if (geo->trivial) {
    for (ArcSamples& a : q.arcs) {
      a.values.resize(a.points.cols());
      for (Eigen::Index i = 0; i < a.points.cols(); ++i) a.values(i) = f(a.points.col(i));
    }
    return out;
  }
  std::vector<Mat> elems;
  std::vector<int> level;
  walk_words(geo->group, max_len, [&](const Word& w, const GroupElement& x) {
    elems.push_back(x.matrix());
    level.push_back(static_cast<int>(w.size()));
    return true;
  });
  // pi^w(g^{-1}) f (x) = |dg(x)|^{rho - w} f(g x), summed over the symmetric ball
  std::vector<std::pair<std::size_t, Eigen::Index>> nodes;
  for (std::size_t ai = 0; ai < q.arcs.size(); ++ai) {
    q.arcs[ai].values.resize(q.arcs[ai].points.cols());
    for (Eigen::Index i = 0; i < q.arcs[ai].points.cols(); ++i) nodes.emplace_back(ai, i);
  }
  std::vector<Vec> level_sums(nodes.size(), Vec::Zero(max_len + 1));
  parallel_for(nodes.size(), [&](std::size_t t) {
    const auto [ai, i] = nodes[t];
    const Vec X = lift(q.arcs[ai].points.col(i));
    CompensatedSum<cplx> s;
    for (std::size_t e = 0; e < elems.size(); ++e) {
      const Vec Y = elems[e] * X;
      const cplx term = std::exp((f.weight - rho) * std::log(Y(0))) * f(Vec(Y.tail(2) / Y(0)));
      s.add(term);
      level_sums[t](level[e]) += std::abs(term);
    }
    q.arcs[ai].values(i) = s.value();
  });
  if (max_len >= 2) {
    double last = 0.0, prev = 0.0;
    for (const Vec& l : level_sums) {
      last += l(max_len);
      prev += l(max_len - 1);
    }
    const double r = prev > 0 ? last / prev : 0.0;
    if (r >= 0.95) throw numerical_error("pushdown: orbit sum does not converge at this weight");
    double worst = 0.0;
    for (const Vec& l : level_sums) worst = std::max(worst, l(max_len) * r / (1.0 - r));
    out.tail_bound = worst;
    if (out.tail_bound > opt.tail_tol)
      throw numerical_error("pushdown: tail bound " + std::to_string(out.tail_bound) + " above tolerance");
  }
  return out;
}

BoundarySection ext(const QuotientSection& f, int max_len, const OrbitSumOptions& opt) {
  const GeometryPtr geo = f.geometry;
  check_margin(f.weight, opt, "ext");
  if (geo->trivial) {
    const SphereGrid grid = make_sphere_grid(geo->n, f.nodes_per_circle);
    return section_from_samples(geo->n, f.weight, grid, f.arcs[0].values, trivial_band(f));
  }
  const double rho = rho_of(geo->n);
  const cplx lam = f.weight;
  // chart Fourier data of F_j = value / jac^{rho - lambda} on each circle
  struct Trig {
    int N;
    CVec c;  // modes -N/2 .. N/2 - 1
  };
  std::vector<Trig> trig(geo->circles.size());
  for (std::size_t j = 0; j < geo->circles.size(); ++j) {
    trig[j].N = f.nodes_per_circle;
    trig[j].c = CVec::Zero(f.nodes_per_circle);
  }
  for (std::size_t ai = 0; ai < geo->arcs.size(); ++ai) {
    const int j = geo->arcs[ai].circle;
    const BoundaryCircle& c = geo->circles[static_cast<std::size_t>(j)];
    const ArcSamples& a = f.arcs[ai];
    const int N = f.nodes_per_circle;
    for (Eigen::Index i = 0; i < a.u.size(); ++i) {
      if (!a.core[static_cast<std::size_t>(i)]) continue;
      const cplx F = a.values(i) / jac_pow(a.jacobian(i), rho - lam);
      for (int m = -N / 2; m < N - N / 2; ++m)
        trig[static_cast<std::size_t>(j)].c(m + N / 2) += F * std::polar(1.0 / N, -2.0 * kPi * m * a.u(i) / c.length);
    }
  }
  auto F_at = [trig, geo](int j, double u) {
    const Trig& t = trig[static_cast<std::size_t>(j)];
    const double L = geo->circles[static_cast<std::size_t>(j)].length;
    cplx s = 0.0;
    for (int m = -t.N / 2; m < t.N - t.N / 2; ++m) {
      // the Nyquist mode is split symmetrically
      const double w = (t.N % 2 == 0 && m == -t.N / 2) ? 0.5 : 1.0;
      s += w * t.c(m + t.N / 2) * std::polar(1.0, 2.0 * kPi * m * u / L);
      if (w == 0.5) s += w * t.c(m + t.N / 2) * std::polar(1.0, -2.0 * kPi * m * u / L);
    }
    return s;
  };
  auto eval = [geo, F_at, lam, rho, max_len](const Vec& x) -> cplx {
    const SchottkyGroup& grp = geo->group;
    // reduce x into the fundamental domain
    Vec X = lift(x);
    X /= X(0);
    Word path;
    double log_jac = 0.0;  // log |d(P^{-1})(x)|
    for (int depth = 0; depth <= max_len; ++depth) {
      int hit = 0;
      for (std::size_t k = 0; k < grp.disks.size(); ++k) {
        const Disk& d = grp.disks[k];
        if (sphere_distance(X.tail(2), d.center.coords) < d.radius) {
          hit = disk_letter(static_cast<int>(k));
          break;
        }
      }
      if (hit == 0) break;
      const Vec Y = grp.letter(-hit).matrix() * X;
      log_jac -= std::log(Y(0));
      X = Y / Y(0);
      path.push_back(hit);
    }
    if (static_cast<int>(path.size()) > max_len) return 0.0;
    // candidates g = P and P g_t^{-1}; y = g^{-1} x
    struct Cand {
      Vec Y;
      double log_jac;
    };
    std::vector<Cand> cands{{X, log_jac}};
    for (int i = 1; i <= grp.rank(); ++i)
      for (int t : {i, -i}) {
        if (!path.empty() && -t == -path.back()) continue;  // P g_t^{-1} must stay reduced
        if (static_cast<int>(path.size()) + 1 > max_len) continue;
        const Vec Y = grp.letter(t).matrix() * X;
        cands.push_back({Y / Y(0), log_jac - std::log(Y(0))});
      }
    cplx total = 0.0;
    for (const Cand& cd : cands) {
      for (const FundamentalArc& arc : geo->arcs) {
        const BoundaryCircle& c = geo->circles[static_cast<std::size_t>(arc.circle)];
        const Vec Yc = arc.chart.matrix() * cd.Y;
        if (mdot(Yc, c.e_perp) * c.sigma <= 0.0) continue;  // other side of the funnel
        const double u = c.chart_coordinate(Yc);
        const double w = chi(arc, u);
        if (w == 0.0) continue;
        const Vec back = arc.chart.inverse().matrix() * c.chart_point(u);
        const double jac = back(0) / c.kappa;  // |du/dtheta| at y
        total += std::exp((rho - lam) * (cd.log_jac + std::log(jac))) * w * F_at(arc.circle, u);
      }
    }
    return total;
  };
  return section_from_function(geo->n, lam, eval);
}

}  // namespace kleinian
