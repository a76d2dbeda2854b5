#include "doctest.h"
#include "test_util.hpp"

#include <map>

#include "kleinian/fixtures.hpp"
#include "kleinian/zeta.hpp"

using namespace kleinian;

namespace {

ConjugacyClass synthetic_class(double l, std::vector<double> angles) {
  ConjugacyClass c;
  c.cyclic_word = {1};
  c.primitive_root = {1};
  c.multiplicity = 1;
  ElementClassData d;
  d.length = l;
  d.angles = std::move(angles);
  d.kind = ElementKind::hyperbolic;
  c.class_data = d;
  return c;
}

// det(1 - x S^k(M)) for a 2x2 matrix M, with S^k(M) built explicitly on
// homogeneous polynomials of degree k.
cplx log_det_sym_power(const Eigen::Matrix2d& M, int k, cplx x) {
  const int dim = k + 1;
  CMat S = CMat::Zero(dim, dim);
  // monomial e_j = u^{k-j} v^j, substitute u -> M00 u + M10 v, v -> M01 u + M11 v
  for (int j = 0; j < dim; ++j) {
    std::vector<double> poly(static_cast<std::size_t>(dim), 0.0);
    poly[0] = 1.0;
    int deg = 0;
    auto mul = [&](double a, double b) {  // multiply by (a u + b v)
      std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
      for (int i = 0; i <= deg; ++i) {
        out[static_cast<std::size_t>(i)] += a * poly[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i + 1)] += b * poly[static_cast<std::size_t>(i)];
      }
      poly = out;
      ++deg;
    };
    for (int i = 0; i < k - j; ++i) mul(M(0, 0), M(1, 0));
    for (int i = 0; i < j; ++i) mul(M(0, 1), M(1, 1));
    for (int i = 0; i < dim; ++i) S(i, j) = poly[static_cast<std::size_t>(i)];
  }
  const CMat A = CMat::Identity(dim, dim) - x * S;
  return std::log(A.determinant());
}

// Poincare-series bisection: the exponent at which successive word-length
// shells have equal mass.
double poincare_bisection(const SchottkyGroup& g, int L) {
  std::map<std::size_t, std::vector<double>> shell;
  walk_words(g, L, [&](const Word& w, const GroupElement& x) {
    shell[w.size()].push_back(cartan_radial(x));
    return true;
  });
  const double rho = 0.5 * (g.n - 1);
  auto mass = [&](double s, std::size_t m) {
    double a = 0.0;
    for (double d : shell[m]) a += std::exp(-(s + rho) * d);
    return a;
  };
  double lo = -rho, hi = 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid, static_cast<std::size_t>(L)) > mass(mid, static_cast<std::size_t>(L - 1)))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

TEST_SUITE("zeta") {

TEST_CASE("euler factor, n = 2") {
  const ConjugacyClass c = synthetic_class(1.3, {});
  const cplx s(0.7, 2.0);
  cplx direct = 0.0;
  for (int k = 0; k <= 30; ++k) direct += std::log(1.0 - std::exp(-(s + 0.5 + double(k)) * 1.3));
  CHECK(std::abs(log_euler_factor(c, s, 30, 2) - direct) < 1e-14);
  CHECK(std::abs(log_euler_factor(c, cplx(60.0, 1.0), 30, 2)) < 1e-30);
  ConjugacyClass power = c;
  power.multiplicity = 2;
  CHECK_THROWS_AS(log_euler_factor(power, s, 5, 2), Error);
}

TEST_CASE("euler factor, n = 3") {
  const cplx s(0.4, -1.1);
  const double l = 0.9;
  cplx direct = 0.0;
  for (int k = 0; k <= 25; ++k) direct += double(k + 1) * std::log(1.0 - std::exp(-(s + 1.0 + double(k)) * l));
  CHECK(std::abs(log_euler_factor(synthetic_class(l, {0.0}), s, 25, 3) - direct) < 1e-13);

  // rotation angle: compare against explicit symmetric powers
  const double th = 0.8;
  Eigen::Matrix2d M;
  M << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  M *= std::exp(-l);
  cplx oracle = 0.0;
  for (int k = 0; k <= 12; ++k) oracle += log_det_sym_power(M, k, std::exp(-(s + 1.0) * l));
  CHECK(std::abs(log_euler_factor(synthetic_class(l, {th}), s, 12, 3) - oracle) < 1e-12);
}

TEST_CASE("cyclic group closed form") {
  const double t = 1.5;
  const SchottkyGroup g = cyclic_group(2, t);
  ZetaParams p;
  p.max_word_len = 6;
  p.max_sym_power = 200;
  for (cplx s : {cplx(0.3, 0.0), cplx(1.0, 5.0), cplx(-0.2, -3.0)}) {
    cplx closed = 0.0;
    for (int k = 0; k < 400; ++k) closed += 2.0 * std::log(1.0 - std::exp(-(s + 0.5 + double(k)) * t));
    const ZetaValue z = zeta_log(g, s, p);
    CHECK(std::abs(z.log_z - closed) < 1e-12);
  }
}

TEST_CASE("schwarz reflection and large s") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  ZetaParams p;
  p.max_word_len = 6;
  const LengthSpectrum spec = length_spectrum(g, 6);
  const cplx s(0.2, 1.7);
  const ZetaValue a = zeta_log(spec, s, p), b = zeta_log(spec, std::conj(s), p);
  CHECK(std::abs(a.log_z - std::conj(b.log_z)) < 1e-15);
  CHECK(std::abs(zeta_log(spec, cplx(20.0, 0.0), p).log_z) < 1e-40);
}

TEST_CASE("direct product equivalence, n = 2") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  ZetaParams p;
  p.max_word_len = 5;
  p.max_sym_power = 40;
  p.tail_tol = 1e-300;  // force K = max_sym_power
  const LengthSpectrum spec = length_spectrum(g, 5);
  const cplx s(-0.1, 0.8);
  cplx prod = 1.0;
  for (auto c : enumerate_conjugacy_classes(g, 5)) {
    if (c.multiplicity != 1) continue;
    const double l = classify(evaluate(g, c.cyclic_word)).length;
    for (int k = 0; k <= 40; ++k) prod *= 1.0 - std::exp(-(s + 0.5 + double(k)) * l);
  }
  const ZetaValue z = zeta_log(spec, s, p);
  CHECK(z.sym_power == 40);
  CHECK(std::abs(std::exp(z.log_z) - prod) < 1e-12 * std::abs(prod));
}

TEST_CASE("truncation self-consistency and monotone tails") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  const LengthSpectrum spec = length_spectrum(g, 10);
  ZetaParams p8;
  p8.max_word_len = 8;
  ZetaParams p10 = p8;
  p10.max_word_len = 10;
  for (cplx s : {cplx(0.0, 0.0), cplx(0.3, 4.0), cplx(-0.2, 1.0)}) {
    const ZetaValue z8 = zeta_log(spec, s, p8), z10 = zeta_log(spec, s, p10);
    CHECK(std::abs(z10.log_z - z8.log_z) <= z8.tail_bound + 1e-15);
    CHECK(z10.word_tail <= z8.word_tail);
  }
  double prev = 1e300;
  for (int K = 0; K < 30; K += 3) {
    ZetaParams pk = p8;
    pk.max_sym_power = K;
    pk.tail_tol = 1e-300;
    const double tb = zeta_log(spec, cplx(0.1, 0.0), pk).tail_bound;
    CHECK(tb <= prev);
    prev = tb;
  }
}

TEST_CASE("convergence margin") {
  const SchottkyGroup g = pants_group(5.0, 1.0);
  ZetaParams p;
  p.max_word_len = 4;
  p.delta_hat = -0.3;
  p.margin = 0.1;
  CHECK_THROWS_AS(zeta_log(g, cplx(-0.25, 0.0), p), Error);
  CHECK_NOTHROW(zeta_log(g, cplx(-0.15, 0.0), p));
}

TEST_CASE("critical exponent estimate") {
  const DeltaEstimate cyc = delta_estimate(cyclic_group(2, 1.5), 30);
  CHECK(std::abs(cyc.delta + 0.5) <= std::max(cyc.uncertainty, 1e-3));

  const SchottkyGroup g = pants_group(5.0, 1.0);
  const DeltaEstimate d = delta_estimate(g, 10);
  const double oracle = poincare_bisection(g, 10);
  CHECK(d.delta < 0.0);
  CHECK(std::abs(d.delta - oracle) < 3.0 * d.uncertainty + 0.01);

  const DeltaEstimate up = delta_estimate(embed_group(g, 3), 10);
  CHECK(std::abs(up.delta - (d.delta - 0.5)) <= d.uncertainty + up.uncertainty + 1e-12);

  // tiny disks: a sparse group sits near -rho
  const SchottkyGroup sparse = pants_group(10.0, 1.0);
  const DeltaEstimate ds = delta_estimate(sparse, 8);
  CHECK(ds.delta < -0.4);
  CHECK(std::abs(ds.delta - poincare_bisection(sparse, 8)) < 3.0 * ds.uncertainty + 0.01);

  CHECK_THROWS_AS(delta_estimate(cyclic_group(2, 1.5), 2), Error);
}

TEST_CASE("embedding ladder") {
  ZetaParams p;
  p.max_word_len = 4;
  p.max_sym_power = 300;
  p.tail_tol = 1e-16;
  // cyclic group: both sides are the same product of 1 - e^{-(s+1+m)t}
  const LadderResult cyc = ladder_check(cyclic_group(2, 1.5), cplx(0.4, 1.0), 60, p);
  CHECK(cyc.discrepancy < 1e-12);

  const SchottkyGroup g = pants_group(5.0, 1.0);
  const LadderResult r = ladder_check(g, cplx(0.1, 2.0), 20, p);
  CHECK(r.discrepancy < 1e-8 + r.tail_bound);
  CHECK(r.tail_bound < 1e-10);

  const LadderResult big = ladder_check(g, cplx(15.0, 0.0), 5, p);
  CHECK(big.discrepancy < 1e-30);
}

}
