#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace kleinian;
using testutil::random_element;
using testutil::random_point;
using testutil::random_rotation;

TEST_SUITE("lorentz") {

TEST_CASE("compose identities") {
  std::mt19937_64 rng(1);
  for (int n : {2, 3, 4}) {
    const GroupElement g = random_element(n, rng);
    CHECK((compose(g, GroupElement::identity(n)).matrix() - g.matrix()).norm() == 0.0);
    CHECK((g * g.inverse()).matrix().isIdentity(1e-12));
    CHECK((boost(n, 0.3) * boost(n, 0.9)).matrix().isApprox(boost(n, 1.2).matrix(), 1e-14));
  }
  CHECK_THROWS_AS(compose(boost(2, 1.0), boost(3, 1.0)), Error);
}

TEST_CASE("membership validation on construction") {
  Mat m = boost(2, 1.0).matrix();
  CHECK_NOTHROW(GroupElement{m});
  m(1, 2) += 1e-6;
  CHECK_THROWS_AS(GroupElement{m}, Error);
  CHECK_THROWS_AS(GroupElement(-boost(2, 1.0).matrix()), Error);
}

TEST_CASE("reprojection removes drift") {
  std::mt19937_64 rng(2);
  const GroupElement g = random_element(3, rng);
  Mat p = g.matrix();
  p(1, 1) += 1e-7;
  p(2, 0) -= 1e-7;
  CHECK(lorentz_defect(p) > 1e-9);
  CHECK(lorentz_defect(reproject(p)) < 1e-14);
  CHECK((reproject(p) - g.matrix()).norm() < 1e-6);
}

TEST_CASE("cartan_radial") {
  CHECK(cartan_radial(GroupElement::identity(2)) == 0.0);
  CHECK(cartan_radial(boost(2, 1.7)) == doctest::Approx(1.7).epsilon(1e-14));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 3;
    const GroupElement g = random_element(n, rng, 4.0);
    // hyperboloid oracle: cosh d = -<e0, g e0>
    Vec e0 = Vec::Zero(n + 1);
    e0(0) = 1.0;
    const Vec x = g.matrix() * e0;
    const double oracle = std::acosh(-minkowski_dot(e0, x));
    CHECK(std::abs(cartan_radial(g) - oracle) < 1e-10);
    CHECK(std::abs(cartan_radial(g) - cartan_radial(g.inverse())) < 1e-10);
    const GroupElement h = random_element(n, rng, 4.0);
    CHECK(cartan_radial(g * h) <= cartan_radial(g) + cartan_radial(h) + 1e-9);
  }
}

TEST_CASE("iwasawa") {
  const IwasawaFactors id = iwasawa(GroupElement::identity(3));
  CHECK(id.a_log == 0.0);
  CHECK(id.kappa.matrix().isIdentity(1e-15));
  CHECK(id.n_part.matrix().isIdentity(1e-15));

  std::mt19937_64 rng(4);
  const GroupElement k = random_rotation(3, rng);
  const IwasawaFactors fk = iwasawa(k);
  CHECK(std::abs(fk.a_log) < 1e-14);
  CHECK((fk.kappa.matrix() - k.matrix()).norm() < 1e-13);
  CHECK(fk.n_part.matrix().isIdentity(1e-13));

  for (int i = 0; i < 300; ++i) {
    const int n = 2 + i % 3;
    const GroupElement g = random_element(n, rng, 3.0);
    const IwasawaFactors f = iwasawa(g);
    const Mat rec = f.kappa.matrix() * boost(n, f.a_log).matrix() * f.n_part.matrix();
    CHECK((rec - g.matrix()).norm() < 1e-10 * g.matrix().norm());
    CHECK(f.kappa(0, 0) == 1.0);
    CHECK(f.kappa.defect() < 1e-12);
  }
}

TEST_CASE("iwasawa on long words over generators") {
  // recomposition residual relative to |g| over 10^4 words of length <= 8
  const int n = 3;
  std::vector<GroupElement> gens = {boost(n, 1.5), rotation(n, 1, 2, 1.2) * boost(n, 1.1) *
                                                       rotation(n, 1, 2, -1.2)};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 3), len(1, 8);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    GroupElement g = GroupElement::identity(n);
    const int L = len(rng);
    for (int j = 0; j < L; ++j) {
      const int s = pick(rng);
      g = g * (s < 2 ? gens[s] : gens[s - 2].inverse());
    }
    const IwasawaFactors f = iwasawa(g);
    const Mat rec = f.kappa.matrix() * boost(n, f.a_log).matrix() * f.n_part.matrix();
    worst = std::max(worst, (rec - g.matrix()).norm() / g.matrix().norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("classify") {
  const ElementClassData d = classify(boost(2, 0.8));
  CHECK(d.kind == ElementKind::hyperbolic);
  CHECK(d.length == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(d.angles.empty());

  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const GroupElement h = random_element(2, rng);
    const ElementClassData c = classify(h * boost(2, 1.3) * h.inverse());
    CHECK(c.kind == ElementKind::hyperbolic);
    CHECK(std::abs(c.length - 1.3) < 1e-9);
  }

  const GroupElement lox = boost(3, 2.0) * rotation(3, 2, 3, 0.7);
  const ElementClassData e = classify(lox);
  CHECK(e.length == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(e.angles.size() == 1);
  CHECK(e.angles[0] == doctest::Approx(0.7).epsilon(1e-10));
  const GroupElement h = random_element(3, rng);
  const ElementClassData e2 = classify(h * lox * h.inverse());
  CHECK(std::abs(e2.length - 2.0) < 1e-9);
  CHECK(std::abs(e2.angles[0] - 0.7) < 1e-8);

  CHECK(classify(GroupElement::identity(3)).kind == ElementKind::identity);
  CHECK(classify(rotation(3, 1, 2, 0.5)).kind == ElementKind::elliptic);
  Vec v(2);
  v << 0.4, -0.2;
  CHECK(classify(n_element(v)).kind == ElementKind::parabolic);
}

TEST_CASE("boundary action and cocycle") {
  std::mt19937_64 rng(7);
  const BoundaryPoint b = random_point(3, rng);
  const auto [b1, s1] = boundary_action(GroupElement::identity(3), b);
  CHECK((b1.coords - b.coords).norm() < 1e-15);
  CHECK(s1 == 0.0);

  const double t = 1.4;
  const auto [fp, sf] = boundary_action(boost(2, t), base_boundary_point(2));
  CHECK((fp.coords - base_boundary_point(2).coords).norm() < 1e-14);
  CHECK(sf == doctest::Approx(-t).epsilon(1e-13));

  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 3;
    const GroupElement g = random_element(n, rng), h = random_element(n, rng);
    const BoundaryPoint x = random_point(n, rng);
    // oracle: log a(g^{-1} k_x) straight from the Iwasawa factorization
    const double direct = iwasawa(g.inverse() * rotation_to(x)).a_log;
    CHECK(std::abs(cocycle(g, x) - direct) < 1e-10);
    // the scalar is log a(g^{-1} k_x), so it composes as
    // scalar(gh, x) = scalar(g, x) + scalar(h, g^{-1} x)
    const double lhs = cocycle(g * h, x);
    const double rhs = cocycle(g, x) + cocycle(h, act(g.inverse(), x));
    CHECK(std::abs(lhs - rhs) < 1e-10);
    // and the conformal factor is the chain-rule derivative of the action
    const double lhs2 = std::log(conformal_factor(g * h, x));
    const double rhs2 = std::log(conformal_factor(g, act(h, x))) + std::log(conformal_factor(h, x));
    CHECK(std::abs(lhs2 - rhs2) < 1e-10);
    CHECK(std::abs(std::log(conformal_factor(g.inverse(), x)) + cocycle(g, x)) < 1e-10);
  }
}

TEST_CASE("rotation_to maps the base point") {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 5}) {
    const BoundaryPoint b = random_point(n, rng);
    const GroupElement k = rotation_to(b);
    CHECK(k.matrix().determinant() == doctest::Approx(1.0));
    CHECK((act(k, base_boundary_point(n)).coords - b.coords).norm() < 1e-14);
  }
}

}
