#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

#include "kleinian/harmonic.hpp"
#include "kleinian/special.hpp"

using namespace kleinian;
using namespace testutil;

namespace {

// Band-limited test section with random coefficients.
BoundarySection random_section(int n, cplx weight, int pmax, std::mt19937_64& rng) {
  const HarmonicBasis basis(n, pmax);
  std::normal_distribution<double> nd;
  CVec c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = cplx(nd(rng), nd(rng)) / double(1 + basis.index()[static_cast<std::size_t>(k)].p);
  return section_from_coefficients(n, weight, pmax, c);
}

double max_diff(const BoundarySection& a, const BoundarySection& b, int n, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_point(n, rng).coords;
    worst = std::max(worst, std::abs(a(x) - b(x)));
  }
  return worst;
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("spherical function basics") {
  for (int n : {2, 3, 4}) {
    CHECK(std::abs(spherical_fn(cplx(0.3, 0.2), 0, 0.0, n) - 1.0) < 1e-15);
    CHECK(std::abs(spherical_fn_constant(cplx(-0.7, 1.0), 0, n) - 1.0) < 1e-15);
  }
  CHECK(std::abs(spherical_fn(0.4, 3, 0.0, 2)) == 0.0);
  CHECK_THROWS_AS(spherical_fn(0.4, 0, -1.0, 2), Error);

  // n = 3: Phi_mu(t) = sinh(mu t) / (mu sinh t); t = 8 exercises the connection formula
  for (cplx mu : {cplx(0.3, 0.0), cplx(0.2, 1.5), cplx(-0.6, 0.4)})
    for (double t : {0.05, 1.0, 3.0, 8.0}) {
      const cplx exact = std::sinh(mu * t) / (mu * std::sinh(t));
      CHECK(std::abs(spherical_fn(mu, 0, t, 3) - exact) < 1e-12 * std::abs(exact));
    }
}

TEST_CASE("spherical function radial equation") {
  for (int n : {2, 3})
    for (int p : {0, 2, 5})
      for (cplx mu : {cplx(0.3, 0.0), cplx(0.1, 0.9)}) {
        const double rho = rho_of(n), t = 1.3, h = 1e-3;
        auto f = [&](double s) { return spherical_fn(mu, p, s, n); };
        const cplx d2 = (-f(t + 2 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
        const cplx d1 = (-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12 * h);
        const cplx res = d2 + (n - 1) / std::tanh(t) * d1 - double(p * (p + n - 2)) / std::pow(std::sinh(t), 2) * f(t) -
                         (mu * mu - rho * rho) * f(t);
        CHECK(std::abs(res) < 1e-6 * std::max(1.0, std::abs(f(t))));
      }
}

TEST_CASE("poisson transform against spherical functions") {
  std::mt19937_64 rng(11);
  for (int n : {2, 3}) {
    PoissonOptions opt;
    const GroupElement O = GroupElement::identity(n);
    CHECK(std::abs(poisson(spherical_vector(n, cplx(0.4, 1.0)), O) - 1.0) < 1e-13);
    for (cplx mu : {cplx(0.3, 0.0), cplx(0.3, 0.7), cplx(-0.4, 0.0)})
      for (int p = 0; p <= 8; p += (n == 2 ? 1 : 2))
        for (double t : {0.1, 1.0, 3.0}) {
          const BoundarySection psi = zonal_section(n, mu, p);
          const cplx phi = spherical_fn(mu, p, t, n);
          INFO("n=" << n << " mu=" << mu << " p=" << p << " t=" << t);
          CHECK(std::abs(poisson(psi, boost(n, t), opt) - phi) < 1e-8 * std::abs(phi));
          // f(k a) = psi_p(k b0) Phi(a)
          const GroupElement k = random_rotation(n, rng);
          const double kb = k(1, 1);  // first spatial coordinate of k b0
          CHECK(std::abs(poisson(psi, k * boost(n, t), opt) - zonal(p, n, kb) * phi) < 1e-8 * std::abs(phi));
        }
  }
}

TEST_CASE("spherical functions at half-integer mu") {
  // -2 mu integer: the z -> 1 - z connection is logarithmic; Phi vanishes at mu = -1/2, p > 0
  for (double t : {4.0, 12.0, 30.0}) CHECK(std::abs(spherical_fn(0.5, 0, t, 2) - 1.0) < 1e-13);
  const PoissonOptions opt;
  for (cplx mu : {cplx(0.5, 0.0), cplx(-0.5, 0.0), cplx(0.0, 0.0)})
    for (int p : {1, 4}) {
      const double t = 3.0;
      const cplx phi = spherical_fn(mu, p, t, 2);
      INFO("mu=" << mu << " p=" << p);
      CHECK(std::abs(poisson(zonal_section(2, mu, p), boost(2, t), opt) - phi) < 1e-9 * std::abs(phi) + 1e-15);
      // continuous in mu through the degenerate point
      CHECK(std::abs(spherical_fn(mu + 1e-7, p, t, 2) - phi) < 1e-6 * (std::abs(phi) + 1.0));
    }
}

TEST_CASE("principal series action") {
  std::mt19937_64 rng(5);
  for (int n : {2, 3}) {
    const cplx lam(0.3, -0.8);
    const BoundarySection f = random_section(n, lam, 4, rng);
    const GroupElement g = random_element(n, rng, 1.5);
    CHECK(max_diff(pi_lambda(GroupElement::identity(n), f), f, n, rng) < 1e-14);
    CHECK(max_diff(pi_lambda(g, pi_lambda(g.inverse(), f)), f, n, rng) < 1e-9);
    const GroupElement h = random_element(n, rng, 1.0);
    CHECK(max_diff(pi_lambda(g, pi_lambda(h, f)), pi_lambda(g * h, f), n, rng) < 1e-9);
    const BoundarySection one = spherical_vector(n, lam);
    CHECK(max_diff(pi_lambda(random_rotation(n, rng), one), one, n, rng) < 1e-14);
    // Poisson is G-equivariant
    const GroupElement x = random_element(n, rng, 1.0);
    CHECK(std::abs(poisson(pi_lambda(g, f), g * x) - poisson(f, x)) < 1e-9 * std::abs(poisson(f, x)));
  }
}

TEST_CASE("c-function") {
  for (int n : {2, 3, 4, 5}) {
    const double rho = rho_of(n);
    for (cplx l : {cplx(0.7, 0.0), cplx(0.2, 2.0), cplx(-0.3, 0.5), cplx(1.3, -4.0)})
      CHECK(std::abs(c_function(l, n) * c_function(-l, n) * plancherel(l, n) - 1.0) < 1e-12);
    // simple pole at 0, residue Gamma(2 rho) / Gamma(rho)^2
    const double rc = std::tgamma(2 * rho) / std::pow(std::tgamma(rho), 2);
    CHECK(std::abs(1e-7 * c_function(1e-7, n) - rc) < 1e-6);
    CHECK_THROWS_AS(c_function(0.0, n), PoleError);
  }
  // n = 3 closed form 1 / lambda
  CHECK(std::abs(c_function(cplx(0.4, 0.3), 3) - 1.0 / cplx(0.4, 0.3)) < 1e-15);
  // limit of a^{rho - lambda} Phi_lambda(a)
  for (int n : {2, 3, 4})
    for (cplx l : {cplx(0.8, 0.0), cplx(1.2, 0.5)}) {
      const double t = 25.0;
      const cplx lim = std::exp((rho_of(n) - l) * t) * spherical_fn(l, 0, t, n);
      CHECK(std::abs(lim - c_function(l, n)) < 1e-9 * std::abs(c_function(l, n)));
    }
}

TEST_CASE("knapp-stein spectrum") {
  for (int n : {2, 3, 4}) {
    const double rho = rho_of(n);
    // Beta-integral oracle for the Haar constant
    CHECK(std::abs(knapp_stein_constant(n) - 2.0 * std::tgamma(2 * rho) / std::pow(std::tgamma(rho), 2)) < 1e-12);

    for (cplx l : {cplx(-0.3, 0.0), cplx(-1.7, 2.0), cplx(-0.05, -0.4), cplx(0.0, 1.1), cplx(-2.5, 0.0)}) {
      const KTypeSpectrum j = knapp_stein_spectrum(l, 12, n);
      const KTypeSpectrum closed = normalized_spectrum_closed_form(l, 12, n);
      CHECK(std::abs(j[0] - c_function(-l, n)) < 1e-10 * std::abs(j[0]));
      // closed[p] vanishes identically for p > m at lambda = -rho - m
      const double floor = 1e-12 * std::abs(j[0]);
      for (int p = 0; p <= 12; ++p)
        CHECK(std::abs(j[p] - c_function(-l, n) * closed[p]) < 1e-9 * std::abs(j[p]) + floor);
    }
    // functional equation with independently continued values on the right half plane
    for (cplx l : {cplx(0.3, 0.0), cplx(0.6, 1.5), cplx(1.5, -0.2), cplx(0.0, 0.7)}) {
      const KTypeSpectrum a = knapp_stein_continued(l, 8, n), b = knapp_stein_spectrum(-l, 8, n);
      const KTypeSpectrum s = knapp_stein_spectrum(l, 8, n);
      for (int p = 0; p <= 8; ++p) {
        CHECK(std::abs(a[p] * b[p] * plancherel(l, n) - 1.0) < 1e-9);
        CHECK(std::abs(s[p] - a[p]) < 1e-9 * std::abs(a[p]));
      }
    }
    for (double pole : {0.0, 1.0, 3.0}) CHECK_THROWS_AS(knapp_stein_spectrum(pole, 4, n), PoleError);

    const KTypeSpectrum j0 = normalized_spectrum(0.0, 16, n);
    for (int p = 0; p <= 16; ++p) CHECK(std::abs(j0[p] - 1.0) < 1e-10);
    const KTypeSpectrum jsmall = normalized_spectrum(cplx(1e-4, 0.0), 16, n);
    for (int p = 0; p <= 16; ++p) CHECK(std::abs(jsmall[p] - 1.0) < 1e-2);
    for (cplx l : {cplx(0.3, 0.2), cplx(-0.6, 1.0)}) {
      const KTypeSpectrum a = normalized_spectrum(l, 10, n), b = normalized_spectrum(-l, 10, n);
      const KTypeSpectrum c = normalized_spectrum_closed_form(l, 10, n);
      for (int p = 0; p <= 10; ++p) {
        CHECK(std::abs(a[p] * b[p] - 1.0) < 1e-9);
        CHECK(std::abs(a[p] - c[p]) < 1e-9 * std::abs(c[p]));
      }
    }
  }
}

TEST_CASE("intertwining and normalized identity") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const cplx lam(-0.35, 0.6);
    const int pmax = n == 2 ? 48 : 20;
    const KTypeSpectrum J = knapp_stein_spectrum(lam, pmax, n);
    const BoundarySection f = random_section(n, lam, 3, rng);
    const GroupElement g = random_element(n, rng, 0.4);
    const int order = n == 2 ? 256 : 48;
    const BoundarySection lhs = apply_spectrum(J, pi_lambda(g, f), -lam, order);
    const BoundarySection rhs = pi_lambda(g, apply_spectrum(J, f, -lam));
    double scale = 0.0;
    for (int i = 0; i < 10; ++i) scale = std::max(scale, std::abs(rhs(random_point(n, rng).coords)));
    CHECK(max_diff(lhs, rhs, n, rng) < 1e-6 * scale);

    const BoundarySection h = random_section(n, lam, 10, rng);
    const BoundarySection back =
        apply_spectrum(normalized_spectrum(-lam, 10, n), apply_spectrum(normalized_spectrum(lam, 10, n), h, -lam), lam);
    CHECK(max_diff(back, h, n, rng) < 1e-7);
  }
}

TEST_CASE("poisson transform is an eigenfunction") {
  std::mt19937_64 rng(9);
  for (int n : {2, 3}) {
    const BoundarySection f = random_section(n, cplx(0.25, 0.8), 3, rng);
    const GroupElement x = random_element(n, rng, 1.0);
    CHECK(laplacian_residual(f, x) < 1e-5);
  }
}

}
