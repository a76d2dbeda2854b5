#pragma once

#include <vector>

#include "kleinian/lorentz.hpp"
#include "kleinian/sphere.hpp"

namespace kleinian {

inline double rho_of(int n) { return 0.5 * (n - 1); }

// Scalars of a K-equivariant operator, one per K-type p = 0..p_max.
struct KTypeSpectrum {
  int p_max = 0;
  std::vector<cplx> values;
  cplx operator[](int p) const { return values.at(static_cast<std::size_t>(p)); }
};

// x -> exp((lambda - rho) cocycle(g, x)) f(g^{-1} x); evaluated lazily.
BoundarySection pi_lambda(const GroupElement& g, const BoundarySection& f);

struct PoissonOptions {
  double tol = 1e-11;   // relative change between doubled orders
  int start_order = 16;
  int max_order = 1 << 16;  // n = 2; n = 3 caps at 1024 polar nodes
};

// (P_lambda f)(g O) by quadrature with order doubling.
cplx poisson(const BoundarySection& f, const GroupElement& g, const PoissonOptions& opt = {});

// Phi_{mu,p}(e^{a_log}), normalized so that Phi_{mu,0}(1) = 1.
cplx spherical_fn(cplx mu, int p, double a_log, int n);
// Gamma(mu+rho+p)/Gamma(mu+rho) * Gamma(rho+1/2)/Gamma(rho+1/2+p)
cplx spherical_fn_constant(cplx mu, int p, int n);

// Harish-Chandra c-function, c(lambda) = lim a^{rho-lambda} Phi_{lambda,0}(a).
cplx c_function(cplx lambda, int n);
// 1 / (c(lambda) c(-lambda)).
cplx plancherel(cplx lambda, int n);

// Scalars of the unnormalized Knapp-Stein operator J^_lambda : V(lambda) -> V(-lambda).
// Re lambda <= 0: radial quadrature (with analytic handling of the endpoint
// singularity); Re lambda > 0: c(lambda) c(-lambda) / j^_p(-lambda).
// Throws PoleError within 1e-10 of N_0.
KTypeSpectrum knapp_stein_spectrum(cplx lambda, int p_max, int n);
// The radial integral continued term by term, valid off N_0 on both half
// planes; independent of the functional equation used above.
KTypeSpectrum knapp_stein_continued(cplx lambda, int p_max, int n);
// J_lambda = J^_lambda / c(-lambda); regular at lambda = 0 where it is the identity.
KTypeSpectrum normalized_spectrum(cplx lambda, int p_max, int n);
// Gamma(rho-lambda) Gamma(p+rho+lambda) / (Gamma(rho+lambda) Gamma(p+rho-lambda)).
KTypeSpectrum normalized_spectrum_closed_form(cplx lambda, int p_max, int n);
// The Haar constant fixed by j^_0(-1) = c(1).
double knapp_stein_constant(int n);

// Multiplies the degree-p coefficients of f by spec[p]; the result carries
// `weight`. `order` is the projection grid order when f is not band-limited.
BoundarySection apply_spectrum(const KTypeSpectrum& spec, const BoundarySection& f, cplx weight,
                               int order = 0);

// max_i |-(d/ds)^2 u(g boost_i(s) O) + (lambda^2 - rho^2) u| with u = P_lambda f,
// fourth-order central differences of step h, relative to |u(g O)|.
double laplacian_residual(const BoundarySection& f, const GroupElement& g, double h = 1e-2);

}  // namespace kleinian
