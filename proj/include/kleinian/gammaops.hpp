#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "kleinian/harmonic.hpp"
#include "kleinian/schottky.hpp"
#include "kleinian/sphere.hpp"

namespace kleinian {

// One component of Gamma \ Omega for n = 2. The funnel arc is the ccw arc of the
// circle from the repelling to the attracting fixed point of `gamma`; it is
// charted by
//   N(u) = e^u v_plus + e^-u v_minus + sigma kappa e_perp,
// a null vector, so that gamma acts as u -> u + length and |d theta / du| = kappa / N_0(u).
struct BoundaryCircle {
  Word word;
  GroupElement gamma;
  double length = 0.0;
  Vec v_plus, v_minus, e_perp;
  double kappa = 0.0;  // sqrt(-2 <v_plus, v_minus>)
  double sigma = 1.0;
  std::vector<int> arcs;  // in ccw order along the funnel arc

  Vec chart_point(double u) const;
  // u of a null vector on the funnel arc.
  double chart_coordinate(const Vec& X) const;
};

// A gap between consecutive disks. `chart` carries it into the funnel arc of
// its circle, where it occupies [u_begin, u_end].
struct FundamentalArc {
  int circle = 0;
  Word chart_word;
  GroupElement chart;
  double u_begin = 0.0;
  double u_end = 0.0;
  double collar_begin = 0.0;  // partition-of-unity transition half-widths in u
  double collar_end = 0.0;
  double theta_begin = 0.0;  // gap endpoints on the circle, theta_end > theta_begin
  double theta_end = 0.0;
};

struct QuotientGeometry {
  int n = 2;
  SchottkyGroup group;
  bool trivial = false;
  std::vector<BoundaryCircle> circles;
  std::vector<FundamentalArc> arcs;
};

using GeometryPtr = std::shared_ptr<const QuotientGeometry>;

// The group with no generators acting on S^{n-1}.
SchottkyGroup trivial_group(int n);

// Gap gluing for n = 2 Schottky groups; trivial groups in n = 2, 3.
GeometryPtr quotient_geometry(const SchottkyGroup& g);

// Nodes of one fundamental arc. Every circle carries a uniform u-grid; an arc
// owns the grid nodes in [u_begin, u_end) and also sees the ones in its collars.
struct ArcSamples {
  Vec u;
  Mat points;          // n x count
  Vec chart_weights;   // chi(u) du
  Vec jacobian;        // |du / d theta|
  std::vector<bool> core;
  CVec values;         // section values in the angular trivialization
};

// A section of V_B(weight), stored through its Gamma-invariant lift on the arcs.
struct QuotientSection {
  cplx weight;
  GeometryPtr geometry;
  int nodes_per_circle = 0;
  std::vector<ArcSamples> arcs;
};

// Modes per circle for a global basis size (config_error unless it divides
// into an odd count per circle; trivial groups use harmonic band limits).
int modes_per_circle(const QuotientGeometry& geo, int basis_size);

// Basis: per circle j and mode m in [-M, M], e^{2 pi i m u / l_j} / sqrt(l_j) times
// |du/dtheta|^{rho - weight}. Trivial groups use the HarmonicBasis instead.
QuotientSection quotient_section(GeometryPtr geo, cplx weight, const CVec& coeffs, int nodes_per_circle);
CVec quotient_coefficients(const QuotientSection& f, int basis_size);

// Restriction of a Gamma-invariant section to the fundamental arcs.
QuotientSection restrict_section(const BoundarySection& h, GeometryPtr geo, int nodes_per_circle);

struct OrbitSumOptions {
  std::optional<double> delta_hat;
  double margin = 0.05;
  double tail_tol = 1e-6;
};

struct PushdownResult {
  QuotientSection section;
  double tail_bound = 0.0;
};

// sum_{|g| <= max_len} pi^{weight}(g) f sampled on the fundamental arcs.
PushdownResult pushdown(const BoundarySection& f, GeometryPtr geo, int max_len, int nodes_per_circle,
                        const OrbitSumOptions& opt = {});

// sum_{|g| <= max_len} pi^lambda(g)(chi f), evaluated pointwise on Omega.
BoundarySection ext(const QuotientSection& f, int max_len, const OrbitSumOptions& opt = {});

// The discrete pairing sum chi du / |du/dtheta| f g over the fundamental arcs.
cplx arc_pairing(const QuotientSection& f, const QuotientSection& g);

struct ScatterOptions {
  bool normalized = true;
  int nodes_per_circle = 64;
  std::optional<double> delta_hat;  // direct assembly needs Re lambda > delta_hat + margin
  double margin = 0.05;
  double tol = 1e-13;              // component quadrature / compression target
  bool force_direct_quadrature = false;
};

struct ScatteringData {
  cplx lambda;
  CMat matrix;
  bool normalized = true;
  bool continued = false;
  double tail_bound = 0.0;
  std::size_t components = 0;
};

// Matrix of res_{-lambda} J_lambda ext_lambda in the arc-Fourier basis.
ScatteringData scattering(cplx lambda, GeometryPtr geo, int basis_size, int max_len,
                          const ScatterOptions& opt = {});

// Diagonal of the unnormalized scattering matrix of the funnels alone,
// c(-lambda) s(2 pi m / l_j); the harmonic spectrum for trivial groups.
CVec funnel_multipliers(cplx lambda, const QuotientGeometry& geo, int basis_size);

// Fourier coefficients (1/2pi) int ext_lambda(phi_b) e^{-ik theta}, rows k = -K..K,
// one column per basis function; direct orbit sum (n = 2).
CMat ext_fourier_matrix(cplx lambda, GeometryPtr geo, int basis_size, int max_len, int K,
                        const ScatterOptions& opt = {});

struct ExtContinued {
  CMat matrix;               // same layout as ext_fourier_matrix
  double condition = 0.0;    // of S_{-lambda}
};

// ext_lambda = J_{-lambda} ext_{-lambda} S_lambda with S_lambda = S_{-lambda}^{-1}.
ExtContinued ext_continued(cplx lambda, GeometryPtr geo, int basis_size, int max_len, int K,
                           const ScatterOptions& opt = {});

// ---------------------------------------------------------------------------
// Meromorphic families and Laurent coefficients.

struct MeromorphicFamily {
  std::function<CMat(cplx)> eval;
  cplx center;
  double radius = 0.1;  // contour radius used by default
};

struct LaurentOptions {
  double radius = 0.0;  // 0: the family's radius
  int nodes = 64;
  double noise_floor = 1e-8;  // relative to the largest coefficient
  int max_shrinks = 4;
  // Move the contour onto a simple pole near the center before reading off
  // coefficients (a_{-2} / a_{-1} is the offset of a simple pole).
  bool locate_pole = false;
  int max_moves = 4;
};

struct LaurentResult {
  int k_min = 0;
  cplx center;
  std::vector<CMat> coeffs;  // a_k for k = k_min .. k_max
  int pole_order = 0;        // 0 when no negative coefficient is above the floor
  double radius = 0.0;
  const CMat& operator[](int k) const { return coeffs.at(static_cast<std::size_t>(k - k_min)); }
};

LaurentResult laurent(const MeromorphicFamily& f, cplx center, int k_min, int k_max, const LaurentOptions& opt = {});

struct PSOptions {
  int basis_size = 0;  // 0: one mode per circle
  int max_len = 8;
  int fourier_modes = 256;
  double delta_hat = 0.0;
  double radius = 0.1;
  int nodes = 32;
  ScatterOptions scatter;
};

struct PSResult {
  cplx center;
  int pole_order = 0;
  CVec fourier;            // residue coefficients, k = -K..K
  cplx total_mass;
  double outside_fraction = 0.0;  // of the mass, against a smoothed indicator of the gaps
};

// a_{-1} of lambda -> ext_lambda(1) around delta_hat.
PSResult patterson_sullivan(GeometryPtr geo, const PSOptions& opt);

}  // namespace kleinian
