#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "kleinian/lorentz.hpp"
#include "kleinian/quad.hpp"

namespace kleinian {


// Quadrature on S^{n-1} for the unit-mass rotation-invariant measure.
// Columns of `points` are unit vectors; weights sum to 1.
struct SphereGrid {
  int n = 2;
  Mat points;
  Vec weights;
  int order = 0;
  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

// n = 2: `order` equispaced points. n = 3: `order` Gauss-Legendre nodes in
// the polar angle times 2*order azimuthal points. The polar axis is e1, or
// the image of e1 under the rotation `frame` when given.
SphereGrid make_sphere_grid(int n, int order, const Mat* frame = nullptr);

// K-type index. n = 2: Fourier mode m = q (p = |q|). n = 3: degree p, order q.
struct KTypeIndex {
  int p;
  int q;
};

// Orthonormal (unit-mass measure) harmonic basis up to degree p_max.
// n = 2: e^{i m theta}; n = 3: complex spherical harmonics about the e1 axis.
class HarmonicBasis {
 public:
  HarmonicBasis(int n, int p_max);
  int n() const { return n_; }
  int p_max() const { return p_max_; }
  std::size_t size() const { return index_.size(); }
  const std::vector<KTypeIndex>& index() const { return index_; }
  // All basis functions at x.
  CVec evaluate(const Vec& x) const;

 private:
  int n_;
  int p_max_;
  std::vector<KTypeIndex> index_;
};

// A section of V(lambda), carried as a function on the sphere (the volume
// form trivialization); `weight` only enters through the cocycle exponent.
struct BoundarySection {
  cplx weight = 0.0;
  int n = 2;
  std::function<cplx(const Vec&)> eval;
  // Binary128 evaluator (x has n entries), when available. The Poisson
  // quadrature switches to binary128 for such sections, which resolves tiny
  // high K-type components near the origin.
  std::function<qcplx(const qreal*)> eval_q;
  // Harmonic coefficients when the section is band-limited.
  std::optional<CVec> coefficients;
  int p_max = -1;

  cplx operator()(const Vec& x) const { return eval(x); }
};

BoundarySection section_from_function(int n, cplx weight, std::function<cplx(const Vec&)> f);
BoundarySection section_from_coefficients(int n, cplx weight, int p_max, CVec coeffs);
// The K-invariant section 1_lambda.
BoundarySection spherical_vector(int n, cplx weight);
// The M-invariant zonal member psi_p of K-type p, psi_p(b0) = 1.
BoundarySection zonal_section(int n, cplx weight, int p);

// Samples on a grid.
CVec sample(const BoundarySection& f, const SphereGrid& grid);
// Projection onto degrees <= p_max by quadrature; `order` is the grid order.
CVec project(const BoundarySection& f, int p_max, int order);
// Band-limited section from grid samples (projection + synthesis).
BoundarySection section_from_samples(int n, cplx weight, const SphereGrid& grid, const CVec& samples,
                                     int p_max);

}  // namespace kleinian
