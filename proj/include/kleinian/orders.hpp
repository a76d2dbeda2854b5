#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kleinian/gammaops.hpp"

namespace kleinian {

struct LogResidueOptions {
  double radius = 0.05;
  int nodes = 64;
  double tol = 1e-3;  // allowed distance from an integer
};

struct LogResidue {
  int count = 0;
  cplx raw;  // (1/2 pi i) oint tr f^{-1} f'
  double non_integrality = 0.0;
  std::vector<cplx> nodes;  // contour points
  std::vector<cplx> dets;   // det f at the nodes
};

// Order of det f at the center, by the winding of det f around a circle.
// f' comes from spectral differentiation of the contour samples.
LogResidue log_residue_count(const MeromorphicFamily& f, cplx center, const LogResidueOptions& opt = {});

// m with lambda = -rho - m, m >= 0, if lambda lies on that lattice.
std::optional<int> lattice_index(cplx lambda, int n, double tol = 1e-9);

// Degree-m harmonic polynomials on R^{n+1} for lambda = -rho - m, else 0.
long dim_F(cplx lambda, int n);

// Strict variant: config_error unless lambda is a lattice point.
long dim_F_at_lattice(cplx lambda, int n, double tol = 1e-9);

inline int euler_characteristic(int rank) { return 1 - rank; }

struct OrderInputs {
  int n = 2;
  int rank = 1;
  double delta_hat = 0.0;
  // det-counting family in mu = -lambda (Re lambda < 0 regime)
  std::function<CMat(cplx)> counting_family;
  // normalized scattering matrix at 0
  std::function<CMat()> scattering_at_zero;
  // Skip the scattering inputs and take them as pole-free (count 0).
  bool assume_regular_scattering = false;
  LogResidueOptions contour;
  double kernel_tol = 1e-6;
};

struct OrderReport {
  cplx lambda;
  std::string regime;  // "re>0", "zero", "re<0"
  std::optional<int> order;  // poles negative, zeros positive
  int scattering_count = 0;
  long finite_dim_term = 0;  // chi(Y) dim F_lambda
  std::optional<int> point_spectrum_term;  // empty: unavailable
  double non_integrality = 0.0;
  std::string caveat;
  std::vector<cplx> trace_nodes;  // counting contour in mu, when one was run
  std::vector<cplx> trace_dets;
};

OrderReport zeta_order(cplx lambda, const OrderInputs& in);

// mu -> diag(funnel multipliers)^{-1} S_mu (unnormalized), which stays finite
// through the Gamma-factor singularities of the funnels.
std::function<CMat(cplx)> funnel_normalized_scattering(GeometryPtr geo, int basis_size, int max_len,
                                                       const ScatterOptions& opt = {});

std::function<CMat()> normalized_scattering_at_zero(GeometryPtr geo, int basis_size, int max_len,
                                                    const ScatterOptions& opt = {});

struct LadderOrders {
  int order_n = 0;
  int order_up_minus = 0;  // order_{n+1}(lambda - 1/2)
  int order_up_plus = 0;   // order_{n+1}(lambda + 1/2)
  int discrepancy() const { return order_n - (order_up_minus - order_up_plus); }
};

// Integer ladder order_n(l) = order_{n+1}(l - 1/2) - order_{n+1}(l + 1/2).
LadderOrders ladder_orders(cplx lambda, const OrderInputs& lower, const OrderInputs& upper);

struct ScanOptions {
  int grid = 64;          // Chebyshev points per side
  double floor = 1e-200;  // smallest admissible |Z|
  double tol = 1e-3;
};

// Winding number of exp(log_z(s)) around the rectangle with corners lo, hi.
int argument_principle_scan(const std::function<cplx(cplx)>& log_z, cplx lo, cplx hi, const ScanOptions& opt = {});

}  // namespace kleinian
