#include "kleinian/orders.hpp"

#include <algorithm>
#include <cmath>

#include "kleinian/special.hpp"

namespace kleinian {

namespace {


void round_count(cplx raw, double tol, int& count, double& off, const char* who) {
  count = static_cast<int>(std::lround(raw.real()));
  off = std::max(std::abs(raw.real() - count), std::abs(raw.imag()));
  if (!std::isfinite(off) || off > tol)
    throw numerical_error(std::string(who) + ": count is not an integer (contour too close to a singularity)");
}

// Chebyshev coefficients of values at x_j = cos(pi j / N), j = 0..N.
CVec cheb_coeffs(const CVec& f) {
  const Eigen::Index N = f.size() - 1;
  CVec a = CVec::Zero(N + 1);
  for (Eigen::Index k = 0; k <= N; ++k) {
    cplx s = 0.0;
    for (Eigen::Index j = 0; j <= N; ++j) {
      const double w = (j == 0 || j == N) ? 0.5 : 1.0;
      s += w * f(j) * std::cos(kPi * double(j * k) / double(N));
    }
    a(k) = s * (2.0 / double(N));
  }
  a(0) *= 0.5;
  a(N) *= 0.5;
  return a;
}

CVec cheb_derivative_values(const CVec& f) {
  const Eigen::Index N = f.size() - 1;
  const CVec a = cheb_coeffs(f);
  CVec b = CVec::Zero(N + 2);
  for (Eigen::Index k = N; k >= 1; --k) b(k - 1) = b(k + 1) + 2.0 * double(k) * a(k);
  b(0) *= 0.5;
  CVec d(N + 1);
  for (Eigen::Index j = 0; j <= N; ++j) {
    cplx s = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) s += b(k) * std::cos(kPi * double(j * k) / double(N));
    d(j) = s;
  }
  return d;
}

// Clenshaw-Curtis: int_{-1}^{1} of the interpolant.
cplx cheb_integral(const CVec& f) {
  const CVec a = cheb_coeffs(f);
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); k += 2) s += a(k) * (2.0 / (1.0 - double(k * k)));
  return s;
}

}  // namespace

LogResidue log_residue_count(const MeromorphicFamily& f, cplx center, const LogResidueOptions& opt) {
  const int N = opt.nodes;
  if (N < 8 || opt.radius <= 0.0) throw config_error("log_residue_count: need >= 8 nodes and a positive radius");
  std::vector<CMat> vals(static_cast<std::size_t>(N));
  parallel_for(vals.size(), [&](std::size_t n) {
    vals[n] = f.eval(center + std::polar(opt.radius, 2.0 * kPi * double(n) / N));
  });
  const Eigen::Index d = vals[0].rows();
  if (d != vals[0].cols()) throw config_error("log_residue_count: family must be square");
  // d/dtheta through the DFT, Nyquist mode dropped
  std::vector<CMat> dvals(vals.size(), CMat::Zero(d, d));
  for (int k = -(N - 1) / 2; k <= (N - 1) / 2; ++k) {
    if (k == 0) continue;
    CMat a = CMat::Zero(d, d);
    for (int n = 0; n < N; ++n) a += vals[static_cast<std::size_t>(n)] * std::polar(1.0 / N, -2.0 * kPi * k * n / N);
    for (int n = 0; n < N; ++n)
      dvals[static_cast<std::size_t>(n)] += a * (cplx(0.0, k) * std::polar(1.0, 2.0 * kPi * k * n / N));
  }
  std::vector<cplx> tr(vals.size());
  LogResidue out;
  for (std::size_t n = 0; n < vals.size(); ++n) {
    Eigen::PartialPivLU<CMat> lu(vals[n]);
    const cplx det = lu.determinant();
    out.nodes.push_back(center + std::polar(opt.radius, 2.0 * kPi * double(n) / N));
    out.dets.push_back(det);
    if (det == 0.0 || !std::isfinite(std::abs(det)))
      throw numerical_error("log_residue_count: family singular on the contour");
    tr[n] = lu.solve(dvals[n]).trace();
  }
  CompensatedSum<cplx> acc;
  for (cplx t : tr) acc.add(t);
  out.raw = acc.value() / (cplx(0.0, 1.0) * double(N));
  round_count(out.raw, opt.tol, out.count, out.non_integrality, "log_residue_count");
  return out;
}

std::optional<int> lattice_index(cplx lambda, int n, double tol) {
  const double m = -lambda.real() - rho_of(n);
  const double r = std::round(m);
  if (std::abs(lambda.imag()) > tol || std::abs(m - r) > tol || r < 0) return std::nullopt;
  return static_cast<int>(r);
}

long dim_F(cplx lambda, int n) {
  const std::optional<int> m = lattice_index(lambda, n);
  return m ? harmonic_dim(*m, n + 1) : 0;
}

long dim_F_at_lattice(cplx lambda, int n, double tol) {
  const std::optional<int> m = lattice_index(lambda, n, tol);
  if (!m) throw config_error("dim_F: lambda is not of the form -rho - m");
  return harmonic_dim(*m, n + 1);
}

OrderReport zeta_order(cplx lambda, const OrderInputs& in) {
  OrderReport r;
  r.lambda = lambda;
  if (std::abs(lambda) < 1e-12) {
    r.regime = "zero";
    int kernel = 0;
    if (in.assume_regular_scattering) {
      r.caveat = "scattering matrix assumed to have no eigenvalue -1";
    } else {
      if (!in.scattering_at_zero) throw precondition_error("zeta_order: scattering matrix at 0 required");
      const CMat S = in.scattering_at_zero();
      Eigen::ComplexEigenSolver<CMat> es(S);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i) + 1.0) < in.kernel_tol) ++kernel;
      r.caveat = "kernel of the discretized scattering matrix";
    }
    r.scattering_count = kernel;
    r.order = -kernel;
    return r;
  }
  if (lambda.real() >= 0.0) {
    r.regime = "re>0";
    if (in.delta_hat < 0.0) {
      r.point_spectrum_term = 0;
      r.order = 0;
    } else {
      r.caveat = "point spectrum unavailable for delta_hat >= 0";
    }
    return r;
  }
  r.regime = "re<0";
  r.finite_dim_term = static_cast<long>(euler_characteristic(in.rank)) * dim_F(lambda, in.n);
  if (in.assume_regular_scattering) {
    r.caveat = "scattering family assumed pole-free";
  } else {
    if (!in.counting_family) throw precondition_error("zeta_order: scattering family required for Re lambda < 0");
    MeromorphicFamily fam;
    fam.eval = in.counting_family;
    fam.center = -lambda;
    const LogResidue c = log_residue_count(fam, -lambda, in.contour);
    r.scattering_count = c.count;
    r.non_integrality = c.non_integrality;
    r.trace_nodes = c.nodes;
    r.trace_dets = c.dets;
    r.caveat = "orders of the discretized scattering family";
  }
  r.order = r.scattering_count - static_cast<int>(r.finite_dim_term);
  return r;
}

std::function<CMat(cplx)> funnel_normalized_scattering(GeometryPtr geo, int basis_size, int max_len,
                                                       const ScatterOptions& opt) {
  ScatterOptions so = opt;
  so.normalized = false;
  return [geo, basis_size, max_len, so](cplx mu) -> CMat {
    const CVec d = funnel_multipliers(mu, *geo, basis_size);
    CMat S = scattering(mu, geo, basis_size, max_len, so).matrix;
    for (Eigen::Index i = 0; i < S.rows(); ++i) S.row(i) /= d(i);
    return S;
  };
}

std::function<CMat()> normalized_scattering_at_zero(GeometryPtr geo, int basis_size, int max_len,
                                                    const ScatterOptions& opt) {
  ScatterOptions so = opt;
  so.normalized = true;
  return [geo, basis_size, max_len, so]() -> CMat { return scattering(0.0, geo, basis_size, max_len, so).matrix; };
}

LadderOrders ladder_orders(cplx lambda, const OrderInputs& lower, const OrderInputs& upper) {
  if (upper.n != lower.n + 1) throw config_error("ladder_orders: upper dimension must be n + 1");
  auto need = [](const OrderReport& r) {
    if (!r.order) throw precondition_error("ladder_orders: order unavailable at " + std::to_string(r.lambda.real()));
    return *r.order;
  };
  LadderOrders out;
  out.order_n = need(zeta_order(lambda, lower));
  out.order_up_minus = need(zeta_order(lambda - 0.5, upper));
  out.order_up_plus = need(zeta_order(lambda + 0.5, upper));
  return out;
}

int argument_principle_scan(const std::function<cplx(cplx)>& log_z, cplx lo, cplx hi, const ScanOptions& opt) {
  if (opt.grid < 4) throw config_error("argument_principle_scan: grid must be >= 4");
  if (lo.real() == hi.real() || lo.imag() == hi.imag()) return 0;
  const cplx c[4] = {cplx(lo.real(), lo.imag()), cplx(hi.real(), lo.imag()), cplx(hi.real(), hi.imag()),
                     cplx(lo.real(), hi.imag())};
  const int N = opt.grid;
  cplx total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const cplx a = c[side], b = c[(side + 1) % 4];
    CVec z(N + 1);
    parallel_for(static_cast<std::size_t>(N + 1), [&](std::size_t j) {
      const double x = std::cos(kPi * double(j) / N);
      z(static_cast<Eigen::Index>(j)) = std::exp(log_z(a + (b - a) * (0.5 * (x + 1.0))));
    });
    for (Eigen::Index j = 0; j <= N; ++j)
      if (!(std::abs(z(j)) > opt.floor)) throw numerical_error("argument_principle_scan: |Z| below floor on the contour");
    const CVec dz = cheb_derivative_values(z);
    total += cheb_integral(dz.cwiseQuotient(z));
  }
  int count = 0;
  double off = 0.0;
  round_count(total / cplx(0.0, 2.0 * kPi), opt.tol, count, off, "argument_principle_scan");
  return count;
}

}  // namespace kleinian
