#include "kleinian/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kleinian {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rho_of(int n) { return 0.5 * (n - 1); }

// log(1 - z), accurate for small |z|
cplx log1m(cplx z) {
  if (std::abs(z) < 1e-5) {
    cplx term = z, sum = 0.0;
    for (int k = 1; k < 8; ++k) {
      sum -= term / double(k);
      term *= z;
    }
    return sum;
  }
  return std::log(1.0 - z);
}

// Sums of phases over all degree-k multisets drawn from `phases`.
void multiset_phases(const std::vector<double>& phases, int k, std::vector<double>& out) {
  out.clear();
  const int m = static_cast<int>(phases.size());
  if (m == 0) return;
  std::function<void(int, int, double)> rec = [&](int idx, int left, double acc) {
    if (idx == m - 1) {
      out.push_back(acc + left * phases[static_cast<std::size_t>(idx)]);
      return;
    }
    for (int c = 0; c <= left; ++c) rec(idx + 1, left - c, acc + c * phases[static_cast<std::size_t>(idx)]);
  };
  rec(0, k, 0.0);
}

// sum_{k > K} dim_k y_k / (1 - y_k), y_k = exp(-(sigma + rho + k) l)
double class_k_tail(double l, double sigma, int K, int n) {
  const double rho = rho_of(n);
  double sum = 0.0;
  for (int k = K + 1; k < K + 100000; ++k) {
    const double y = std::exp(-(sigma + rho + k) * l);
    if (y >= 1.0) return kInf;
    const double term = sym_power_dim(k, n) * y / (1.0 - y);
    sum += term;
    if (term < 1e-30 * std::max(sum, 1e-300) || term == 0.0) break;
  }
  return sum;
}

// Bound on sum_k dim_k |log(1 - y_k)| for a class of length >= l.
double class_total_bound(double l, double sigma, int n) {
  const double a = sigma + rho_of(n);
  if (a <= 0.0 || l <= 0.0) return kInf;
  return std::exp(-a * l) / (std::pow(1.0 - std::exp(-l), n - 1) * (1.0 - std::exp(-a * l)));
}

double word_tail(const LengthSpectrum& spec, double sigma) {
  if (!(spec.q > 0.0 && spec.q < 1.0)) return kInf;
  const double lambda0 = -std::log(spec.q);
  const int r = spec.rank;
  const double a = sigma + rho_of(spec.n);
  if (a <= 0.0) return kInf;
  if (r == 1) {
    // two cyclically reduced words per length
    double sum = 0.0;
    for (int m = spec.max_len + 1; m < spec.max_len + 100000; ++m) {
      const double t = 2.0 * class_total_bound(m * lambda0, sigma, spec.n);
      sum += t;
      if (t < 1e-30 * sum) break;
    }
    return sum;
  }
  if ((2.0 * r - 1.0) * std::exp(-a * lambda0) >= 1.0) return kInf;
  double sum = 0.0;
  for (int m = spec.max_len + 1; m < spec.max_len + 100000; ++m) {
    const double count = 2.0 * r * std::pow(2.0 * r - 1.0, m - 1);
    const double t = count * class_total_bound(m * lambda0, sigma, spec.n);
    sum += t;
    if (!std::isfinite(sum)) return kInf;
    if (t < 1e-30 * sum) break;
  }
  return sum;
}

}  // namespace

double LengthSpectrum::min_length() const {
  double m = kInf;
  for (const auto& c : classes) m = std::min(m, c.class_data->length);
  return m;
}

double sym_power_dim(int k, int n) {
  // C(k + n - 2, n - 2)
  double d = 1.0;
  for (int j = 1; j <= n - 2; ++j) d = d * (k + j) / j;
  return d;
}

LengthSpectrum length_spectrum(const SchottkyGroup& g, int max_len) {
  LengthSpectrum spec;
  spec.n = g.n;
  spec.rank = g.rank();
  spec.max_len = max_len;
  spec.q = validate(g).q;
  auto all = enumerate_conjugacy_classes(g, max_len);
  for (auto& c : all)
    if (c.multiplicity == 1) spec.classes.push_back(std::move(c));
  parallel_for(spec.classes.size(), [&](std::size_t i) { class_geometry(g, spec.classes[i]); });
  return spec;
}

cplx log_euler_factor(const ConjugacyClass& c, cplx s, int K, int n) {
  if (c.multiplicity != 1) throw precondition_error("log_euler_factor: class is not primitive");
  if (!c.class_data) throw precondition_error("log_euler_factor: class geometry not evaluated");
  const double l = c.class_data->length;
  const double rho = rho_of(n);
  const std::vector<double> phases = rotation_phases(*c.class_data, n);
  std::vector<double> sums;
  CompensatedSum<cplx> acc;
  for (int k = 0; k <= K; ++k) {
    const cplx x = std::exp(-(s + rho + double(k)) * l);
    multiset_phases(phases, k, sums);
    for (double ph : sums) {
      const cplx z = x * std::polar(1.0, -ph);
      if (std::abs(1.0 - z) < 1e-13)
        throw numerical_error("log_euler_factor: factor vanishes (s at a zero of the factor)");
      acc.add(log1m(z));
    }
  }
  return acc.value();
}

ZetaValue zeta_log(const LengthSpectrum& spec, cplx s, const ZetaParams& p) {
  if (p.max_word_len < 1 || p.max_sym_power < 0 || !(p.tail_tol > 0.0))
    throw config_error("zeta: invalid truncation parameters");
  if (p.max_word_len > spec.max_len)
    throw precondition_error("zeta: length spectrum shorter than max_word_len");
  const double sigma = s.real();
  const int n = spec.n;
  if (p.delta_hat && !(sigma > *p.delta_hat + p.margin))
    throw precondition_error("zeta: Re s below the convergence margin (delta_hat + margin)");
  if (!(sigma + rho_of(n) > 0.0)) throw precondition_error("zeta: Re s + rho must be positive");

  std::vector<const ConjugacyClass*> used;
  for (const auto& c : spec.classes)
    if (static_cast<int>(c.cyclic_word.size()) <= p.max_word_len) used.push_back(&c);

  auto k_tail_at = [&](int K) {
    double t = 0.0;
    for (const auto* c : used) t += class_k_tail(c->class_data->length, sigma, K, n);
    return t;
  };
  int K = p.max_sym_power;
  for (int k = 0; k <= p.max_sym_power; ++k)
    if (k_tail_at(k) < 0.5 * p.tail_tol) {
      K = k;
      break;
    }

  std::vector<cplx> terms(used.size());
  parallel_for(used.size(), [&](std::size_t i) { terms[i] = log_euler_factor(*used[i], s, K, n); });
  CompensatedSum<cplx> acc;
  for (const cplx& t : terms) acc.add(t);

  ZetaValue v;
  v.log_z = acc.value();
  v.sym_power = K;
  v.k_tail = k_tail_at(K);
  LengthSpectrum trimmed;
  trimmed.n = n;
  trimmed.rank = spec.rank;
  trimmed.max_len = p.max_word_len;
  trimmed.q = spec.q;
  v.word_tail = word_tail(trimmed, sigma);
  v.tail_bound = v.k_tail + v.word_tail;
  return v;
}

ZetaValue zeta_log(const SchottkyGroup& g, cplx s, const ZetaParams& p) {
  return zeta_log(length_spectrum(g, p.max_word_len), s, p);
}

namespace {

double fit_rate(const std::vector<double>& radii, double lo, double hi) {
  const int M = 200;
  Mat A(M, 3);
  Vec y(M);
  for (int i = 0; i < M; ++i) {
    const double R = lo + (hi - lo) * (i + 0.5) / M;
    const double N = static_cast<double>(std::upper_bound(radii.begin(), radii.end(), R) - radii.begin());
    A(i, 0) = R;
    A(i, 1) = 1.0;
    A(i, 2) = std::log(R);
    y(i) = std::log(N);
  }
  const Vec c = A.colPivHouseholderQr().solve(y);
  return c(0);
}

}  // namespace

DeltaEstimate delta_estimate(const SchottkyGroup& g, int max_len) {
  std::vector<double> radii;
  double cut = kInf;
  walk_words(g, max_len, [&](const Word& w, const GroupElement& x) {
    const double d = cartan_radial(x);
    radii.push_back(d);
    if (static_cast<int>(w.size()) == max_len) cut = std::min(cut, d);
    return true;
  });
  std::sort(radii.begin(), radii.end());
  // the count is complete below the shortest word of maximal length
  DeltaEstimate e;
  e.orbit_size = radii.size();
  e.window_hi = cut;
  e.window_lo = 0.2 * cut;
  const auto inside = std::count_if(radii.begin(), radii.end(),
                                    [&](double r) { return r > e.window_lo && r <= e.window_hi; });
  if (inside < 12 || !(cut > 0.0) || !std::isfinite(cut))
    throw precondition_error("delta_estimate: too few orbit points for a stable fit");
  const double rho = rho_of(g.n);
  const double mid = 0.5 * (e.window_lo + e.window_hi);
  e.delta = fit_rate(radii, e.window_lo, e.window_hi) - rho;
  const double a = fit_rate(radii, e.window_lo, mid);
  const double b = fit_rate(radii, mid, e.window_hi);
  e.uncertainty = 0.5 * std::abs(a - b);
  return e;
}

LadderResult ladder_check(const SchottkyGroup& g, cplx s, int J, const ZetaParams& p) {
  if (J < 0) throw config_error("ladder: J must be >= 0");
  const int n = g.n;
  const SchottkyGroup up = embed_group(g, n + 1);
  const LengthSpectrum lo_spec = length_spectrum(g, p.max_word_len);
  const LengthSpectrum up_spec = length_spectrum(up, p.max_word_len);

  ZetaParams pu = p, pl = p;
  if (p.delta_hat) pu.delta_hat = *p.delta_hat - 0.5;
  LadderResult r;
  const ZetaValue zu = zeta_log(up_spec, s, pu);
  r.lhs = zu.log_z;
  double tails = zu.k_tail;
  CompensatedSum<cplx> acc;
  for (int j = 0; j <= J; ++j) {
    const ZetaValue zl = zeta_log(lo_spec, s + double(j) + 0.5, pl);
    acc.add(zl.log_z);
    tails += zl.k_tail;
  }
  r.rhs = acc.value();
  // remaining j > J terms, geometric in j with ratio exp(-l)
  const double sigma_next = s.real() + J + 1.5;
  for (const auto& c : lo_spec.classes) {
    if (static_cast<int>(c.cyclic_word.size()) > p.max_word_len) continue;
    const double l = c.class_data->length;
    tails += class_total_bound(l, sigma_next, n) / (1.0 - std::exp(-l));
  }
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.tail_bound = tails;
  return r;
}

}  // namespace kleinian
