#pragma once

#include <optional>
#include <vector>

#include "kleinian/schottky.hpp"

namespace kleinian {

struct ZetaParams {
  int max_word_len = 8;      // L
  int max_sym_power = 60;    // K, upper cap; the used K is chosen adaptively
  double tail_tol = 1e-14;
  std::optional<double> delta_hat;  // when set, Re s must exceed delta_hat + margin
  double margin = 0.05;
};

struct ZetaValue {
  cplx log_z;
  double tail_bound = 0.0;  // k-tail + word-length tail
  double k_tail = 0.0;
  double word_tail = 0.0;
  int sym_power = 0;        // K actually used
};

// Primitive classes up to a word length, with their geometry evaluated once.
struct LengthSpectrum {
  int n = 2;
  int rank = 1;
  int max_len = 0;
  double q = 0.0;  // validated contraction ratio
  std::vector<ConjugacyClass> classes;
  double min_length() const;
};

LengthSpectrum length_spectrum(const SchottkyGroup& g, int max_len);

// Number of degree-k monomials in n-1 variables.
double sym_power_dim(int k, int n);

cplx log_euler_factor(const ConjugacyClass& c, cplx s, int K, int n);

ZetaValue zeta_log(const LengthSpectrum& spec, cplx s, const ZetaParams& p);
ZetaValue zeta_log(const SchottkyGroup& g, cplx s, const ZetaParams& p);

struct DeltaEstimate {
  double delta = 0.0;
  double uncertainty = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t orbit_size = 0;
};

// Fits log #{g : d(O, gO) <= R} = (delta + rho) R + beta log R + c.
DeltaEstimate delta_estimate(const SchottkyGroup& g, int max_len);

struct LadderResult {
  cplx lhs;
  cplx rhs;
  double discrepancy = 0.0;
  double tail_bound = 0.0;
};

// |log Z_{n+1}(s) - sum_{j<=J} log Z_n(s + j + 1/2)| for the block-embedded group.
LadderResult ladder_check(const SchottkyGroup& g, cplx s, int J, const ZetaParams& p);

}  // namespace kleinian
