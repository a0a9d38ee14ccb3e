#pragma once

#include <cstdint>
#include <vector>

#include "merw/engines.hpp"
#include "merw/model.hpp"

namespace merw {

// ln Gamma(x + delta) - ln Gamma(x), evaluated without the cancellation the
// naive lgamma difference suffers from at large x.  Requires x >= 1 and
// x + delta >= 1.
double lgamma_ratio(double x, double delta);

// Gamma-ratio normalizer a_n = Gamma(a+1) Gamma(n) / Gamma(n+a), by the
// multiplicative recurrence a_1 = 1, a_{k+1} = a_k * k/(k+a).  Requires a > -1.
double gamma_ratio_an(std::uint64_t n, double a);

// Same quantity through the stable log-Gamma route; the independent
// cross-check of the recurrence.
double gamma_ratio_an_loggamma(std::uint64_t n, double a);

// v_n = sum_{k=1}^n a_k^2.
double vn_sum(std::uint64_t n, double a);

// a_1..a_n and v_1..v_n as arrays (index k-1 holds the step-k value).
struct GammaRatioSeries {
  double a = 0.0;
  std::vector<double> an;
  std::vector<double> vn;
};
GammaRatioSeries gamma_ratio_series(std::uint64_t n, double a);

// 3F2(1,1,1; a+1,a+1; 1) = sum_k (Gamma(a+1) k! / Gamma(a+k+1))^2, the limit
// of v_n in the superdiffusive regime.  Returns the partial sum plus the
// midpoint of a certified tail bracket; `error_bound` is a rigorous bound on
// the total error and satisfies error_bound <= tol on success.
// Throws std::domain_error for a <= 1/2 (the series diverges).
struct Hyper3F2Result {
  double value = 0.0;
  double error_bound = 0.0;
  std::uint64_t terms = 0;
};
Hyper3F2Result hyper3f2_unit(double a, double tol);

// Certified upper bound on the tail sum_{k>N} of the 3F2 series above.
double hyper3f2_tail_upper(double a, std::uint64_t n_terms);

// Per-step exact moments E[S_k], E[S_k S_k^T] for k = 1..n from the
// conditional-covariance recurrence (double precision).
struct MomentTable {
  int d = 1;
  std::uint64_t n_max = 0;
  bool biased = false;
  std::vector<double> mean;    // n_max * d
  std::vector<double> second;  // n_max * d * d

  double mean_at(std::uint64_t n, int axis) const { return mean[(n - 1) * d + (axis - 1)]; }
  double second_at(std::uint64_t n, int i, int j) const {
    return second[((n - 1) * static_cast<std::uint64_t>(d) + (i - 1)) * d + (j - 1)];
  }
};
MomentTable exact_second_moment(std::uint64_t n, int d, double p, const FirstStepLaw& law);

// Final-step E[S_n S_n^T] only (d*d row-major); O(n) time, O(d^2) memory.
std::vector<double> second_moment_final(std::uint64_t n, int d, double p,
                                        const FirstStepLaw& law);

// Closed-form per-axis diagonal of E[S_n S_n^T]:
// (n/(2a-1)) (Gamma(n+2a)/(Gamma(n+1) Gamma(2a)) - 1) / d.
// Requires a != 1/2 (the formula has a removable singularity there, which
// the toolkit deliberately does not fill in; use the recurrence instead).
double second_moment_closed_form(std::uint64_t n, int d, double p);

// The same diagonal for every step 1..n, via the incremental rising-factorial
// ratio (O(n) total instead of O(n^2)).
std::vector<double> second_moment_closed_form_series(std::uint64_t n, int d, double p);

// Per-axis diagonal of E[L_n L_n^T] (the finite-n superdiffusive moment).
double ln_second_moment(std::uint64_t n, int d, double p);

// E[Sigma_n] = (n/d) I, uniform first step only; the biased analogue is
// deliberately unsupported and raises NotImplementedError.
std::vector<double> expected_sigma_diag(std::uint64_t n, int d, const FirstStepLaw& law);

// Exact conditional moments (E[||eps_{n+1}||^2 | F_n], E[||eps_{n+1}||^4 | F_n])
// evaluated from the realized counts and position.
std::pair<double, double> conditional_eps_moments(const WalkState& state, int d, double p);

// Asymptotic constants of the three regimes.
struct LimitConstants {
  Regime regime;
  int d = 1;
  double p = 0.0;
  bool biased = false;
  double q = 0.0;
  // Diffusive / critical: per-axis variance of the Gaussian limit law
  // (1/(d(1-2a)) resp. 1/d).
  double cov_scale = 0.0;
  // Growth constant of v_n: lim v_n/n^{1-2a} (diffusive), lim v_n/log n = pi/4
  // (critical), or lim v_n itself as the certified 3F2 value (superdiffusive).
  double vn_limit = 0.0;
  double vn_limit_bound = 0.0;  // certification radius, superdiffusive only
  bool has_l_moments = false;
  std::vector<double> e_l;    // d entries
  std::vector<double> e_llt;  // d*d row-major
  double e_l_norm2 = 0.0;
};
LimitConstants limit_constants(int d, double p, const FirstStepLaw& law);
// Same, with the regime decided by the caller (e.g. from the exact rational
// comparison of a p literal rather than double rounding).
LimitConstants limit_constants(int d, double p, const FirstStepLaw& law, const Regime& regime);

// L moments alone; throws std::domain_error outside the superdiffusive regime.
struct LMoments {
  std::vector<double> e_l;
  std::vector<double> e_llt;
  double e_l_norm2 = 0.0;
};
LMoments l_moments(int d, double p, const FirstStepLaw& law);

}  // namespace merw
