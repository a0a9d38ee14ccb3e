#include "merw/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "merw/errors.hpp"

namespace merw {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Binet correction J(x) = ln Gamma(x) - (x - 1/2) ln x + x - ln(2 pi)/2,
// asymptotic series in 1/x; accurate below 1e-15 for x >= 32.
double binet(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12 + inv2 * (-1.0 / 360 + inv2 * (1.0 / 1260 + inv2 * (-1.0 / 1680))));
}

}  // namespace

double lgamma_ratio(double x, double delta) {
  if (!(x >= 1.0) || !(x + delta > 0.0))
    throw std::domain_error("lgamma_ratio: requires x >= 1 and x + delta > 0");
  // Lift both arguments above the Stirling threshold via
  // R(x) = R(x+1) - ln((x+delta)/x); each peeled ratio is O(1), no cancellation.
  double shift = 0.0;
  while (x < 34.0) {
    shift -= std::log1p(delta / x);
    x += 1.0;
  }
  const double main = (x - 0.5) * std::log1p(delta / x) + delta * std::log(x + delta) - delta;
  return shift + main + binet(x + delta) - binet(x);
}

double gamma_ratio_an(std::uint64_t n, double a) {
  if (n < 1) throw std::invalid_argument("gamma_ratio_an: n must be >= 1");
  if (!(a > -1.0)) throw std::domain_error("gamma_ratio_an: requires a > -1");
  long double value = 1.0L;
  const long double al = a;
  for (std::uint64_t k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    value *= kk / (kk + al);
  }
  return static_cast<double>(value);
}

double gamma_ratio_an_loggamma(std::uint64_t n, double a) {
  if (n < 1) throw std::invalid_argument("gamma_ratio_an_loggamma: n must be >= 1");
  if (!(a > -1.0)) throw std::domain_error("gamma_ratio_an_loggamma: requires a > -1");
  return std::exp(std::lgamma(a + 1.0) - lgamma_ratio(static_cast<double>(n), a));
}

double vn_sum(std::uint64_t n, double a) {
  if (n < 1) throw std::invalid_argument("vn_sum: n must be >= 1");
  if (!(a > -1.0)) throw std::domain_error("vn_sum: requires a > -1");
  long double an = 1.0L;
  long double sum = 1.0L;
  const long double al = a;
  for (std::uint64_t k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    an *= kk / (kk + al);
    sum += an * an;
  }
  return static_cast<double>(sum);
}

GammaRatioSeries gamma_ratio_series(std::uint64_t n, double a) {
  if (n < 1) throw std::invalid_argument("gamma_ratio_series: n must be >= 1");
  if (!(a > -1.0)) throw std::domain_error("gamma_ratio_series: requires a > -1");
  GammaRatioSeries series;
  series.a = a;
  series.an.resize(n);
  series.vn.resize(n);
  long double an = 1.0L;
  long double sum = 1.0L;
  series.an[0] = 1.0;
  series.vn[0] = 1.0;
  const long double al = a;
  for (std::uint64_t k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    an *= kk / (kk + al);
    sum += an * an;
    series.an[k] = static_cast<double>(an);
    series.vn[k] = static_cast<double>(sum);
  }
  return series;
}

namespace {

// Certified bracket [lower, upper] for the 3F2 tail sum_{k>N} t_k with
// t_k = (Gamma(a+1) k! / Gamma(a+k+1))^2.
//
// For a in (1/2, 1) the bracket comes from Kershaw's double inequality
//   (x + s/2)^{1-s} < Gamma(x+1)/Gamma(x+s) < (x - 1/2 + sqrt(s+1/4))^{1-s},
// applied with x = k + a, s = 1 - a, which sandwiches each term between
// shifted powers; integral comparison then brackets the sum.  At a = 1 the
// terms are exactly (k+1)^{-2}.  For a > 1 the term bound
// t_k <= Gamma(a+1)^2 (k+1)^{-2a} gives an upper bracket with lower end 0.
struct TailBracket {
  double lower;
  double upper;
};

TailBracket hyper3f2_tail(double a, double n) {
  const double gamma2 = std::exp(2.0 * std::lgamma(a + 1.0));
  const double s = 2.0 * a - 1.0;
  if (a < 1.0) {
    const double alpha = 0.5 * (1.0 + a);
    const double beta = a - 0.5 + std::sqrt(1.25 - a);
    return {gamma2 * std::pow(n + 1.0 + beta, -s) / s, gamma2 * std::pow(n + alpha, -s) / s};
  }
  if (a == 1.0) {
    return {1.0 / (n + 2.0), 1.0 / (n + 1.0)};
  }
  return {0.0, gamma2 * std::pow(n + 1.0, -s) / s};
}

}  // namespace

double hyper3f2_tail_upper(double a, std::uint64_t n_terms) {
  if (!(a > 0.5)) throw std::domain_error("hyper3f2_tail_upper: requires a > 1/2");
  return hyper3f2_tail(a, static_cast<double>(n_terms)).upper;
}

Hyper3F2Result hyper3f2_unit(double a, double tol) {
  if (!(a > 0.5)) throw std::domain_error("hyper3f2_unit: series diverges for a <= 1/2");
  if (!(tol > 0.0)) throw std::invalid_argument("hyper3f2_unit: tol must be positive");

  long double term = 1.0L;  // k = 0
  long double sum = 1.0L;
  const long double al = a;
  std::uint64_t k = 0;
  TailBracket tail{0.0, 1.0};
  const std::uint64_t kMaxTerms = 4000000000ULL;
  while (true) {
    ++k;
    const long double kk = static_cast<long double>(k);
    const long double ratio = kk / (kk + al);
    term *= ratio * ratio;
    sum += term;
    if (static_cast<double>(term) < 0.5 * tol) {
      tail = hyper3f2_tail(a, static_cast<double>(k));
      if (0.5 * (tail.upper - tail.lower) < 0.5 * tol) break;
    }
    if (k >= kMaxTerms)
      throw std::runtime_error("hyper3f2_unit: tolerance unreachable within the term budget");
  }
  // Extended-precision accumulation keeps the rounding term far below the
  // bracket width; account for it anyway.
  const double float_slack = 8.0 *
                             static_cast<double>(std::numeric_limits<long double>::epsilon()) *
                             static_cast<double>(k) * static_cast<double>(sum);
  Hyper3F2Result result;
  result.value = static_cast<double>(sum) + 0.5 * (tail.upper + tail.lower);
  result.error_bound = 0.5 * (tail.upper - tail.lower) + float_slack;
  result.terms = k + 1;
  return result;
}

namespace {

// Gamma(n+x)/(Gamma(x) Gamma(n+1)): rising factorial over factorial.  The
// product form covers every x (including the poles of Gamma(x) at
// non-positive integers, where the product is simply zero for n large
// enough); the log-Gamma route takes over for large n when x > 0.
double poch_over_factorial(std::uint64_t n, double x) {
  if (x > 0.0 && n > 100000) {
    return std::exp(lgamma_ratio(static_cast<double>(n), x) - std::log(static_cast<double>(n)) -
                    std::lgamma(x));
  }
  long double value = 1.0L;
  for (std::uint64_t j = 0; j < n; ++j) {
    value *= (x + static_cast<long double>(j)) / static_cast<long double>(j + 1);
  }
  return static_cast<double>(value);
}

}  // namespace

MomentTable exact_second_moment(std::uint64_t n, int d, double p, const FirstStepLaw& law) {
  if (n < 1) throw std::invalid_argument("exact_second_moment: n must be >= 1");
  if (d < 1) throw std::invalid_argument("exact_second_moment: d must be >= 1");
  const double a = memory_to_a(d, p);
  const bool biased = law.is_biased();

  MomentTable table;
  table.d = d;
  table.n_max = n;
  table.biased = biased;
  table.mean.assign(n * static_cast<std::uint64_t>(d), 0.0);
  table.second.assign(n * static_cast<std::uint64_t>(d) * d, 0.0);

  // Seed: E[S_1 S_1^T] = diag(lambda_i) with lambda_i the probability that
  // the first step lies on axis i; E[S_1] = ((2dq-1)/(2d-1)) e_1 when biased.
  std::vector<double> lambda(d, 1.0 / d);
  std::vector<double> delta(d, 0.0);
  bool has_delta = false;
  if (biased) {
    const double rest = (1.0 - law.q) / (2.0 * d - 1.0);
    lambda[0] = law.q + rest;
    for (int i = 1; i < d; ++i) lambda[i] = 2.0 * rest;
    for (int i = 0; i < d; ++i) {
      delta[i] = lambda[i] - 1.0 / d;
      if (delta[i] != 0.0) has_delta = true;
    }
  }

  std::vector<double> current(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<double> mu(d, 0.0);
  for (int i = 0; i < d; ++i) current[i * d + i] = lambda[i];
  if (biased) mu[0] = (2.0 * d * law.q - 1.0) / (2.0 * d - 1.0);

  auto store = [&](std::uint64_t step) {
    for (int i = 0; i < d; ++i) table.mean[(step - 1) * d + i] = mu[i];
    for (int i = 0; i < d * d; ++i)
      table.second[(step - 1) * static_cast<std::uint64_t>(d) * d + i] = current[i];
  };
  store(1);

  long double an = 1.0L;  // a_k, tracked for the biased occupation correction
  for (std::uint64_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double growth = 1.0 + 2.0 * a / kk;
    for (int i = 0; i < d * d; ++i) current[i] *= growth;
    for (int i = 0; i < d; ++i) {
      current[i * d + i] += 1.0 / d;
      if (has_delta) current[i * d + i] += a / (kk * static_cast<double>(an)) * delta[i];
    }
    const double gamma = 1.0 + a / kk;
    for (int i = 0; i < d; ++i) mu[i] *= gamma;
    an *= static_cast<long double>(k) / (static_cast<long double>(k) + a);
    store(k + 1);
  }
  return table;
}

std::vector<double> second_moment_final(std::uint64_t n, int d, double p,
                                        const FirstStepLaw& law) {
  if (n < 1) throw std::invalid_argument("second_moment_final: n must be >= 1");
  const double a = memory_to_a(d, p);
  const bool biased = law.is_biased();

  std::vector<double> lambda(d, 1.0 / d);
  std::vector<double> delta(d, 0.0);
  bool has_delta = false;
  if (biased) {
    const double rest = (1.0 - law.q) / (2.0 * d - 1.0);
    lambda[0] = law.q + rest;
    for (int i = 1; i < d; ++i) lambda[i] = 2.0 * rest;
    for (int i = 0; i < d; ++i) {
      delta[i] = lambda[i] - 1.0 / d;
      if (delta[i] != 0.0) has_delta = true;
    }
  }

  std::vector<long double> current(static_cast<std::size_t>(d) * d, 0.0L);
  for (int i = 0; i < d; ++i) current[i * d + i] = lambda[i];
  long double an = 1.0L;
  for (std::uint64_t k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double growth = 1.0L + 2.0L * static_cast<long double>(a) / kk;
    for (int i = 0; i < d * d; ++i) current[i] *= growth;
    for (int i = 0; i < d; ++i) {
      current[i * d + i] += 1.0L / d;
      if (has_delta) current[i * d + i] += static_cast<long double>(a) / (kk * an) * delta[i];
    }
    an *= kk / (kk + static_cast<long double>(a));
  }
  std::vector<double> result(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d * d; ++i) result[i] = static_cast<double>(current[i]);
  return result;
}

double second_moment_closed_form(std::uint64_t n, int d, double p) {
  if (n < 1) throw std::invalid_argument("second_moment_closed_form: n must be >= 1");
  const double a = memory_to_a(d, p);
  if (a == 0.5)
    throw std::domain_error(
        "second_moment_closed_form: removable singularity at a = 1/2; use the recurrence");
  const double ratio = poch_over_factorial(n, 2.0 * a);
  return static_cast<double>(n) / (2.0 * a - 1.0) * (ratio - 1.0) / d;
}

std::vector<double> second_moment_closed_form_series(std::uint64_t n, int d, double p) {
  if (n < 1) throw std::invalid_argument("second_moment_closed_form_series: n must be >= 1");
  const double a = memory_to_a(d, p);
  if (a == 0.5)
    throw std::domain_error(
        "second_moment_closed_form_series: removable singularity at a = 1/2; use the recurrence");
  std::vector<double> series(n);
  long double ratio = 2.0L * static_cast<long double>(a);  // poch(2a, k)/k! at k = 1
  for (std::uint64_t k = 1; k <= n; ++k) {
    series[k - 1] = static_cast<double>(k) / (2.0 * a - 1.0) *
                    (static_cast<double>(ratio) - 1.0) / d;
    ratio *= (2.0L * static_cast<long double>(a) + static_cast<long double>(k)) /
             static_cast<long double>(k + 1);
  }
  return series;
}

double ln_second_moment(std::uint64_t n, int d, double p) {
  const double a = memory_to_a(d, p);
  if (!(a > 0.5)) throw std::domain_error("ln_second_moment: requires the superdiffusive regime");
  const double scale = std::exp(-2.0 * lgamma_ratio(static_cast<double>(n), a));
  return scale * second_moment_closed_form(n, d, p);
}

std::vector<double> expected_sigma_diag(std::uint64_t n, int d, const FirstStepLaw& law) {
  if (n < 1) throw std::invalid_argument("expected_sigma_diag: n must be >= 1");
  if (d < 1) throw std::invalid_argument("expected_sigma_diag: d must be >= 1");
  if (law.is_biased())
    throw NotImplementedError(
        "expected_sigma_diag: no occupation formula is available for the biased first step");
  return std::vector<double>(d, static_cast<double>(n) / d);
}

std::pair<double, double> conditional_eps_moments(const WalkState& state, int d, double p) {
  if (state.n < 1) throw std::invalid_argument("conditional_eps_moments: requires n >= 1");
  const double a = memory_to_a(d, p);
  const double n = static_cast<double>(state.n);
  const double r = a / n;

  double s_norm2 = 0.0;
  double s_sigma_s = 0.0;
  for (int i = 1; i <= d; ++i) {
    const double si = static_cast<double>(state.position[i - 1]);
    s_norm2 += si * si;
    s_sigma_s += static_cast<double>(state.counts.axis_count(i)) * si * si;
  }
  const double m2 = 1.0 - r * r * s_norm2;
  const double m4 = 1.0 - 3.0 * r * r * r * r * s_norm2 * s_norm2 -
                    2.0 * (1.0 - 2.0 * (1.0 - a) / d) * r * r * s_norm2 +
                    4.0 * a / n * r * r * s_sigma_s;
  return {m2, m4};
}

namespace {

LMoments l_moments_from_a(int d, double a, const FirstStepLaw& law);

}  // namespace

LMoments l_moments(int d, double p, const FirstStepLaw& law) {
  const Regime regime = classify_regime(d, p);
  if (regime.kind != RegimeKind::Superdiffusive)
    throw std::domain_error("l_moments: L is defined only in the superdiffusive regime");
  return l_moments_from_a(d, regime.a, law);
}

namespace {

LMoments l_moments_from_a(int d, double a, const FirstStepLaw& law) {
  LMoments m;
  m.e_l.assign(d, 0.0);
  m.e_llt.assign(static_cast<std::size_t>(d) * d, 0.0);
  const double iso = 1.0 / (d * (2.0 * a - 1.0) * std::exp(std::lgamma(2.0 * a)));
  for (int i = 0; i < d; ++i) m.e_llt[i * d + i] = iso;
  if (law.is_biased()) {
    const double bias = (2.0 * d * law.q - 1.0) / (2.0 * d - 1.0);
    m.e_l[0] = bias / std::exp(std::lgamma(a + 1.0));
    const double rank_one = bias / std::exp(std::lgamma(2.0 * a + 1.0));
    for (int i = 0; i < d; ++i) m.e_llt[i * d + i] -= rank_one / d;
    m.e_llt[0] += rank_one;
  }
  m.e_l_norm2 = 1.0 / ((2.0 * a - 1.0) * std::exp(std::lgamma(2.0 * a)));
  return m;
}

}  // namespace

LimitConstants limit_constants(int d, double p, const FirstStepLaw& law) {
  return limit_constants(d, p, law, classify_regime(d, p));
}

LimitConstants limit_constants(int d, double p, const FirstStepLaw& law, const Regime& regime) {
  LimitConstants c;
  c.regime = regime;
  c.d = d;
  c.p = p;
  c.biased = law.is_biased();
  c.q = law.q;
  const double a = c.regime.a;
  switch (c.regime.kind) {
    case RegimeKind::Diffusive:
      c.cov_scale = 1.0 / (d * (1.0 - 2.0 * a));
      c.vn_limit = std::exp(2.0 * std::lgamma(a + 1.0)) / (1.0 - 2.0 * a);
      break;
    case RegimeKind::Critical:
      c.cov_scale = 1.0 / d;
      c.vn_limit = kPi / 4.0;
      break;
    case RegimeKind::Superdiffusive: {
      // Tightest certification reachable within a bounded term budget; the
      // bracket narrows like N^{-2a}, so fixed tolerances are unreachable
      // when a sits just above 1/2.
      const auto budget = hyper3f2_tail(a, 5e7);
      const double tol = std::max(1e-10, 1.1 * (budget.upper - budget.lower));
      const auto f = hyper3f2_unit(a, tol);
      c.vn_limit = f.value;
      c.vn_limit_bound = f.error_bound;
      const auto lm = l_moments_from_a(d, a, law);
      c.has_l_moments = true;
      c.e_l = lm.e_l;
      c.e_llt = lm.e_llt;
      c.e_l_norm2 = lm.e_l_norm2;
      break;
    }
  }
  return c;
}

}  // namespace merw
