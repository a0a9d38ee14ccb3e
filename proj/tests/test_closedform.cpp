#include <doctest.h>

#include <cmath>

#include "merw/closedform.hpp"
#include "merw/errors.hpp"
#include "merw/exact.hpp"

using namespace merw;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double rel_gap(double x, double y) { return std::fabs(x - y) / std::fabs(y); }

}  // namespace

TEST_CASE("stable log-gamma ratio") {
  // Small arguments: compare against the naive difference, which is accurate there.
  for (const double x : {1.0, 2.5, 7.0, 31.0, 64.0}) {
    for (const double delta : {-0.4, 0.3, 0.5, 1.0, 1.7}) {
      const double naive = std::lgamma(x + delta) - std::lgamma(x);
      CHECK(std::fabs(lgamma_ratio(x, delta) - naive) <= 1e-12 * std::max(1.0, std::fabs(naive)));
    }
  }
}

TEST_CASE("gamma-ratio normalizer recurrence vs log-gamma route") {
  for (const double a : {-0.5, 0.0, 1.0}) CHECK(gamma_ratio_an(1, a) == 1.0);
  for (const double a : {-0.5, 0.0, 1.0 / 3.0, 1.0}) {
    CHECK(gamma_ratio_an(2, a) == doctest::Approx(1.0 / (1.0 + a)).epsilon(1e-15));
  }
  for (const std::uint64_t n : {10ULL, 1000ULL, 100000ULL, 10000000ULL}) {
    for (const double a : {-0.2, 1.0 / 3.0, 0.5, 0.8}) {
      const double rec = gamma_ratio_an(n, a);
      const double lg = gamma_ratio_an_loggamma(n, a);
      CHECK(rel_gap(rec, lg) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(gamma_ratio_an(5, -1.0), std::domain_error);
}

TEST_CASE("n^a a_n converges to Gamma(a+1)") {
  const double value = std::pow(1e6, 0.5) * gamma_ratio_an(1000000, 0.5);
  const double target = std::sqrt(kPi) / 2.0;  // Gamma(3/2)
  CHECK(rel_gap(value, target) <= 1e-5);
}

TEST_CASE("v_n regime asymptotics") {
  CHECK(vn_sum(1, 0.3) == 1.0);
  SUBCASE("series is nondecreasing") {
    const auto series = gamma_ratio_series(2000, 0.35);
    for (std::size_t k = 1; k < series.vn.size(); ++k) CHECK(series.vn[k] >= series.vn[k - 1]);
    for (std::size_t k = 0; k < series.an.size(); ++k)
      CHECK(series.an[k] == doctest::Approx(gamma_ratio_an(k + 1, 0.35)).epsilon(1e-14));
  }
  SUBCASE("diffusive: v_n / n^{1-2a} -> Gamma(a+1)^2/(1-2a)") {
    const double ratio = vn_sum(1000000, 1.0 / 3.0) / std::cbrt(1e6);
    const double target = 3.0 * std::exp(2.0 * std::lgamma(4.0 / 3.0));
    CHECK(rel_gap(ratio, target) <= 0.01);
  }
  SUBCASE("critical: v_n / log n -> pi/4 at 1/log n speed") {
    // The limit constant is pi/4 but the correction term (Euler-Mascheroni
    // plus the sum of per-term corrections, about +0.80) vanishes only like
    // 1/log n: the gap is ~8.8% at n=1e5 and ~6.3% at n=1e7.
    const double target = kPi / 4.0;
    double previous = 1e300;
    for (const std::uint64_t n : {100000ULL, 1000000ULL, 10000000ULL}) {
      const double gap = rel_gap(vn_sum(n, 0.5) / std::log(static_cast<double>(n)), target);
      CHECK(gap < previous);
      previous = gap;
    }
    CHECK(previous <= 0.07);
    CHECK(rel_gap(vn_sum(1000000, 0.5) / std::log(1e6), target) ==
          doctest::Approx(0.0736).epsilon(0.02));
  }
  SUBCASE("superdiffusive: v_n converges to the 3F2 value") {
    const auto f = hyper3f2_unit(0.8, 1e-8);
    const double v = vn_sum(10000000, 0.8);
    CHECK(std::fabs(f.value - v) <= hyper3f2_tail_upper(0.8, 10000000 - 1) + f.error_bound);
  }
}

TEST_CASE("certified 3F2 evaluation") {
  SUBCASE("a = 1 gives pi^2/6") {
    const auto f = hyper3f2_unit(1.0, 1e-8);
    CHECK(f.error_bound <= 1e-8);
    CHECK(std::fabs(f.value - kPi * kPi / 6.0) <= 1e-8);
  }
  SUBCASE("divergent domain rejected") {
    CHECK_THROWS_AS(hyper3f2_unit(0.5, 1e-6), std::domain_error);
    CHECK_THROWS_AS(hyper3f2_unit(0.2, 1e-6), std::domain_error);
    CHECK_THROWS_AS(hyper3f2_unit(1.0, 0.0), std::invalid_argument);
  }
  SUBCASE("large a: first terms dominate") {
    const auto f = hyper3f2_unit(50.0, 1e-12);
    // Direct partial sum, terms fall off like (k!/(51...))^2.
    long double direct = 0.0L, term = 1.0L;
    for (int k = 0; k <= 40; ++k) {
      if (k > 0) {
        const long double kk = k;
        term *= (kk / (kk + 50.0L)) * (kk / (kk + 50.0L));
      }
      direct += term;
    }
    CHECK(std::fabs(f.value - static_cast<double>(direct)) <= 1e-10);
    CHECK(f.value == doctest::Approx(1.0003844).epsilon(1e-5));
  }
  SUBCASE("self-consistency across tolerances") {
    for (const double a : {0.65, 0.8, 0.95}) {
      const auto coarse = hyper3f2_unit(a, 1e-4);
      const auto fine = hyper3f2_unit(a, 1e-9);
      CHECK(std::fabs(coarse.value - fine.value) <= coarse.error_bound + fine.error_bound);
    }
  }
}

TEST_CASE("moment recurrence basics") {
  SUBCASE("n = 1 uniform seed") {
    for (const int d : {1, 2, 3}) {
      const auto table = exact_second_moment(1, d, 0.6, FirstStepLaw::uniform());
      for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j)
          CHECK(table.second_at(1, i, j) == doctest::Approx(i == j ? 1.0 / d : 0.0).epsilon(1e-15));
    }
  }
  SUBCASE("n = 2 uniform: (2 + 2a)/d on the diagonal") {
    for (const int d : {1, 2}) {
      for (const double p : {0.2, 0.5, 0.9}) {
        const double a = memory_to_a(d, p);
        const auto table = exact_second_moment(2, d, p, FirstStepLaw::uniform());
        CHECK(table.second_at(2, 1, 1) == doctest::Approx((2.0 + 2.0 * a) / d).epsilon(1e-14));
      }
    }
  }
  SUBCASE("d=1, n=2 equals 4p") {
    for (const double p : {0.0, 0.25, 0.75, 1.0}) {
      const auto table = exact_second_moment(2, 1, p, FirstStepLaw::uniform());
      CHECK(table.second_at(2, 1, 1) == doctest::Approx(4.0 * p).epsilon(1e-14));
    }
  }
}

TEST_CASE("moment tables are symmetric, positive semidefinite, isotropic, trace-bounded") {
  for (const int d : {1, 2, 3}) {
    for (const double p : {0.2, 0.625, 0.9}) {
      const auto table = exact_second_moment(40, d, p, FirstStepLaw::uniform());
      for (std::uint64_t n = 1; n <= 40; ++n) {
        double trace = 0.0;
        for (int i = 1; i <= d; ++i) {
          trace += table.second_at(n, i, i);
          CHECK(table.second_at(n, i, i) >= 0.0);
          // Uniform first step: the matrix is a scalar multiple of I.
          CHECK(table.second_at(n, i, i) ==
                doctest::Approx(table.second_at(n, 1, 1)).epsilon(1e-14));
          for (int j = 1; j <= d; ++j) {
            CHECK(table.second_at(n, i, j) == table.second_at(n, j, i));
            if (i != j) CHECK(table.second_at(n, i, j) == 0.0);
          }
        }
        CHECK(trace <= static_cast<double>(n) * static_cast<double>(n) + 1e-9);
      }
    }
  }
}

TEST_CASE("closed form equals the recurrence away from criticality") {
  for (const int d : {1, 2}) {
    for (const double p : {0.0, 0.25, 0.6, 0.75, 0.9, 1.0}) {
      if (classify_regime(d, p).kind == RegimeKind::Critical) continue;
      const auto table = exact_second_moment(50, d, p, FirstStepLaw::uniform());
      for (std::uint64_t n = 1; n <= 50; ++n) {
        const double closed = second_moment_closed_form(n, d, p);
        const double rec = table.second_at(n, 1, 1);
        CHECK(std::fabs(closed - rec) <= 1e-12 * std::max(1.0, std::fabs(rec)));
      }
    }
  }
  CHECK_THROWS_AS(second_moment_closed_form(10, 2, 0.625), std::domain_error);
}

TEST_CASE("incremental closed-form series matches the pointwise evaluation") {
  for (const double p : {0.1, 0.6, 0.9, 1.0}) {
    const auto series = second_moment_closed_form_series(300, 2, p);
    for (const std::uint64_t n : {1ULL, 2ULL, 57ULL, 300ULL})
      CHECK(series[n - 1] ==
            doctest::Approx(second_moment_closed_form(n, 2, p)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(second_moment_closed_form_series(10, 2, 0.625), std::domain_error);
}

TEST_CASE("rational recurrence agrees with the double recurrence") {
  const auto exact_tables =
      exact::second_moment_recurrence_exact(30, exact::ExactConfig{2, exact::Rational(7, 10), false,
                                                                   exact::Rational(0)});
  const auto table = exact_second_moment(30, 2, 0.7, FirstStepLaw::uniform());
  for (std::uint64_t n = 1; n <= 30; ++n)
    for (int i = 0; i < 2; ++i)
      CHECK(rel_gap(table.second_at(n, i + 1, i + 1),
                    exact::to_double(exact_tables[n - 1][i * 2 + i])) <= 1e-13);
}

TEST_CASE("finite-n L moment converges to the limit covariance") {
  // The gap closes like n^{1-2a}: at n=1e6 it is below 1% for a >= 0.7 but
  // still ~5.8% at a = 0.6.
  for (const double a : {0.7, 0.8, 1.0}) {
    // Pick d=1 and the p that realizes this a: p = (a(2d-1)+1)/(2d) = (a+1)/2.
    const double p = (a + 1.0) / 2.0;
    const double finite_n = ln_second_moment(1000000, 1, p);
    const double limit = 1.0 / ((2.0 * a - 1.0) * std::exp(std::lgamma(2.0 * a)));
    CHECK(rel_gap(finite_n, limit) <= 0.01);
  }
  {
    const double a = 0.6;
    const double limit = 1.0 / ((2.0 * a - 1.0) * std::exp(std::lgamma(2.0 * a)));
    const double gap_6 = rel_gap(ln_second_moment(1000000, 1, 0.8), limit);
    const double gap_8 = rel_gap(ln_second_moment(100000000, 1, 0.8), limit);
    CHECK(gap_6 <= 0.10);
    CHECK(gap_8 < gap_6);
  }
}

TEST_CASE("normalizer sum identities") {
  // sum_{k=2}^n a_k = (1 - n a_n)/(a - 1) for a != 1.
  for (const double a : {-0.2, 0.3, 0.5, 0.8}) {
    const std::uint64_t n = 10000;
    const auto series = gamma_ratio_series(n, a);
    long double sum = 0.0L;
    for (std::uint64_t k = 2; k <= n; ++k) sum += series.an[k - 1];
    const double closed = (1.0 - static_cast<double>(n) * series.an[n - 1]) / (a - 1.0);
    CHECK(std::fabs(static_cast<double>(sum) - closed) <= 1e-10 * std::max(1.0, std::fabs(closed)));
  }
  // (1/(n a_n)) sum_{k=1}^n a_k -> 1/(1-a): tight for small a, trend-checked near 1.
  for (const double a : {-0.2, 0.3, 0.5}) {
    const std::uint64_t n = 1000000;
    const auto series = gamma_ratio_series(n, a);
    long double sum = 0.0L;
    for (std::uint64_t k = 1; k <= n; ++k) sum += series.an[k - 1];
    const double ratio = static_cast<double>(sum) / (static_cast<double>(n) * series.an[n - 1]);
    CHECK(rel_gap(ratio, 1.0 / (1.0 - a)) <= 0.01);
  }
  {
    const double a = 0.8;
    const double target = 1.0 / (1.0 - a);
    double previous_gap = 1e300;
    for (const std::uint64_t n : {1000ULL, 100000ULL, 10000000ULL}) {
      const auto series = gamma_ratio_series(n, a);
      long double sum = 0.0L;
      for (std::uint64_t k = 1; k <= n; ++k) sum += series.an[k - 1];
      const double gap =
          std::fabs(static_cast<double>(sum) / (static_cast<double>(n) * series.an[n - 1]) - target);
      CHECK(gap < previous_gap);
      previous_gap = gap;
    }
    CHECK(previous_gap <= 0.05 * target);
  }
}

TEST_CASE("limit constants per regime") {
  SUBCASE("diffusive d=1: scale 1/(3-4p)") {
    for (const double p : {0.0, 0.25, 0.5, 0.7}) {
      const auto c = limit_constants(1, p, FirstStepLaw::uniform());
      CHECK(c.cov_scale == doctest::Approx(1.0 / (3.0 - 4.0 * p)).epsilon(1e-14));
    }
  }
  SUBCASE("critical d=2: {1/d, pi/4}") {
    const auto c = limit_constants(2, 0.625, FirstStepLaw::uniform());
    CHECK(c.regime.kind == RegimeKind::Critical);
    CHECK(c.cov_scale == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.vn_limit == doctest::Approx(kPi / 4.0).epsilon(1e-15));
  }
  SUBCASE("superdiffusive d=1 p=0.85: E||L||^2 = 1/(0.4 Gamma(1.4))") {
    const auto c = limit_constants(1, 0.85, FirstStepLaw::uniform());
    REQUIRE(c.has_l_moments);
    const double gamma_14 = 0.88726381750307528;  // Gamma(1.4), independent value
    CHECK(c.e_l_norm2 == doctest::Approx(1.0 / (0.4 * gamma_14)).epsilon(1e-12));
    CHECK(c.e_l_norm2 == doctest::Approx(2.8177).epsilon(1e-4));
    CHECK(c.e_l[0] == 0.0);
    CHECK(c.e_llt[0] == doctest::Approx(c.e_l_norm2).epsilon(1e-12));
  }
  SUBCASE("biased q = 1/(2d) collapses to the uniform formulas") {
    const auto uniform = l_moments(2, 0.9, FirstStepLaw::uniform());
    const auto biased = l_moments(2, 0.9, FirstStepLaw::biased(0.25));
    for (int i = 0; i < 2; ++i) CHECK(biased.e_l[i] == doctest::Approx(0.0));
    for (int e = 0; e < 4; ++e)
      CHECK(biased.e_llt[e] == doctest::Approx(uniform.e_llt[e]).epsilon(1e-14));
  }
  SUBCASE("biased q=1: E[L] = e1 / Gamma(a+1)") {
    const double a = memory_to_a(2, 0.9);
    const auto m = l_moments(2, 0.9, FirstStepLaw::biased(1.0));
    CHECK(m.e_l[0] == doctest::Approx(1.0 / std::exp(std::lgamma(a + 1.0))).epsilon(1e-13));
    CHECK(m.e_l[1] == 0.0);
    // Trace of the rank-one correction vanishes: E||L||^2 is variant-free.
    CHECK(m.e_llt[0] + m.e_llt[3] == doctest::Approx(m.e_l_norm2).epsilon(1e-12));
  }
  SUBCASE("L moments rejected outside the superdiffusive regime") {
    CHECK_THROWS_AS(l_moments(2, 0.5, FirstStepLaw::uniform()), std::domain_error);
    CHECK_THROWS_AS(l_moments(2, 0.625, FirstStepLaw::uniform()), std::domain_error);
  }
}

TEST_CASE("expected occupation matrix") {
  const auto diag = expected_sigma_diag(12, 3, FirstStepLaw::uniform());
  double trace = 0.0;
  for (const double v : diag) {
    CHECK(v == doctest::Approx(4.0).epsilon(1e-15));
    trace += v;
  }
  CHECK(trace == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(expected_sigma_diag(3, 3, FirstStepLaw::uniform())[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(expected_sigma_diag(5, 2, FirstStepLaw::biased(0.7)), NotImplementedError);
}

TEST_CASE("conditional eps moments") {
  SUBCASE("zero position gives second moment one") {
    WalkState state = WalkState::initial(2, false);
    state.record_step(SignedDirection{1, +1});
    state.record_step(SignedDirection{1, -1});
    const auto [m2, m4] = conditional_eps_moments(state, 2, 0.7);
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m4 <= 4.0 / 3.0 + 1e-15);
  }
  SUBCASE("worked example d=1 after two up steps") {
    WalkState state = WalkState::initial(1, false);
    state.record_step(SignedDirection{1, +1});
    state.record_step(SignedDirection{1, +1});
    for (const double p : {0.1, 0.5, 0.9}) {
      const double a = memory_to_a(1, p);
      const auto [m2, m4] = conditional_eps_moments(state, 1, p);
      CHECK(m2 == doctest::Approx(1.0 - a * a).epsilon(1e-13));
    }
  }
  SUBCASE("bounds hold on random states") {
    RngStream rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 1 + static_cast<int>(rng.uniform_below(3));
      WalkState state = WalkState::initial(d, false);
      const std::uint64_t steps = 1 + rng.uniform_below(60);
      for (std::uint64_t s = 0; s < steps; ++s)
        state.record_step(SignedDirection::from_code(static_cast<int>(rng.uniform_below(2 * d))));
      const double p = rng.uniform01();
      const auto [m2, m4] = conditional_eps_moments(state, d, p);
      CHECK(m2 <= 1.0 + 1e-12);
      CHECK(m4 <= 4.0 / 3.0 + 1e-12);
    }
  }
}
