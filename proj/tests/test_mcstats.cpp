#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "merw/closedform.hpp"
#include "merw/mcstats.hpp"
#include "merw/rng.hpp"

using namespace merw;

namespace {

WalkConfig make_config(int d, double p, std::uint64_t horizon, std::uint64_t seed) {
  WalkConfig config;
  config.d = d;
  config.p = p;
  config.horizon = horizon;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("accumulator moments match direct formulas") {
  RngStream rng(13, 0);
  const int m = 3;
  const int n = 1500;
  std::vector<std::vector<double>> data(n, std::vector<double>(m));
  EnsembleAccumulator acc(m);
  for (auto& row : data) {
    for (auto& v : row) v = rng.uniform01() * 4.0 - 2.0;
    acc.add(row, row[0]);
  }
  for (int i = 0; i < m; ++i) {
    double mean = 0.0;
    for (const auto& row : data) mean += row[i];
    mean /= n;
    CHECK(acc.mean(i) == doctest::Approx(mean).epsilon(1e-12));
    double c2 = 0, c3 = 0, c4 = 0;
    for (const auto& row : data) {
      const double d1 = row[i] - mean;
      c2 += d1 * d1;
      c3 += d1 * d1 * d1;
      c4 += d1 * d1 * d1 * d1;
    }
    CHECK(acc.central_m2(i) == doctest::Approx(c2).epsilon(1e-10));
    CHECK(acc.central_m3(i) == doctest::Approx(c3).epsilon(1e-8));
    CHECK(acc.central_m4(i) == doctest::Approx(c4).epsilon(1e-8));
    for (int j = i; j < m; ++j) {
      double meanj = 0.0;
      for (const auto& row : data) meanj += row[j];
      meanj /= n;
      double cij = 0.0, raw = 0.0;
      for (const auto& row : data) {
        cij += (row[i] - mean) * (row[j] - meanj);
        raw += row[i] * row[j];
      }
      CHECK(acc.comoment(i, j) == doctest::Approx(cij).epsilon(1e-10));
      CHECK(acc.product_mean(i, j) == doctest::Approx(raw / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("merging accumulators equals one-shot accumulation") {
  RngStream rng(14, 0);
  const int m = 2;
  EnsembleAccumulator whole(m);
  std::vector<EnsembleAccumulator> parts;
  parts.emplace_back(m);
  for (int i = 0; i < 999; ++i) {
    std::vector<double> x = {rng.uniform01(), rng.uniform01() * 3.0};
    whole.add(x, x[0] + x[1]);
    if (rng.uniform01() < 0.02) parts.emplace_back(m);
    parts.back().add(x, x[0] + x[1]);
  }
  EnsembleAccumulator merged = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) merged.merge(parts[i]);
  CHECK(merged.count() == whole.count());
  for (int i = 0; i < m; ++i) {
    CHECK(merged.mean(i) == doctest::Approx(whole.mean(i)).epsilon(1e-12));
    CHECK(merged.central_m2(i) == doctest::Approx(whole.central_m2(i)).epsilon(1e-10));
    CHECK(merged.central_m4(i) == doctest::Approx(whole.central_m4(i)).epsilon(1e-8));
    for (int j = i; j < m; ++j) {
      CHECK(merged.comoment(i, j) == doctest::Approx(whole.comoment(i, j)).epsilon(1e-10));
      CHECK(merged.product_mean(i, j) == doctest::Approx(whole.product_mean(i, j)).epsilon(1e-12));
    }
  }
  CHECK(merged.quadratic_form_samples() == whole.quadratic_form_samples());
}

TEST_CASE("ensembles are bitwise deterministic and worker-independent") {
  const auto config = make_config(2, 0.5, 500, 4242);
  const auto s1 = run_ensemble(config, 3000, Functional::Diffusive, 1);
  const auto s3 = run_ensemble(config, 3000, Functional::Diffusive, 3);
  const auto s8 = run_ensemble(config, 3000, Functional::Diffusive, 8);
  const auto exact = second_moment_final(500, 2, 0.5, FirstStepLaw::uniform());
  const std::vector<double> target = {exact[0] / 500, exact[1] / 500, exact[2] / 500,
                                      exact[3] / 500};
  const std::string r1 = covariance_report(s1, target).to_json();
  const std::string r3 = covariance_report(s3, target).to_json();
  const std::string r8 = covariance_report(s8, target).to_json();
  CHECK(r1 == r3);
  CHECK(r1 == r8);
}

TEST_CASE("tiny ensemble contract: R=2, horizon=1") {
  const auto config = make_config(1, 0.5, 1, 7);
  const auto a = run_ensemble(config, 2, Functional::Diffusive, 1, /*override=*/false);
  const auto b = run_ensemble(config, 2, Functional::Diffusive, 2);
  CHECK(a.acc.mean(0) == b.acc.mean(0));
  CHECK(std::fabs(a.acc.mean(0)) <= 1.0);
}

TEST_CASE("functional/regime mismatch is rejected unless overridden") {
  const auto super = make_config(1, 0.9, 100, 3);
  CHECK_THROWS_AS(run_ensemble(super, 10, Functional::Diffusive, 1), std::invalid_argument);
  CHECK_NOTHROW(run_ensemble(super, 10, Functional::Diffusive, 1, /*override=*/true));
  CHECK_THROWS_AS(run_ensemble(super, 10, Functional::Qsl, 1), std::domain_error);
}

TEST_CASE("covariance report calibrates on synthetic Gaussian input") {
  // Draws from the diffusive limit law N(0, 1.5 I_2): d=2, a=1/3.
  EnsembleStats stats;
  stats.config = make_config(2, 0.5, 10000, 99);
  stats.functional = Functional::Diffusive;
  stats.runs = 20000;
  stats.m = 2;
  stats.acc = EnsembleAccumulator(2);
  RngStream rng(1234, 0);
  const double sd = std::sqrt(1.5);
  for (std::uint64_t r = 0; r < stats.runs; ++r) {
    const auto [g1, g2] = rng.gaussian_pair();
    const std::vector<double> x = {sd * g1, sd * g2};
    stats.acc.add(x, x[0] * x[0] + x[1] * x[1]);
  }
  const std::vector<double> target = {1.5, 0.0, 0.0, 1.5};
  const auto report = covariance_report(stats, target);
  CHECK(report.pass);
  // The quadratic form over sigma^2 = 1.5 is exactly chi-square(2).
  const auto gof = normality_check(stats, 1.5, 2);
  CHECK(gof.gof.pass);
}

TEST_CASE("normality check refuses the superdiffusive functional") {
  const auto config = make_config(1, 0.9, 50, 21);
  const auto stats = run_ensemble(config, 100, Functional::Superdiffusive, 1);
  CHECK_THROWS_AS(normality_check(stats, 1.0, 1), std::domain_error);
}

TEST_CASE("chi-square distribution plumbing") {
  for (const double x : {0.1, 1.0, 2.5, 7.0}) {
    CHECK(chi2_cdf(x, 2) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(chi2_cdf(x, 1) == doctest::Approx(std::erf(std::sqrt(x / 2.0))).epsilon(1e-12));
  }
  CHECK(chi2_cdf(0.0, 3) == 0.0);

  // KS distance of a perfect uniform grid is 1/(2R) + o(1).
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (i + 0.5) / grid.size();
  CHECK(ks_distance_uniform(grid) == doctest::Approx(0.0005).epsilon(1e-9));

  const double t1 = ks_null_threshold(2000);
  const double t2 = ks_null_threshold(2000);
  CHECK(t1 == t2);
  CHECK(t1 > 0.3 / std::sqrt(2000.0));
  CHECK(t1 < 3.0 / std::sqrt(2000.0));
}

TEST_CASE("superdiffusive limit report at smoke scale") {
  SUBCASE("uniform first step, d=1, p=0.85") {
    const auto config = make_config(1, 0.85, 2000, 11);
    const auto stats = run_ensemble(config, 3000, Functional::Superdiffusive, 2);
    const auto report = superdiffusive_limit(stats, 1, 0.85, FirstStepLaw::uniform());
    CHECK(report.pass);
    double limit_norm2 = 0.0;
    for (const auto& [k, v] : report.diagnostics)
      if (k == "limit_norm2") limit_norm2 = v;
    CHECK(limit_norm2 == doctest::Approx(2.8177).epsilon(1e-3));
  }
  SUBCASE("biased q=1, d=2, p=0.9: mean heads along e1") {
    auto config = make_config(2, 0.9, 2000, 12);
    config.first_step = FirstStepLaw::biased(1.0);
    const auto stats = run_ensemble(config, 3000, Functional::Superdiffusive, 2);
    const auto report = superdiffusive_limit(stats, 2, 0.9, FirstStepLaw::biased(1.0));
    CHECK(report.pass);
    const double a = memory_to_a(2, 0.9);
    double limit_mean_1 = 0.0;
    for (const auto& [k, v] : report.diagnostics)
      if (k == "limit_mean_1") limit_mean_1 = v;
    CHECK(limit_mean_1 == doctest::Approx(1.0 / std::exp(std::lgamma(a + 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("occupation ensemble means sit at 1/d") {
  const auto config = make_config(2, 0.3, 400, 5);
  const auto stats = run_ensemble(config, 2000, Functional::Occupation, 2);
  const auto report = occupation_report(stats);
  CHECK(report.pass);
  CHECK(report.lines.size() == 8);  // 4 checkpoints x 2 axes
}

TEST_CASE("qsl ensemble mean approaches the quadratic-strong-law constant") {
  // d=1, p=0.5 (a=0): limit 1/(1-2a) = 1; convergence is log-speed, so the
  // band is wide.
  const auto config = make_config(1, 0.5, 20000, 6);
  const auto stats = run_ensemble(config, 300, Functional::Qsl, 2);
  CHECK(stats.acc.mean(0) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("ensemble covariance estimate is symmetric positive semidefinite") {
  const auto config = make_config(3, 0.4, 300, 17);
  const auto stats = run_ensemble(config, 4000, Functional::Diffusive, 2);
  const int m = stats.m;
  const double scale = static_cast<double>(stats.runs - 1);
  std::vector<double> cov(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      cov[i * m + j] = stats.acc.comoment(i, j) / scale;
      CHECK(std::fabs(stats.acc.comoment(i, j) - stats.acc.comoment(j, i)) <= 1e-12);
    }
  // PSD probe over random directions.
  RngStream rng(23, 0);
  for (int probe = 0; probe < 64; ++probe) {
    std::vector<double> x(m);
    double norm = 0.0;
    for (auto& v : x) {
      v = rng.uniform01() - 0.5;
      norm += v * v;
    }
    double quad = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) quad += x[i] * cov[i * m + j] * x[j];
    CHECK(quad >= -1e-12 * norm);
  }
}

TEST_CASE("report json is deterministic and carries the schema fields") {
  const auto config = make_config(2, 0.5, 200, 8);
  const auto stats = run_ensemble(config, 500, Functional::Diffusive, 1);
  const auto exact = second_moment_final(200, 2, 0.5, FirstStepLaw::uniform());
  const std::vector<double> target = {exact[0] / 200, exact[1] / 200, exact[2] / 200,
                                      exact[3] / 200};
  const auto report = covariance_report(stats, target);
  const std::string json = report.to_json();
  CHECK(json == covariance_report(stats, target).to_json());
  for (const char* field : {"\"config\"", "\"regime\"", "\"functional\"", "\"R\"", "\"horizon\"",
                            "\"estimates\"", "\"targets\"", "\"standard_errors\"", "\"z_scores\"",
                            "\"gof_distance\"", "\"pass\""}) {
    CHECK(json.find(field) != std::string::npos);
  }
}
