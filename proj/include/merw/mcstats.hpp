#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "merw/closedform.hpp"
#include "merw/engines.hpp"
#include "merw/model.hpp"

namespace merw {

// One-pass (Welford/Pebay) moment accumulator over a fixed-length real
// vector, plus raw second moments of component products (for covariance
// standard errors) and a quadratic-form sample digest.  Merging two
// accumulators follows the exact pairwise-combination formulas, so a block
// decomposition merged along a fixed tree is bitwise deterministic for any
// worker count.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  explicit EnsembleAccumulator(int m, bool keep_qf = true);

  void add(const std::vector<double>& x, double qf);
  void merge(const EnsembleAccumulator& other);

  std::uint64_t count() const { return count_; }
  int dim() const { return m_; }

  double mean(int i) const { return mean_[i]; }
  // Central co-moment matrix sum; covariance estimate is comoment(i,j)/(R-1).
  double comoment(int i, int j) const { return comoment_[i * m_ + j]; }
  double central_m2(int i) const { return m2_[i]; }
  double central_m3(int i) const { return m3_[i]; }
  double central_m4(int i) const { return m4_[i]; }

  // Raw product statistics for y = x_i x_j (i <= j).
  double product_mean(int i, int j) const { return prod_mean_[pair_index(i, j)]; }
  double product_central_m2(int i, int j) const { return prod_m2_[pair_index(i, j)]; }

  const std::vector<double>& quadratic_form_samples() const { return qf_; }

 private:
  int pair_index(int i, int j) const { return i * m_ - i * (i - 1) / 2 + (j - i); }

  int m_ = 0;
  bool keep_qf_ = true;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;              // m*m
  std::vector<double> m2_, m3_, m4_;          // m
  std::vector<double> prod_mean_, prod_m2_;   // m(m+1)/2
  std::vector<double> qf_;
};

enum class Functional { Diffusive, Critical, Superdiffusive, Occupation, Qsl };

std::string functional_name(Functional f);

// Ensemble result: R trajectories on streams 0..R-1 of config.seed.
struct EnsembleStats {
  WalkConfig config;
  Functional functional = Functional::Diffusive;
  std::uint64_t runs = 0;
  int m = 0;
  double exponent_a = 0.0;                    // superdiffusive normalizer
  std::vector<std::uint64_t> checkpoint_steps;  // occupation functional
  EnsembleAccumulator acc;
};

// Runs R independent trajectories (reduced engine) and accumulates the
// chosen functional.  The regime functionals must agree with
// classify_regime(config) unless `override_regime` is set.  Deterministic
// for fixed (config.seed, R, functional): worker count only affects timing.
EnsembleStats run_ensemble(const WalkConfig& config, std::uint64_t runs, Functional functional,
                           int workers, bool override_regime = false);

struct CheckLine {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = true;
};

struct GofResult {
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct StatReport {
  std::string functional;
  std::string regime;
  int d = 1;
  double p = 0.0;
  bool biased = false;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t runs = 0;
  std::uint64_t horizon = 0;
  double z_threshold = 3.0;
  std::vector<CheckLine> lines;
  // Reported-only values (limit targets, gaps); never gate `pass`.
  std::vector<std::pair<std::string, double>> diagnostics;
  bool has_gof = false;
  GofResult gof;
  bool pass = true;

  // Report schema: config, regime, functional, R, horizon, estimates,
  // targets, standard_errors, z_scores, gof_distance, pass; numbers at 17
  // significant digits, fixed key order.
  std::string to_json() const;
};

// Componentwise z-test of the raw second-moment matrix against `target`
// (m*m row-major; off-diagonal targets are typically zero).
StatReport covariance_report(const EnsembleStats& stats, const std::vector<double>& target,
                             double z_threshold = 3.0);

// Kolmogorov-Smirnov fit of ||x||^2/sigma2 against chi-square(d), with the
// threshold calibrated on the null at the same sample count.  Refuses the
// superdiffusive functional (the limit law is not Gaussian there).
StatReport normality_check(const EnsembleStats& stats, double sigma2, int d);

// Superdiffusive moment comparison: estimates of E[L], E[LL^T], E[||L||^2]
// z-tested against the exact finite-n values, with the n -> infinity
// targets and their gaps reported as diagnostics.
StatReport superdiffusive_limit(const EnsembleStats& stats, int d, double p,
                                const FirstStepLaw& law);

// Occupation report: ensemble mean of Lambda_n(i) vs 1/d at every checkpoint.
StatReport occupation_report(const EnsembleStats& stats, double z_threshold = 3.0);

// Distribution plumbing (exposed for tests and calibration).
double chi2_cdf(double x, int dof);
double ks_distance_chi2(std::vector<double> samples, int dof);
double ks_distance_uniform(std::vector<double> samples);
// Null-calibrated KS threshold for sample count R (distribution-free).
double ks_null_threshold(std::uint64_t runs, double quantile = 0.995, int reps = 200);

}  // namespace merw
