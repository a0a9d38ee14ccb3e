#include "merw/mcstats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "merw/report.hpp"
#include "merw/rng.hpp"

namespace merw {

namespace {

constexpr std::uint64_t kBlockSize = 1024;  // streams per merge-tree leaf
constexpr std::uint64_t kKsCalibrationSeed = 0x4D455257CA11B7A1ULL;

}  // namespace

EnsembleAccumulator::EnsembleAccumulator(int m, bool keep_qf) : m_(m), keep_qf_(keep_qf) {
  mean_.assign(m, 0.0);
  comoment_.assign(static_cast<std::size_t>(m) * m, 0.0);
  m2_.assign(m, 0.0);
  m3_.assign(m, 0.0);
  m4_.assign(m, 0.0);
  const int pairs = m * (m + 1) / 2;
  prod_mean_.assign(pairs, 0.0);
  prod_m2_.assign(pairs, 0.0);
}

void EnsembleAccumulator::add(const std::vector<double>& x, double qf) {
  count_ += 1;
  const double n = static_cast<double>(count_);
  // Central components (Pebay one-pass updates).
  for (int i = 0; i < m_; ++i) {
    const double delta = x[i] - mean_[i];
    const double delta_n = delta / n;
    const double term1 = delta * delta_n * (n - 1.0);
    m4_[i] += term1 * delta_n * delta_n * (n * n - 3.0 * n + 3.0) +
              6.0 * delta_n * delta_n * m2_[i] - 4.0 * delta_n * m3_[i];
    m3_[i] += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_[i];
    m2_[i] += term1;
  }
  // Symmetric co-moment update with the pre-update means.
  const double scale = (n - 1.0) / n;
  for (int i = 0; i < m_; ++i) {
    const double di = x[i] - mean_[i];
    for (int j = i; j < m_; ++j) {
      const double inc = scale * di * (x[j] - mean_[j]);
      comoment_[i * m_ + j] += inc;
      if (j != i) comoment_[j * m_ + i] += inc;
    }
  }
  // Raw product stats (Welford on y = x_i x_j).
  int idx = 0;
  for (int i = 0; i < m_; ++i) {
    for (int j = i; j < m_; ++j, ++idx) {
      const double y = x[i] * x[j];
      const double delta = y - prod_mean_[idx];
      prod_mean_[idx] += delta / n;
      prod_m2_[idx] += delta * (y - prod_mean_[idx]);
    }
  }
  for (int i = 0; i < m_; ++i) mean_[i] += (x[i] - mean_[i]) / n;
  if (keep_qf_) qf_.push_back(qf);
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;

  for (int i = 0; i < m_; ++i) {
    const double delta = other.mean_[i] - mean_[i];
    const double m2a = m2_[i], m2b = other.m2_[i];
    const double m3a = m3_[i], m3b = other.m3_[i];
    m4_[i] += other.m4_[i] +
              delta * delta * delta * delta * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
              6.0 * delta * delta * (na * na * m2b + nb * nb * m2a) / (n * n) +
              4.0 * delta * (na * m3b - nb * m3a) / n;
    m3_[i] += m3b + delta * delta * delta * na * nb * (na - nb) / (n * n) +
              3.0 * delta * (na * m2b - nb * m2a) / n;
    m2_[i] += m2b + delta * delta * na * nb / n;
  }
  for (int i = 0; i < m_; ++i) {
    const double di = other.mean_[i] - mean_[i];
    for (int j = 0; j < m_; ++j) {
      const double dj = other.mean_[j] - mean_[j];
      comoment_[i * m_ + j] += other.comoment_[i * m_ + j] + di * dj * na * nb / n;
    }
  }
  int idx = 0;
  for (int i = 0; i < m_; ++i) {
    for (int j = i; j < m_; ++j, ++idx) {
      const double delta = other.prod_mean_[idx] - prod_mean_[idx];
      prod_m2_[idx] += other.prod_m2_[idx] + delta * delta * na * nb / n;
      prod_mean_[idx] += delta * nb / n;
    }
  }
  for (int i = 0; i < m_; ++i) mean_[i] += (other.mean_[i] - mean_[i]) * nb / n;
  if (keep_qf_) qf_.insert(qf_.end(), other.qf_.begin(), other.qf_.end());
  count_ += other.count_;
}

std::string functional_name(Functional f) {
  switch (f) {
    case Functional::Diffusive: return "diffusive";
    case Functional::Critical: return "critical";
    case Functional::Superdiffusive: return "superdiffusive";
    case Functional::Occupation: return "occupation";
    case Functional::Qsl: return "qsl";
  }
  return "unknown";
}

namespace {

std::string regime_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Diffusive: return "diffusive";
    case RegimeKind::Critical: return "critical";
    case RegimeKind::Superdiffusive: return "superdiffusive";
  }
  return "unknown";
}

struct FunctionalPlan {
  int m = 0;
  bool keep_qf = true;
  double exponent_a = 0.0;
  std::vector<std::uint64_t> checkpoints;
  bool qsl_critical = false;
};

FunctionalPlan make_plan(const WalkConfig& config, Functional functional, bool override_regime) {
  const Regime regime = classify_regime(config.d, config.p);
  FunctionalPlan plan;
  const auto expect = [&](RegimeKind kind) {
    if (regime.kind != kind && !override_regime)
      throw std::invalid_argument("run_ensemble: functional '" + functional_name(functional) +
                                  "' does not match the regime of (d, p); pass override to force");
  };
  switch (functional) {
    case Functional::Diffusive:
      expect(RegimeKind::Diffusive);
      plan.m = config.d;
      break;
    case Functional::Critical:
      expect(RegimeKind::Critical);
      if (config.horizon < 2) throw std::invalid_argument("run_ensemble: critical functional needs n >= 2");
      plan.m = config.d;
      break;
    case Functional::Superdiffusive:
      expect(RegimeKind::Superdiffusive);
      plan.m = config.d;
      plan.exponent_a = regime.a;
      break;
    case Functional::Occupation: {
      plan.m = 4 * config.d;
      plan.keep_qf = false;
      const std::uint64_t n = config.horizon;
      plan.checkpoints = {(n + 3) / 4, (n + 1) / 2, (3 * n + 3) / 4, n};
      for (std::size_t i = 1; i < plan.checkpoints.size(); ++i)
        if (plan.checkpoints[i] <= plan.checkpoints[i - 1])
          throw std::invalid_argument("run_ensemble: horizon too short for occupation checkpoints");
      break;
    }
    case Functional::Qsl:
      if (regime.kind == RegimeKind::Superdiffusive)
        throw std::domain_error("run_ensemble: no quadratic strong law in the superdiffusive regime");
      plan.qsl_critical = regime.kind == RegimeKind::Critical;
      if (config.horizon < (plan.qsl_critical ? 3u : 2u))
        throw std::invalid_argument("run_ensemble: horizon too short for the QSL functional");
      plan.m = config.d;
      plan.keep_qf = false;
      break;
  }
  return plan;
}

void run_one(const WalkConfig& config, Functional functional, const FunctionalPlan& plan,
             std::uint64_t stream, EnsembleAccumulator& acc) {
  const int d = config.d;
  const std::uint64_t n = config.horizon;
  RngStream rng(config.seed, stream);
  WalkState state = WalkState::initial(d, false);
  state.record_step(first_step(config, rng));

  std::vector<double> x(plan.m, 0.0);
  std::vector<double> qsl_running;
  std::size_t checkpoint_next = 0;

  const auto observe = [&](std::uint64_t step) {
    if (functional == Functional::Qsl) {
      const double kk = static_cast<double>(step);
      if (!plan.qsl_critical) {
        const double w = 1.0 / (kk * kk);
        for (int i = 0; i < d; ++i) {
          const double si = static_cast<double>(state.position[i]);
          qsl_running[i] += w * si * si;
        }
      } else if (step >= 2) {
        const double lk = kk * std::log(kk);
        const double w = 1.0 / (lk * lk);
        for (int i = 0; i < d; ++i) {
          const double si = static_cast<double>(state.position[i]);
          qsl_running[i] += w * si * si;
        }
      }
    } else if (functional == Functional::Occupation) {
      if (checkpoint_next < plan.checkpoints.size() && step == plan.checkpoints[checkpoint_next]) {
        for (int i = 1; i <= d; ++i)
          x[checkpoint_next * d + (i - 1)] =
              static_cast<double>(state.counts.axis_count(i)) / static_cast<double>(step);
        ++checkpoint_next;
      }
    }
  };

  if (functional == Functional::Qsl) qsl_running.assign(d, 0.0);
  observe(1);
  for (std::uint64_t step = 2; step <= n; ++step) {
    advance_reduced(state, config.p, rng);
    observe(step);
  }

  double qf = 0.0;
  switch (functional) {
    case Functional::Diffusive: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (int i = 0; i < d; ++i) x[i] = scale * static_cast<double>(state.position[i]);
      for (int i = 0; i < d; ++i) qf += x[i] * x[i];
      break;
    }
    case Functional::Critical: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
      for (int i = 0; i < d; ++i) x[i] = scale * static_cast<double>(state.position[i]);
      for (int i = 0; i < d; ++i) qf += x[i] * x[i];
      break;
    }
    case Functional::Superdiffusive: {
      const double scale = std::pow(static_cast<double>(n), -plan.exponent_a);
      for (int i = 0; i < d; ++i) x[i] = scale * static_cast<double>(state.position[i]);
      for (int i = 0; i < d; ++i) qf += x[i] * x[i];
      break;
    }
    case Functional::Occupation:
      break;  // filled at checkpoints
    case Functional::Qsl: {
      const double nn = static_cast<double>(n);
      const double norm = plan.qsl_critical ? 1.0 / std::log(std::log(nn)) : 1.0 / std::log(nn);
      for (int i = 0; i < d; ++i) x[i] = norm * qsl_running[i];
      break;
    }
  }
  acc.add(x, qf);
}

}  // namespace

EnsembleStats run_ensemble(const WalkConfig& config, std::uint64_t runs, Functional functional,
                           int workers, bool override_regime) {
  config.validate();
  if (runs < 2) throw std::invalid_argument("run_ensemble: needs R >= 2");
  if (workers < 1) throw std::invalid_argument("run_ensemble: workers must be >= 1");
  const FunctionalPlan plan = make_plan(config, functional, override_regime);

  const std::uint64_t n_blocks = (runs + kBlockSize - 1) / kBlockSize;
  std::vector<EnsembleAccumulator> blocks(n_blocks);

  std::atomic<std::uint64_t> next_block{0};
  const auto worker_loop = [&]() {
    while (true) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      EnsembleAccumulator acc(plan.m, plan.keep_qf);
      const std::uint64_t lo = b * kBlockSize;
      const std::uint64_t hi = std::min(runs, lo + kBlockSize);
      for (std::uint64_t stream = lo; stream < hi; ++stream)
        run_one(config, functional, plan, stream, acc);
      blocks[b] = std::move(acc);
    }
  };

  const unsigned thread_count =
      static_cast<unsigned>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), n_blocks));
  if (thread_count <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }

  // Fixed pairwise merge tree over block indices; identical for any worker count.
  std::vector<EnsembleAccumulator> level = std::move(blocks);
  while (level.size() > 1) {
    std::vector<EnsembleAccumulator> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      level[i].merge(level[i + 1]);
      up.push_back(std::move(level[i]));
    }
    if (level.size() % 2 == 1) up.push_back(std::move(level.back()));
    level = std::move(up);
  }

  EnsembleStats stats;
  stats.config = config;
  stats.functional = functional;
  stats.runs = runs;
  stats.m = plan.m;
  stats.exponent_a = plan.exponent_a;
  stats.checkpoint_steps = plan.checkpoints;
  stats.acc = std::move(level.front());
  return stats;
}

namespace {

// Regularized lower incomplete gamma P(s, x) by series / continued fraction.
double gamma_p(double s, double x) {
  if (x < 0.0 || s <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(s);
  if (x < s + 1.0) {
    double term = 1.0 / s;
    double sum = term;
    double ap = s;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(s, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + s * std::log(x) - lg) * h;
  return 1.0 - q;
}

}  // namespace

double chi2_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double ks_distance_chi2(std::vector<double> samples, int dof) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_chi2: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = chi2_cdf(samples[i], dof);
    d_max = std::max(d_max, std::fabs(static_cast<double>(i + 1) / n - f));
    d_max = std::max(d_max, std::fabs(f - static_cast<double>(i) / n));
  }
  return d_max;
}

double ks_distance_uniform(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_uniform: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::min(1.0, std::max(0.0, samples[i]));
    d_max = std::max(d_max, std::fabs(static_cast<double>(i + 1) / n - f));
    d_max = std::max(d_max, std::fabs(f - static_cast<double>(i) / n));
  }
  return d_max;
}

double ks_null_threshold(std::uint64_t runs, double quantile, int reps) {
  if (runs < 2 || reps < 10) throw std::invalid_argument("ks_null_threshold: bad arguments");
  // The KS statistic under a continuous null is distribution-free, so the
  // calibration draws uniforms.  Fixed internal seed: the threshold is a
  // function of (runs, quantile, reps) only.
  std::vector<double> distances(reps);
  std::vector<double> sample(runs);
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(kKsCalibrationSeed, static_cast<std::uint64_t>(rep));
    for (auto& v : sample) v = rng.uniform01();
    distances[rep] = ks_distance_uniform(sample);
  }
  std::sort(distances.begin(), distances.end());
  const double pos = quantile * (reps - 1);
  const int lo = static_cast<int>(pos);
  const int hi = std::min(lo + 1, reps - 1);
  const double frac = pos - lo;
  return distances[lo] * (1.0 - frac) + distances[hi] * frac;
}

namespace {

void fill_header(StatReport& report, const EnsembleStats& stats) {
  report.functional = functional_name(stats.functional);
  report.regime = regime_name(classify_regime(stats.config.d, stats.config.p).kind);
  report.d = stats.config.d;
  report.p = stats.config.p;
  report.biased = stats.config.first_step.is_biased();
  report.q = stats.config.first_step.q;
  report.seed = stats.config.seed;
  report.runs = stats.runs;
  report.horizon = stats.config.horizon;
}

CheckLine make_line(const std::string& name, double estimate, double target, double se,
                    double z_threshold) {
  CheckLine line;
  line.name = name;
  line.estimate = estimate;
  line.target = target;
  line.se = se;
  line.z = se > 0.0 ? (estimate - target) / se : (estimate == target ? 0.0 : INFINITY);
  line.pass = std::fabs(line.z) < z_threshold;
  return line;
}

}  // namespace

StatReport covariance_report(const EnsembleStats& stats, const std::vector<double>& target,
                             double z_threshold) {
  const int m = stats.m;
  if (target.size() != static_cast<std::size_t>(m) * m)
    throw std::invalid_argument("covariance_report: target size mismatch");
  StatReport report;
  fill_header(report, stats);
  report.z_threshold = z_threshold;
  const double runs = static_cast<double>(stats.runs);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double est = stats.acc.product_mean(i, j);
      const double se = std::sqrt(stats.acc.product_central_m2(i, j) / (runs - 1.0) / runs);
      auto line = make_line("cov_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), est,
                            target[i * m + j], se, z_threshold);
      report.pass = report.pass && line.pass;
      report.lines.push_back(std::move(line));
    }
  }
  return report;
}

StatReport normality_check(const EnsembleStats& stats, double sigma2, int d) {
  if (stats.functional == Functional::Superdiffusive)
    throw std::domain_error("normality_check: the superdiffusive limit is not Gaussian");
  if (stats.functional != Functional::Diffusive && stats.functional != Functional::Critical)
    throw std::invalid_argument("normality_check: needs a diffusive or critical functional");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("normality_check: sigma2 must be positive");

  StatReport report;
  fill_header(report, stats);
  std::vector<double> q = stats.acc.quadratic_form_samples();
  for (auto& v : q) v /= sigma2;
  report.has_gof = true;
  report.gof.distance = ks_distance_chi2(std::move(q), d);
  report.gof.threshold = ks_null_threshold(stats.runs);
  report.gof.pass = report.gof.distance < report.gof.threshold;
  report.pass = report.gof.pass;
  report.diagnostics.emplace_back("sigma2", sigma2);
  return report;
}

StatReport superdiffusive_limit(const EnsembleStats& stats, int d, double p,
                                const FirstStepLaw& law) {
  if (stats.functional != Functional::Superdiffusive)
    throw std::invalid_argument("superdiffusive_limit: needs the superdiffusive functional");
  const Regime regime = classify_regime(d, p);
  if (regime.kind != RegimeKind::Superdiffusive)
    throw std::domain_error("superdiffusive_limit: regime mismatch");
  const double a = regime.a;
  const std::uint64_t n = stats.config.horizon;
  const double n_pow = std::pow(static_cast<double>(n), a);

  StatReport report;
  fill_header(report, stats);
  const double runs = static_cast<double>(stats.runs);

  // Exact finite-n targets for the estimated functional S_n / n^a.
  const auto second = second_moment_final(n, d, p, law);
  const double an = gamma_ratio_an(n, a);
  std::vector<double> mean_target(d, 0.0);
  if (law.is_biased())
    mean_target[0] = (2.0 * d * law.q - 1.0) / (2.0 * d - 1.0) / an / n_pow;

  const auto lm = l_moments(d, p, law);

  for (int i = 0; i < d; ++i) {
    const double est = stats.acc.mean(i);
    const double se = std::sqrt(stats.acc.central_m2(i) / (runs - 1.0) / runs);
    auto line = make_line("mean_" + std::to_string(i + 1), est, mean_target[i], se,
                          report.z_threshold);
    report.pass = report.pass && line.pass;
    report.lines.push_back(std::move(line));
    report.diagnostics.emplace_back("limit_mean_" + std::to_string(i + 1), lm.e_l[i]);
  }

  double qf_target = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double target = second[i * d + j] / (n_pow * n_pow);
      if (i == j) qf_target += target;
      const double est = stats.acc.product_mean(i, j);
      const double se = std::sqrt(stats.acc.product_central_m2(i, j) / (runs - 1.0) / runs);
      auto line = make_line("cov_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), est,
                            target, se, report.z_threshold);
      report.pass = report.pass && line.pass;
      report.lines.push_back(std::move(line));
      report.diagnostics.emplace_back(
          "limit_cov_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), lm.e_llt[i * d + j]);
    }
  }

  // ||L||^2: estimate from the quadratic-form digest.
  {
    const auto& qf = stats.acc.quadratic_form_samples();
    double mean = 0.0;
    for (const double v : qf) mean += v;
    mean /= runs;
    double var = 0.0;
    for (const double v : qf) var += (v - mean) * (v - mean);
    var /= (runs - 1.0);
    auto line = make_line("norm2", mean, qf_target, std::sqrt(var / runs), report.z_threshold);
    report.pass = report.pass && line.pass;
    report.lines.push_back(std::move(line));
    report.diagnostics.emplace_back("limit_norm2", lm.e_l_norm2);
    report.diagnostics.emplace_back("limit_norm2_gap", mean - lm.e_l_norm2);
  }
  return report;
}

StatReport occupation_report(const EnsembleStats& stats, double z_threshold) {
  if (stats.functional != Functional::Occupation)
    throw std::invalid_argument("occupation_report: needs the occupation functional");
  StatReport report;
  fill_header(report, stats);
  report.z_threshold = z_threshold;
  const int d = stats.config.d;
  const double runs = static_cast<double>(stats.runs);
  const double target = 1.0 / d;
  for (std::size_t c = 0; c < stats.checkpoint_steps.size(); ++c) {
    for (int i = 0; i < d; ++i) {
      const int idx = static_cast<int>(c) * d + i;
      const double est = stats.acc.mean(idx);
      const double se = std::sqrt(stats.acc.central_m2(idx) / (runs - 1.0) / runs);
      auto line = make_line("lambda_n" + std::to_string(stats.checkpoint_steps[c]) + "_axis" +
                                std::to_string(i + 1),
                            est, target, se, z_threshold);
      report.pass = report.pass && line.pass;
      report.lines.push_back(std::move(line));
    }
  }
  return report;
}

std::string StatReport::to_json() const {
  JsonWriter w;
  w.begin_object();
  w.key("config").begin_object();
  w.key("d").value(d);
  w.key("p").value(p);
  if (biased) w.key("q").value(q);
  w.key("horizon").value(horizon);
  w.key("seed").value(seed);
  w.end_object();
  w.key("regime").value(regime);
  w.key("functional").value(functional);
  w.key("R").value(runs);
  w.key("horizon").value(horizon);
  w.key("estimates").begin_object();
  for (const auto& line : lines) w.key(line.name).value(line.estimate);
  w.end_object();
  w.key("targets").begin_object();
  for (const auto& line : lines) w.key(line.name).value(line.target);
  w.end_object();
  w.key("standard_errors").begin_object();
  for (const auto& line : lines) w.key(line.name).value(line.se);
  w.end_object();
  w.key("z_scores").begin_object();
  for (const auto& line : lines) w.key(line.name).value(line.z);
  w.end_object();
  w.key("diagnostics").begin_object();
  for (const auto& [name, value] : diagnostics) w.key(name).value(value);
  w.end_object();
  if (has_gof) {
    w.key("gof_distance").value(gof.distance);
    w.key("gof_threshold").value(gof.threshold);
  } else {
    w.key("gof_distance").null_value();
    w.key("gof_threshold").null_value();
  }
  w.key("pass").value(pass);
  w.end_object();
  return w.str();
}

}  // namespace merw
