#include "merw/martingale.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "merw/closedform.hpp"
#include "merw/report.hpp"

namespace merw {

namespace {

void require_full_positions(const Trajectory& traj, const char* who) {
  if (!traj.has_full_positions())
    throw std::invalid_argument(std::string(who) + ": trajectory must be recorded with positions");
}

}  // namespace

MartingaleTrack track(const Trajectory& traj, double p, const FirstStepLaw& first_step) {
  require_full_positions(traj, "track");
  if (traj.horizon < 2) throw std::invalid_argument("track: degenerate input, horizon must be >= 2");
  const int d = traj.d;
  const std::uint64_t n = traj.horizon;
  const double a = memory_to_a(d, p);
  const auto series = gamma_ratio_series(n, a);

  MartingaleTrack out;
  out.d = d;
  out.n = n;
  out.an = series.an;
  out.vn = series.vn;
  out.m.resize(n * static_cast<std::uint64_t>(d));
  out.eps.resize(n * static_cast<std::uint64_t>(d));
  out.qv.assign(n * static_cast<std::uint64_t>(d) * d, 0.0);
  out.tr_qv.resize(n);

  // Occupation counts along the path, rebuilt from position differences.
  std::vector<std::uint64_t> axis_counts(d, 0);
  std::vector<double> qv_running(static_cast<std::size_t>(d) * d, 0.0);

  // Step 1: eps_1 = S_1, and the first quadratic-variation increment is the
  // unconditional covariance a_1^2 E[X_1 X_1^T] of the first-step law.
  {
    for (int i = 0; i < d; ++i) {
      const double s1 = static_cast<double>(traj.positions[i]);
      out.m[i] = s1;
      out.eps[i] = s1;
    }
    if (!first_step.is_biased()) {
      for (int i = 0; i < d; ++i) qv_running[i * d + i] = 1.0 / d;
    } else {
      const double rest = (1.0 - first_step.q) / (2.0 * d - 1.0);
      qv_running[0] = first_step.q + rest;
      for (int i = 1; i < d; ++i) qv_running[i * d + i] = 2.0 * rest;
    }
    double tr = 0.0;
    for (int i = 0; i < d; ++i) {
      out.qv[i * d + i] = qv_running[i * d + i];
      tr += qv_running[i * d + i];
    }
    out.tr_qv[0] = tr;
  }

  for (std::uint64_t step = 2; step <= n; ++step) {
    const std::uint64_t prev = step - 1;
    // Fold the step taken at time `prev` into the occupation counts.
    int moved_axis = 0;
    for (int i = 1; i <= d; ++i) {
      const std::int64_t at_prev = traj.at(prev - 1, i);
      const std::int64_t at_before = (prev >= 2) ? traj.at(prev - 2, i) : 0;
      if (at_prev != at_before) moved_axis = i;
    }
    if (moved_axis == 0) throw std::invalid_argument("track: trajectory steps must be unit moves");
    axis_counts[moved_axis - 1] += 1;

    const double gamma = 1.0 + a / static_cast<double>(prev);
    const double r = a / static_cast<double>(prev);
    const double ak = out.an[step - 1];

    // eps_step and M_step.
    for (int i = 1; i <= d; ++i) {
      const double s_now = static_cast<double>(traj.at(step - 1, i));
      const double s_prev = static_cast<double>(traj.at(prev - 1, i));
      out.eps[(step - 1) * d + (i - 1)] = s_now - gamma * s_prev;
      out.m[(step - 1) * d + (i - 1)] = ak * s_now;
    }

    // <M> increment: a_step^2 E[eps eps^T | F_{prev}] from the realized
    // counts, E[eps eps^T | F_n] = (a/n) Sigma_n + ((1-a)/d) I - (a/n)^2 S S^T.
    for (int i = 1; i <= d; ++i) {
      const double si = static_cast<double>(traj.at(prev - 1, i));
      for (int j = 1; j <= d; ++j) {
        const double sj = static_cast<double>(traj.at(prev - 1, j));
        double inc = -r * r * si * sj;
        if (i == j) inc += r * static_cast<double>(axis_counts[i - 1]) + (1.0 - a) / d;
        qv_running[(i - 1) * d + (j - 1)] += ak * ak * inc;
      }
    }
    double tr = 0.0;
    for (int i = 0; i < d * d; ++i)
      out.qv[(step - 1) * static_cast<std::uint64_t>(d) * d + i] = qv_running[i];
    for (int i = 0; i < d; ++i) tr += qv_running[i * d + i];
    out.tr_qv[step - 1] = tr;
  }
  return out;
}

MatrixSeries qsl_statistic(const Trajectory& traj, RegimeKind regime) {
  require_full_positions(traj, "qsl_statistic");
  if (regime == RegimeKind::Superdiffusive)
    throw std::domain_error("qsl_statistic: no quadratic strong law holds in the superdiffusive regime");
  const bool critical = regime == RegimeKind::Critical;
  const std::uint64_t start = critical ? 3 : 2;
  if (traj.horizon < start)
    throw std::invalid_argument("qsl_statistic: trajectory too short for the requested regime");

  const int d = traj.d;
  MatrixSeries out;
  out.d = d;
  std::vector<double> running(static_cast<std::size_t>(d) * d, 0.0);

  const auto accumulate = [&](std::uint64_t k) {
    const double kk = static_cast<double>(k);
    const double denom = critical ? 1.0 / (kk * std::log(kk) * kk * std::log(kk)) : 1.0 / (kk * kk);
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j)
        running[(i - 1) * d + (j - 1)] +=
            denom * static_cast<double>(traj.at(k - 1, i)) * static_cast<double>(traj.at(k - 1, j));
  };

  if (!critical) accumulate(1);
  for (std::uint64_t k = 2; k <= traj.horizon; ++k) {
    accumulate(k);
    if (k < start) continue;
    const double norm =
        critical ? 1.0 / std::log(std::log(static_cast<double>(k))) : 1.0 / std::log(static_cast<double>(k));
    out.steps.push_back(k);
    for (int i = 0; i < d * d; ++i) out.values.push_back(norm * running[i]);
  }
  return out;
}

ScalarSeries lil_statistic(const Trajectory& traj, RegimeKind regime) {
  require_full_positions(traj, "lil_statistic");
  if (regime == RegimeKind::Superdiffusive)
    throw std::domain_error("lil_statistic: no law of iterated logarithm holds in the superdiffusive regime");
  const bool critical = regime == RegimeKind::Critical;
  const std::uint64_t threshold = critical ? kLilCriticalThreshold : kLilDiffusiveThreshold;

  const int d = traj.d;
  ScalarSeries out;
  out.steps.reserve(traj.horizon);
  out.values.reserve(traj.horizon);
  out.defined.reserve(traj.horizon);
  for (std::uint64_t k = 1; k <= traj.horizon; ++k) {
    out.steps.push_back(k);
    if (k < threshold) {
      out.values.push_back(0.0);
      out.defined.push_back(0);
      continue;
    }
    double norm2 = 0.0;
    for (int i = 1; i <= d; ++i) {
      const double si = static_cast<double>(traj.at(k - 1, i));
      norm2 += si * si;
    }
    const double kk = static_cast<double>(k);
    const double denom = critical ? 2.0 * kk * std::log(kk) * std::log(std::log(std::log(kk)))
                                  : 2.0 * kk * std::log(std::log(kk));
    out.values.push_back(norm2 / denom);
    out.defined.push_back(1);
  }
  return out;
}

OccupationTrack occupation(const Trajectory& traj) {
  require_full_positions(traj, "occupation");
  const int d = traj.d;
  OccupationTrack out;
  out.d = d;
  out.n = traj.horizon;
  out.lambda.resize(traj.horizon * static_cast<std::uint64_t>(d));
  std::vector<std::uint64_t> counts(d, 0);
  for (std::uint64_t k = 1; k <= traj.horizon; ++k) {
    int moved_axis = 0;
    for (int i = 1; i <= d; ++i) {
      const std::int64_t now = traj.at(k - 1, i);
      const std::int64_t before = (k >= 2) ? traj.at(k - 2, i) : 0;
      if (now != before) moved_axis = i;
    }
    if (moved_axis == 0)
      throw std::invalid_argument("occupation: trajectory steps must be unit moves");
    counts[moved_axis - 1] += 1;
    for (int i = 0; i < d; ++i)
      out.lambda[(k - 1) * d + i] = static_cast<double>(counts[i]) / static_cast<double>(k);
  }
  return out;
}

void write_series_csv(std::ostream& out, const MatrixSeries& series) {
  out << "n";
  for (int i = 1; i <= series.d; ++i)
    for (int j = 1; j <= series.d; ++j) out << ",v_" << i << "_" << j;
  out << "\n";
  for (std::size_t row = 0; row < series.steps.size(); ++row) {
    out << series.steps[row];
    for (int i = 1; i <= series.d; ++i)
      for (int j = 1; j <= series.d; ++j) out << "," << fmt17(series.at(row, i, j));
    out << "\n";
  }
}

void write_series_csv(std::ostream& out, const ScalarSeries& series) {
  out << "n,value,defined\n";
  for (std::size_t row = 0; row < series.steps.size(); ++row) {
    out << series.steps[row] << "," << fmt17(series.values[row]) << ","
        << (series.defined[row] ? 1 : 0) << "\n";
  }
}

void write_series_csv(std::ostream& out, const OccupationTrack& track) {
  out << "n";
  for (int i = 1; i <= track.d; ++i) out << ",lambda_" << i;
  out << "\n";
  for (std::uint64_t step = 1; step <= track.n; ++step) {
    out << step;
    for (int i = 1; i <= track.d; ++i) out << "," << fmt17(track.at(step, i));
    out << "\n";
  }
}

}  // namespace merw
