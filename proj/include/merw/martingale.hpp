#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "merw/engines.hpp"
#include "merw/model.hpp"

namespace merw {

// Per-trajectory series of the martingale objects: a_n, M_n = a_n S_n,
// the increments eps_n = S_n - gamma_{n-1} S_{n-1}, the predictable
// quadratic variation <M>_n accumulated from the exact conditional
// covariance, its trace, and the deterministic scale v_n.
struct MartingaleTrack {
  int d = 1;
  std::uint64_t n = 0;
  std::vector<double> an;     // n
  std::vector<double> m;      // n * d
  std::vector<double> eps;    // n * d
  std::vector<double> qv;     // n * d * d, running <M>
  std::vector<double> tr_qv;  // n
  std::vector<double> vn;     // n

  double m_at(std::uint64_t step, int axis) const { return m[(step - 1) * d + (axis - 1)]; }
  double eps_at(std::uint64_t step, int axis) const { return eps[(step - 1) * d + (axis - 1)]; }
  double qv_at(std::uint64_t step, int i, int j) const {
    return qv[((step - 1) * static_cast<std::uint64_t>(d) + (i - 1)) * d + (j - 1)];
  }
};

// Requires a trajectory recorded with full positions and horizon >= 2.
// `first_step` fixes the unconditional covariance of the first increment.
MartingaleTrack track(const Trajectory& traj, double p,
                      const FirstStepLaw& first_step = FirstStepLaw::uniform());

// Running quadratic-strong-law statistic.  Diffusive:
// (1/log n) sum_{k=1}^n S_k S_k^T / k^2, emitted from n = 2.  Critical:
// (1/log log n) sum_{k=2}^n S_k S_k^T / (k log k)^2, emitted from n = 3.
// Superdiffusive input is a domain error.
struct MatrixSeries {
  int d = 1;
  std::vector<std::uint64_t> steps;
  std::vector<double> values;  // steps.size() * d * d

  double at(std::size_t row, int i, int j) const {
    return values[(row * static_cast<std::size_t>(d) + (i - 1)) * d + (j - 1)];
  }
  double trace(std::size_t row) const {
    double t = 0.0;
    for (int i = 1; i <= d; ++i) t += at(row, i, i);
    return t;
  }
};
MatrixSeries qsl_statistic(const Trajectory& traj, RegimeKind regime);

// Law-of-iterated-logarithm diagnostic series.  Diffusive:
// ||S_n||^2 / (2 n log log n), defined from n >= 16.  Critical:
// ||S_n||^2 / (2 n log n log log log n), defined from n >= 3814280.
// Below the threshold the value is flagged undefined rather than clamped.
struct ScalarSeries {
  std::vector<std::uint64_t> steps;
  std::vector<double> values;
  std::vector<std::uint8_t> defined;
};
ScalarSeries lil_statistic(const Trajectory& traj, RegimeKind regime);

inline constexpr std::uint64_t kLilDiffusiveThreshold = 16;
inline constexpr std::uint64_t kLilCriticalThreshold = 3814280;

// Occupation fractions Lambda_n(i) = N_n(i)/n along the trajectory.
struct OccupationTrack {
  int d = 1;
  std::uint64_t n = 0;
  std::vector<double> lambda;  // n * d

  double at(std::uint64_t step, int axis) const { return lambda[(step - 1) * d + (axis - 1)]; }
};
OccupationTrack occupation(const Trajectory& traj);

// Statistic series CSV: "n,value..." per the series' shape, 17 significant
// digits, LF endings.
void write_series_csv(std::ostream& out, const MatrixSeries& series);
void write_series_csv(std::ostream& out, const ScalarSeries& series);
void write_series_csv(std::ostream& out, const OccupationTrack& track);

}  // namespace merw
