#pragma once

#include <cstdint>
#include <vector>

namespace merw {

// One of the 2d signed lattice directions.  `axis` is 1-based.
// The canonical order used everywhere (probability vectors, counts,
// file formats) is +e1, -e1, +e2, -e2, ...
struct SignedDirection {
  int axis;  // 1..d
  int sign;  // +1 or -1

  int code() const { return 2 * (axis - 1) + (sign < 0 ? 1 : 0); }
  static SignedDirection from_code(int code) {
    return SignedDirection{code / 2 + 1, (code % 2 == 0) ? +1 : -1};
  }
  bool operator==(const SignedDirection&) const = default;
};

enum class RegimeKind { Diffusive, Critical, Superdiffusive };

struct Regime {
  RegimeKind kind;
  double a;    // (2dp - 1)/(2d - 1)
  double p_d;  // (2d + 1)/(4d)
};

struct FirstStepLaw {
  enum class Kind { Uniform, Biased } kind = Kind::Uniform;
  double q = 0.0;  // Biased only: P(first step = +e1); others share (1-q)/(2d-1)

  static FirstStepLaw uniform() { return {Kind::Uniform, 0.0}; }
  static FirstStepLaw biased(double q) { return {Kind::Biased, q}; }
  bool is_biased() const { return kind == Kind::Biased; }
};

struct WalkConfig {
  int d = 1;
  double p = 0.5;
  FirstStepLaw first_step = FirstStepLaw::uniform();
  std::uint64_t horizon = 1;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

// Signed-direction counts after n steps: the sufficient statistic of the walk.
struct DirectionCounts {
  int d = 1;
  std::vector<std::uint64_t> counts;  // 2d entries, canonical order
  std::uint64_t n = 0;

  static DirectionCounts zero(int d) { return {d, std::vector<std::uint64_t>(2 * d, 0), 0}; }

  // N_n^X(i): steps taken along axis i, either sign.
  std::uint64_t axis_count(int axis) const {
    return counts[2 * (axis - 1)] + counts[2 * (axis - 1) + 1];
  }
  // S_n^i recovered from the counts.
  std::int64_t position(int axis) const {
    return static_cast<std::int64_t>(counts[2 * (axis - 1)]) -
           static_cast<std::int64_t>(counts[2 * (axis - 1) + 1]);
  }
  void add(const SignedDirection& dir) {
    counts[dir.code()] += 1;
    n += 1;
  }
};

// Critical memory value (2d+1)/(4d).  The returned double is the correctly
// rounded value of the rational; classification treats equality with it as
// exact criticality.
double critical_memory(int d);

// Fundamental parameter a = (2dp - 1)/(2d - 1).
double memory_to_a(int d, double p);

// Trichotomy on a vs 1/2, decided by comparing p against critical_memory(d).
Regime classify_regime(int d, double p);

// Action of the signed permutation matrices: returns sign * J^power * dir,
// where J maps e_i to e_{i-1} (indices mod d).  power must lie in [0, d-1].
SignedDirection apply_matrix(int power, int sign, const SignedDirection& dir, int d);

// Conditional law of the next step given the counts: for each direction j,
// P(j) = p * c_j / n + (1-p)/(2d-1) * (n - c_j) / n.  Canonical order.
std::vector<double> step_distribution(const DirectionCounts& counts, double p);

}  // namespace merw
