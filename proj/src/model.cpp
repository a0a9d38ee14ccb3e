#include "merw/model.hpp"

#include <stdexcept>
#include <string>

namespace merw {

void WalkConfig::validate() const {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("memory parameter p must lie in [0,1]");
  if (first_step.is_biased() && !(first_step.q >= 0.0 && first_step.q <= 1.0))
    throw std::invalid_argument("first-step bias q must lie in [0,1]");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  // 64-bit positions cannot overflow below this; simulate() refuses beyond it.
  if (horizon >= (1ULL << 62)) throw std::invalid_argument("horizon must be < 2^62");
}

double critical_memory(int d) {
  if (d < 1) throw std::invalid_argument("critical_memory: dimension must be >= 1");
  return static_cast<double>(2 * d + 1) / static_cast<double>(4 * d);
}

double memory_to_a(int d, double p) {
  if (d < 1) throw std::invalid_argument("memory_to_a: dimension must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("memory_to_a: p must lie in [0,1]");
  return (2.0 * d * p - 1.0) / (2.0 * d - 1.0);
}

Regime classify_regime(int d, double p) {
  const double pd = critical_memory(d);
  const double a = memory_to_a(d, p);
  RegimeKind kind;
  if (p == pd) {
    kind = RegimeKind::Critical;
  } else if (p < pd) {
    kind = RegimeKind::Diffusive;
  } else {
    kind = RegimeKind::Superdiffusive;
  }
  return Regime{kind, a, pd};
}

SignedDirection apply_matrix(int power, int sign, const SignedDirection& dir, int d) {
  if (d < 1) throw std::invalid_argument("apply_matrix: dimension must be >= 1");
  if (power < 0 || power >= d)
    throw std::invalid_argument("apply_matrix: power must lie in [0, d-1], got " +
                                std::to_string(power));
  if (sign != 1 && sign != -1) throw std::invalid_argument("apply_matrix: sign must be +1 or -1");
  if (dir.axis < 1 || dir.axis > d) throw std::invalid_argument("apply_matrix: axis out of range");
  // J e_i = e_{i-1} with wrap-around, so J^m e_i = e_{((i-1-m) mod d) + 1}.
  int zero_based = dir.axis - 1 - power;
  zero_based %= d;
  if (zero_based < 0) zero_based += d;
  return SignedDirection{zero_based + 1, sign * dir.sign};
}

std::vector<double> step_distribution(const DirectionCounts& counts, double p) {
  if (counts.n == 0)
    throw std::invalid_argument(
        "step_distribution: undefined at n = 0; the first step follows the first-step law");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("step_distribution: p must lie in [0,1]");
  const int d = counts.d;
  const double n = static_cast<double>(counts.n);
  const double off = (1.0 - p) / (2.0 * d - 1.0);
  std::vector<double> probs(2 * d);
  for (int j = 0; j < 2 * d; ++j) {
    const double c = static_cast<double>(counts.counts[j]);
    probs[j] = (p * c + off * (n - c)) / n;
  }
  return probs;
}

}  // namespace merw
