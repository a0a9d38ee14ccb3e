#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "merw/model.hpp"

// Exact arithmetic layer: enumeration oracles and moment recurrences over
// arbitrary-precision rationals.  Everything here is deterministic and
// independent of the floating-point simulation path it is used to check.
namespace merw::exact {

using Rational = mpq_class;

// Exact conversion of a decimal literal ("0.625", "1", "-0.3") or a
// fraction literal ("5/8") to a rational.
Rational from_decimal(const std::string& text);

Rational critical_memory_exact(int d);
Rational memory_to_a_exact(int d, const Rational& p);
RegimeKind classify_exact(int d, const Rational& p);

struct ExactConfig {
  int d = 1;
  Rational p;
  bool biased = false;
  Rational q;  // Biased only

  void validate() const;
};

// Signed-direction counts in canonical order (+e1, -e1, +e2, -e2, ...).
using CountsKey = std::vector<std::uint32_t>;

std::int64_t key_position(const CountsKey& key, int axis);
std::uint64_t key_axis_count(const CountsKey& key, int axis);

struct ExactLaw {
  int d = 1;
  std::uint64_t n = 0;
  std::map<CountsKey, Rational> prob;
};

// Number of weak compositions of n into `parts` parts, saturating at UINT64_MAX.
std::uint64_t composition_count(std::uint64_t n, int parts);

inline constexpr std::uint64_t kDefaultStateBudget = 500;

// Law of the counts after each step 1..n by exact forward recursion on
// count states.  Throws BudgetError if the level-n composition count
// exceeds the budget.
std::vector<ExactLaw> enumerate_exact_levels(std::uint64_t n, const ExactConfig& config,
                                             std::uint64_t state_budget = kDefaultStateBudget);
ExactLaw enumerate_exact(std::uint64_t n, const ExactConfig& config,
                         std::uint64_t state_budget = kDefaultStateBudget);

// Literal-engine oracle: enumerates full step histories, drawing the
// remembered time and the signed permutation matrix exactly as the full
// engine does (via apply_matrix), then aggregates histories into counts.
// Exponential in n; budget counts histories.
ExactLaw enumerate_full_history(std::uint64_t n, const ExactConfig& config,
                                std::uint64_t history_budget = (1u << 22));

struct ExactMoments {
  std::vector<Rational> mean;             // d entries, E[S_n]
  std::vector<Rational> second_moment;    // d*d row-major, E[S_n S_n^T]
  std::vector<Rational> occupation_mean;  // d entries, E[N_n(i)]
  Rational m_norm2;                       // E[||M_n||^2]; meaningful iff has_m_norm2
  bool has_m_norm2 = false;
};
ExactMoments law_moments(const ExactLaw& law, const ExactConfig& config);

// Exact conditional next-step law given the counts at time n.
std::vector<Rational> step_distribution_exact(const CountsKey& counts, std::uint64_t n,
                                              const ExactConfig& config);

// Gamma-ratio normalizers a_1..a_n as exact rationals (a_1 = 1,
// a_{k+1} = a_k * k/(k+a)).  Requires a > -1.
std::vector<Rational> an_series_exact(std::uint64_t n, const Rational& a);

// E[S_k S_k^T] for k = 1..n from the conditional-covariance recurrence,
// including the occupation correction required by a biased first step.
std::vector<std::vector<Rational>> second_moment_recurrence_exact(std::uint64_t n,
                                                                  const ExactConfig& config);
// E[S_k] for k = 1..n (zero vectors under the uniform first step).
std::vector<std::vector<Rational>> mean_recurrence_exact(std::uint64_t n,
                                                         const ExactConfig& config);

// Exact conditional moments (E[||eps||^2 | F_n], E[||eps||^4 | F_n]) for a
// state with the given counts at time n >= 1.
std::pair<Rational, Rational> conditional_eps_moments_exact(const CountsKey& counts,
                                                            std::uint64_t n,
                                                            const ExactConfig& config);

// One-step martingale defect sum_outcomes P * (a_{n+1} S_{n+1} - a_n S_n)
// for a state at time n; all components are zero iff the martingale
// property holds there.  a_n and a_{n+1} are supplied by the caller.
std::vector<Rational> martingale_defect(const CountsKey& counts, std::uint64_t n,
                                        const ExactConfig& config, const Rational& a_n,
                                        const Rational& a_np1);

double to_double(const Rational& r);

}  // namespace merw::exact
